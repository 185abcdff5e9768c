#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lli/csv.hpp"
#include "lli/rng.hpp"
#include "lli/timeutil.hpp"

using namespace lli;

TEST_CASE("days_from_civil anchors") {
  CHECK(timeutil::days_from_civil(1970, 1, 1) == 0);
  CHECK(timeutil::days_from_civil(1970, 1, 2) == 1);
  CHECK(timeutil::days_from_civil(1969, 12, 31) == -1);
  CHECK(timeutil::days_from_civil(2000, 3, 1) == 11017);
  // leap day handling
  CHECK(timeutil::days_from_civil(2016, 3, 1) -
            timeutil::days_from_civil(2016, 2, 28) ==
        2);
  CHECK(timeutil::days_from_civil(2100, 3, 1) -
            timeutil::days_from_civil(2100, 2, 28) ==
        1);
}

TEST_CASE("utc parse and format round trip") {
  CHECK(timeutil::parse_utc("1970-01-01T00:00:00Z") == 0.0);
  CHECK(timeutil::parse_utc("2018-02-19T06:00:00Z") == 1519020000.0);
  CHECK(timeutil::format_utc(1519020000.0) == "2018-02-19T06:00:00Z");
  // relaxed forms all map to the same instant
  CHECK(timeutil::parse_utc("2018-02-19 06:00:00") == 1519020000.0);
  CHECK(timeutil::parse_utc("2018-02-19T06:00:00.25Z") ==
        doctest::Approx(1519020000.25));
  CHECK_THROWS_AS(timeutil::parse_utc("not a date"), std::invalid_argument);
  CHECK_THROWS_AS(timeutil::parse_utc("2018-13-01T00:00:00Z"),
                  std::invalid_argument);

  for (double t : {0.0, 951868800.0, 1519020000.0, 4102444799.0}) {
    CHECK(timeutil::parse_utc(timeutil::format_utc(t)) == t);
  }
}

TEST_CASE("rng determinism and stream separation") {
  Rng a(123), b(123), c(124);
  bool same = true, differ = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.next_u64();
    same = same && (x == b.next_u64());
    differ = differ || (x != c.next_u64());
  }
  CHECK(same);
  CHECK(differ);
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST_CASE("rng distribution moments") {
  Rng rng(7);
  const int n = 200000;
  double su = 0.0, su2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    su2 += u * u;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n - (su / n) * (su / n) ==
        doctest::Approx(1.0 / 12.0).epsilon(0.03));

  double sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rng binomial moments, both regimes") {
  // n = 28 goes through the Bernoulli sum, n = 4000 through the normal tail
  for (long nn : {28L, 4000L}) {
    Rng rng(11);
    const int trials = 60000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < trials; ++i) {
      long k = rng.binomial(nn, 0.3);
      CHECK(k >= 0);
      CHECK(k <= nn);
      s += k;
      s2 += double(k) * k;
    }
    double mean = s / trials;
    double var = s2 / trials - mean * mean;
    CHECK(mean == doctest::Approx(0.3 * nn).epsilon(0.01));
    CHECK(var == doctest::Approx(0.21 * nn).epsilon(0.05));
  }
}

TEST_CASE("csv numbers round trip bit exact") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0, -0.0,
                   1519020000.123456, 3.434702e-3}) {
    CHECK(std::stod(csv::Writer::num(v)) == v);
  }
  CHECK(csv::Writer::num(42L) == "42");
}

TEST_CASE("csv write read round trip") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "lli_csv_rt.csv").string();
  {
    csv::Writer w(path, {"t", "v"});
    w.row({csv::Writer::num(1.5), "abc"});
    w.row({csv::Writer::num(-2.25), "d"});
  }
  csv::Table t = csv::read(path);
  REQUIRE(t.header.size() == 2);
  CHECK(t.col("t") == 0);
  CHECK(t.col("v") == 1);
  CHECK(t.col("missing") == -1);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "-2.25");
  CHECK(t.rows[0][1] == "abc");
  fs::remove(path);

  CHECK_THROWS_AS(csv::read("/nonexistent/nope.csv"), std::runtime_error);
}

TEST_CASE("csv rejects ragged rows") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "lli_csv_bad.csv").string();
  std::FILE* f = std::fopen(path.c_str(), "w");
  std::fputs("a,b\n1,2\n3\n", f);
  std::fclose(f);
  CHECK_THROWS_AS(csv::read(path), std::runtime_error);
  fs::remove(path);
}
