#include "lli/timeutil.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lli::timeutil {

long days_from_civil(int y, int m, int d) {
  // Howard Hinnant's algorithm, shifted so the era starts in March.
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

static void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long yy = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

double parse_utc(const std::string& iso) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double s = 0.0;
  char sep = 0;
  int n = std::sscanf(iso.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep,
                      &h, &mi, &s);
  if (n < 3) throw std::invalid_argument("bad UTC timestamp: " + iso);
  if (n >= 4 && sep != 'T' && sep != 't' && sep != ' ')
    throw std::invalid_argument("bad UTC timestamp: " + iso);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59 || s < 0.0 || s >= 61.0)
    throw std::invalid_argument("bad UTC timestamp: " + iso);
  return static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 +
         h * 3600.0 + mi * 60.0 + s;
}

std::string format_utc(double utc_s) {
  double day = std::floor(utc_s / 86400.0);
  double rem = utc_s - day * 86400.0;
  long sec = static_cast<long>(std::floor(rem));
  if (sec >= 86400) {
    sec -= 86400;
    day += 1.0;
  }
  int y;
  unsigned m, d;
  civil_from_days(static_cast<long>(day), y, m, d);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", y, m, d,
                sec / 3600, (sec / 60) % 60, sec % 60);
  return buf;
}

}  // namespace lli::timeutil
