#include "lli/rng.hpp"

#include <cmath>

namespace lli {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.28318530717958647692 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

long Rng::binomial(long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n <= 256) {
    long k = 0;
    for (long i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }
  // Large n: normal approximation, adequate for shot counts where the
  // granularity of single draws is far below statistical noise.
  double mean = static_cast<double>(n) * p;
  double var = mean * (1.0 - p);
  double k = std::round(mean + std::sqrt(var) * normal());
  if (k < 0.0) k = 0.0;
  if (k > static_cast<double>(n)) k = static_cast<double>(n);
  return static_cast<long>(k);
}

}  // namespace lli
