#include "lli/lli_physics.hpp"

#include <cmath>
#include <stdexcept>

#include "lli/constants.hpp"

namespace lli {

double level_shift_hz(int two_mj, double c0) {
  if (two_mj < -5 || two_mj > 5 || (two_mj & 1) == 0)
    throw std::invalid_argument("mJ out of the D5/2 manifold");
  const double mj2 = 0.25 * two_mj * two_mj;
  return c0 * (constants::level_shift_const_hz -
               constants::level_shift_mj2_hz * mj2);
}

double pair_frequency_hz(const CTensor& c, double utc, const LabFrame& frame) {
  return constants::pair_frequency_hz_per_c0 * c0_lab(c, utc, frame);
}

double SiderealModel::evaluate(double t) const {
  return dc + a_sin * std::sin(omega_rad * t) + b_cos * std::cos(omega_rad * t) +
         c_sin2 * std::sin(2.0 * omega_rad * t) +
         d_cos2 * std::cos(2.0 * omega_rad * t);
}

namespace {

// Mean of sin(w t') over [t, t+tau]: sinc(w tau/2) * sin(w (t + tau/2)).
double mean_sin(double w, double t, double tau) {
  const double h = 0.5 * w * tau;
  const double s = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  return s * std::sin(w * (t + 0.5 * tau));
}

double mean_cos(double w, double t, double tau) {
  const double h = 0.5 * w * tau;
  const double s = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  return s * std::cos(w * (t + 0.5 * tau));
}

}  // namespace

double SiderealModel::window_mean(double t, double tau) const {
  if (tau == 0.0) return evaluate(t);
  return dc + a_sin * mean_sin(omega_rad, t, tau) +
         b_cos * mean_cos(omega_rad, t, tau) +
         c_sin2 * mean_sin(2.0 * omega_rad, t, tau) +
         d_cos2 * mean_cos(2.0 * omega_rad, t, tau);
}

Eigen::Matrix<double, 5, 1> harmonic_window_means(double t, double tau,
                                                  double w) {
  Eigen::Matrix<double, 5, 1> v;
  if (tau == 0.0) {
    v << 1.0, std::sin(w * t), std::cos(w * t), std::sin(2.0 * w * t),
        std::cos(2.0 * w * t);
    return v;
  }
  v << 1.0, mean_sin(w, t, tau), mean_cos(w, t, tau), mean_sin(2.0 * w, t, tau),
      mean_cos(2.0 * w, t, tau);
  return v;
}

SiderealModel sidereal_coefficients(const CTensor& c, const LabFrame& frame) {
  if (std::isnan(frame.equinox_epoch_utc))
    throw std::runtime_error("equinox epoch not resolved");
  const double w = constants::omega_sidereal_rad;
  const int n = 192;  // two periods, 96 points each
  const double span = 2.0 * constants::sidereal_day_s;
  Eigen::MatrixXd x(n, 5);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double t = span * i / n;
    x.row(i) = harmonic_window_means(t, 0.0, w).transpose();
    y[i] = pair_frequency_hz(c, frame.equinox_epoch_utc + t, frame);
  }
  Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  SiderealModel m;
  m.dc = beta[0];
  m.a_sin = beta[1];
  m.b_cos = beta[2];
  m.c_sin2 = beta[3];
  m.d_cos2 = beta[4];
  m.omega_rad = w;
  return m;
}

HarmonicDesign design_matrix(const LabFrame& frame) {
  HarmonicDesign d;
  for (int j = 0; j < 4; ++j) {
    CTensor unit;
    if (j == 0) unit.c_x_minus_y = 1.0;
    if (j == 1) unit.c_xy = 1.0;
    if (j == 2) unit.c_xz = 1.0;
    if (j == 3) unit.c_yz = 1.0;
    SiderealModel m = sidereal_coefficients(unit, frame);
    d.m(0, j) = m.a_sin;
    d.m(1, j) = m.b_cos;
    d.m(2, j) = m.c_sin2;
    d.m(3, j) = m.d_cos2;
  }
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(d.m);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[3];
  if (smin <= smax * 1e-12 || smax == 0.0)
    throw std::runtime_error("degenerate frame: harmonic map is singular");
  d.condition = smax / smin;
  return d;
}

GhzSnr ghz_snr_factor(int n_ions, PrepScheme scheme, double decay_rate,
                      double tau) {
  if (n_ions < 2 || (n_ions % 2) != 0)
    throw std::invalid_argument("n_ions must be even and >= 2");
  GhzSnr g;
  g.phase_factor = n_ions / 2.0;
  g.preparation_factor = scheme == PrepScheme::entangled
                             ? 1.0
                             : std::pow(2.0, 1.0 - n_ions);
  g.contrast_factor = std::exp(-(n_ions - 2) * decay_rate * tau);
  g.total = g.phase_factor * g.preparation_factor * g.contrast_factor;
  return g;
}

}  // namespace lli
