#include "lli/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "lli/constants.hpp"
#include "lli/levels.hpp"

namespace lli {

BFieldSampler::BFieldSampler(const BFieldProcess& p, std::uint64_t seed)
    : p_(p), rng_(seed) {
  if (p_.correlation_time_s <= 0.0)
    throw std::invalid_argument("correlation time must be positive");
}

namespace {

// Phase of a P-periodic oscillator at absolute time t, kept accurate for
// large unix timestamps by reducing t first.
double line_phase(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  return constants::two_pi * r / period;
}

}  // namespace

BFieldSampler::Sample BFieldSampler::at(double utc) {
  if (!primed_) {
    slow_ = p_.sigma_slow_gauss * rng_.normal();
    t_ = utc;
    primed_ = true;
  } else {
    if (utc < t_) throw std::invalid_argument("field queries must not go back in time");
    const double dt = utc - t_;
    if (dt > 0.0) {
      const double decay = std::exp(-dt / p_.correlation_time_s);
      slow_ = slow_ * decay +
              p_.sigma_slow_gauss * std::sqrt(1.0 - decay * decay) * rng_.normal();
      t_ = utc;
    }
  }
  Sample s;
  s.slow_gauss = p_.b0_gauss + slow_;
  const double period = 1.0 / p_.line_freq_hz;
  s.common_gauss =
      s.slow_gauss + p_.line_60hz_gauss * std::sin(line_phase(utc, period));
  s.gradient_gauss = p_.gradient_gauss;
  return s;
}

double BFieldSampler::line_integral(double utc, double tau) const {
  if (p_.line_60hz_gauss == 0.0 || tau == 0.0) return 0.0;
  const double period = 1.0 / p_.line_freq_hz;
  const double w = constants::two_pi / period;
  return p_.line_60hz_gauss / w *
         (std::cos(line_phase(utc, period)) -
          std::cos(line_phase(utc + tau, period)));
}

double quadratic_zeeman_shift_hz(double delta_b_gauss, const ZeemanModel& z) {
  return z.quad_coeff_hz_per_gauss * delta_b_gauss;
}

double quadrupole_shift_hz(double omega_cm_hz, const QuadrupoleModel& q,
                           bool* extrapolated) {
  if (extrapolated)
    *extrapolated = std::abs(omega_cm_hz - q.ref_freq_hz) > 10e3;
  return q.ref_shift_hz + q.slope_hz_per_hz * (omega_cm_hz - q.ref_freq_hz);
}

namespace {

double zeeman_energy_hz(const IonLevel& lv, double b_gauss,
                        const ZeemanModel& z) {
  const double g = lv.manifold == Manifold::S_half ? z.g_s : z.g_d;
  return g * constants::mu_bohr_hz_per_gauss * b_gauss * (lv.two_mj / 2.0);
}

}  // namespace

double dfs_frequency_hz(StateVariant v, double b_common_gauss,
                        double b_gradient_gauss, const ZeemanModel& z) {
  const double b_ion0 = b_common_gauss + 0.5 * b_gradient_gauss;
  const double b_ion1 = b_common_gauss - 0.5 * b_gradient_gauss;
  const int sign = v == StateVariant::R ? 1 : -1;
  // Outer branch: (D +5/2, D -5/2) for R, mirrored for L. Inner branch: +-1/2.
  const IonLevel outer0{Manifold::D_five_half, 5 * sign};
  const IonLevel outer1{Manifold::D_five_half, -5 * sign};
  const IonLevel inner0{Manifold::D_five_half, 1 * sign};
  const IonLevel inner1{Manifold::D_five_half, -1 * sign};
  const double e_outer =
      zeeman_energy_hz(outer0, b_ion0, z) + zeeman_energy_hz(outer1, b_ion1, z);
  const double e_inner =
      zeeman_energy_hz(inner0, b_ion0, z) + zeeman_energy_hz(inner1, b_ion1, z);
  return e_outer - e_inner;
}

double survival_probability(int n_ions, double tau_s, const DecayModel& d) {
  if (d.lifetime_s <= 0.0) throw std::invalid_argument("lifetime must be positive");
  if (tau_s < 0.0) throw std::invalid_argument("negative wait time");
  return std::exp(-n_ions * tau_s / d.lifetime_s);
}

std::uint32_t decay_events(int n_ions, double tau_s, const DecayModel& d,
                           std::uint64_t seed) {
  if (n_ions < 0 || n_ions > 32) throw std::invalid_argument("ion count range");
  const double p = 1.0 - survival_probability(1, tau_s, d);
  Rng rng(seed);
  std::uint32_t flags = 0;
  for (int i = 0; i < n_ions; ++i)
    if (rng.bernoulli(p)) flags |= 1u << i;
  return flags;
}

double stark_penalty_coefficient() {
  // Calibrated against the gate Monte Carlo: 10 kHz light shifts on both
  // carriers, compensated at nominal intensity, 1000 trials of 5% rms
  // intensity noise (see the gate tests). Includes the loop-closure error
  // from the Rabi-frequency wobble, which is quadratic as well.
  return 12.4;
}

double stark_fidelity_penalty(double intensity_rms) {
  if (intensity_rms < 0.0 || intensity_rms >= 0.5)
    throw std::invalid_argument("intensity_rms outside [0, 0.5)");
  return stark_penalty_coefficient() * intensity_rms * intensity_rms;
}

}  // namespace lli
