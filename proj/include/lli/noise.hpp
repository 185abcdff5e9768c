#pragma once

#include <cstdint>

#include "lli/rng.hpp"

// Stochastic and systematic backgrounds: magnetic field drift and gradient,
// quadratic Zeeman shift, trap quadrupole shift, spontaneous decay, and the
// ac-Stark budget of the entangling gate.

namespace lli {

struct BFieldProcess {
  double b0_gauss = 3.72;
  double sigma_slow_gauss = 1e-3;      // stationary RMS of the slow drift
  double correlation_time_s = 3600.0;  // drift correlation time
  double gradient_gauss = 0.8e-3;      // field difference ion 0 minus ion 1
  double line_60hz_gauss = 0.2e-3;     // mains pickup amplitude
  double line_freq_hz = 60.0;
};

// Mean-reverting (Ornstein-Uhlenbeck) slow drift plus the mains line.
// Queries must come at nondecreasing times; stepping uses the exact OU
// bridge so the step size never biases the statistics.
class BFieldSampler {
 public:
  BFieldSampler(const BFieldProcess& p, std::uint64_t seed);

  struct Sample {
    double common_gauss = 0.0;  // b0 + slow drift + line
    double slow_gauss = 0.0;    // b0 + slow drift only
    double gradient_gauss = 0.0;
  };
  Sample at(double utc);

  // Integral of the line term over [utc, utc+tau], gauss*seconds, closed form.
  double line_integral(double utc, double tau) const;

 private:
  BFieldProcess p_;
  Rng rng_;
  double t_ = 0.0;
  double slow_ = 0.0;  // deviation from b0
  bool primed_ = false;
};

struct ZeemanModel {
  double quad_coeff_hz_per_gauss = 4.5;
  double g_s = 2.002;
  double g_d = 1.2;
};

double quadratic_zeeman_shift_hz(double delta_b_gauss, const ZeemanModel& z);

struct QuadrupoleModel {
  double ref_shift_hz = 6.2;
  double ref_freq_hz = 830e3;
  double slope_hz_per_hz = -1.5e-6;  // -1.5 mHz per kHz of mode frequency
};

// Shift at the given c.m. frequency; sets *extrapolated when more than
// 10 kHz from the reference point.
double quadrupole_shift_hz(double omega_cm_hz, const QuadrupoleModel& q,
                           bool* extrapolated = nullptr);

enum class StateVariant { R, L };

// Linear-Zeeman branch frequency of the prepared state from per-ion level
// energies. Common field cancels exactly (both branches have total m = 0);
// the gradient term flips sign between R and L.
double dfs_frequency_hz(StateVariant v, double b_common_gauss,
                        double b_gradient_gauss, const ZeemanModel& z);

struct DecayModel {
  double lifetime_s = 1.2;
};

// Probability that none of n_ions decays within tau.
double survival_probability(int n_ions, double tau_s, const DecayModel& d);

// Independent exponential decay draws, one flag per ion.
std::uint32_t decay_events(int n_ions, double tau_s, const DecayModel& d,
                           std::uint64_t seed);

// Bell-coherence loss for quasi-static fractional intensity noise on the
// gate lasers. Quadratic response; the coefficient is calibrated against the
// gate Monte Carlo (see tools/ and the gate tests) and cached here.
double stark_fidelity_penalty(double intensity_rms);

// Response coefficient k in penalty = k * intensity_rms^2.
double stark_penalty_coefficient();

}  // namespace lli
