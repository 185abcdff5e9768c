#pragma once

#include <Eigen/Dense>

#include "lli/frame.hpp"

// Signal model: D5/2 level shifts per unit C0(2), the two-ion branch
// frequency, its sidereal harmonic decomposition, and the entanglement
// scaling formulas for larger registers.

namespace lli {

// c0 * (2.16e15 - 7.42e14 mJ^2) Hz; two_mj = 2*mJ.
double level_shift_hz(int two_mj, double c0);

// Branch frequency of |D_1/2 D_-1/2> relative to |D_5/2 D_-5/2>:
// 2*shift(5/2) - 2*shift(1/2) = -8.904e15 * c0_lab(t) Hz.
double pair_frequency_hz(const CTensor& c, double utc, const LabFrame& frame);

// f(T) = dc + a sin(wT) + b cos(wT) + c sin(2wT) + d cos(2wT), T measured
// from the equinox epoch.
struct SiderealModel {
  double dc = 0.0;
  double a_sin = 0.0;
  double b_cos = 0.0;
  double c_sin2 = 0.0;
  double d_cos2 = 0.0;
  double omega_rad = 0.0;

  double evaluate(double t_since_epoch) const;
  // Mean of the model over [t, t+tau] (t since epoch); exact.
  double window_mean(double t_since_epoch, double tau) const;
};

// Least-squares projection of pair_frequency onto the five-function basis,
// sampled over two sidereal periods. The model is band-limited, so the
// projection residual is at rounding level.
SiderealModel sidereal_coefficients(const CTensor& c, const LabFrame& frame);

// Linear map (C_X-Y, C_XY, C_XZ, C_YZ) -> (a, b, c, d), built column by
// column from unit tensors. Throws on a degenerate frame (e.g. colatitude 0,
// where the harmonics vanish).
struct HarmonicDesign {
  Eigen::Matrix4d m;
  double condition;
};
HarmonicDesign design_matrix(const LabFrame& frame);

// Exact window means of the harmonic basis functions: value k is the mean of
// {1, sin(wT), cos(wT), sin(2wT), cos(2wT)} over [t, t+tau], t since epoch.
Eigen::Matrix<double, 5, 1> harmonic_window_means(double t_since_epoch,
                                                  double tau,
                                                  double omega_rad);

// Signal-to-noise of an n-ion register relative to the two-ion entangled
// scheme, factored into its three pieces.
enum class PrepScheme { entangled, probabilistic_separable };
struct GhzSnr {
  double phase_factor = 1.0;        // n/2 from mJ^2 additivity
  double preparation_factor = 1.0;  // 1 entangled, 2^(1-n) probabilistic
  double contrast_factor = 1.0;     // exp(-(n-2) * decay_rate * tau)
  double total = 1.0;
};
GhzSnr ghz_snr_factor(int n_ions, PrepScheme scheme, double decay_rate,
                      double tau);

}  // namespace lli
