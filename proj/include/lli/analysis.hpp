#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lli/experiment.hpp"

// Measurement records in, physics out: per-block frequencies, systematic
// corrections, hourly binning, Allan deviation, the sidereal harmonic fit,
// and the inversion to tensor bounds.

namespace lli {

// Phase error from the two zero-crossing parities, p0 = A sin(dphi) and
// p90 = -A sin(dphi). The half-difference rejects any common parity offset.
// Values beyond |x| = 1 within clamp_slack are clamped (sampling noise);
// beyond that the pair is inconsistent with the amplitude and throws.
double extract_phase(double p0, double p90, double amplitude,
                     double clamp_slack = 0.5);

// A = (p(-45 deg) - p(+45 deg)) / 2; negative means the servo lost the
// crossing, callers flag it.
double extract_amplitude(double p_minus45, double p_plus45);

// Phase error from finite-shot parities. asin is convex away from zero, so
// the plain estimator picks up a bias of order var(x)/2 per unit curvature;
// at the shot counts we run (tens per point) that is a percent-level pull,
// enough to leak into the frequency difference. Subtracts the second-order
// (Jensen) term computed from the measured parity spread, with the
// correction argument winsorized so it stays bounded near saturation.
// shots <= 0 means the parities are exact and the plain estimator is used.
double extract_phase_sampled(double p0, double p90, double amplitude,
                             long shots, double clamp_slack = 0.5);

struct FreqEntry {
  double utc = 0.0;   // mean timestamp of the signal records
  double f_hz = 0.0;  // (f_R + f_L) / 2
  double sigma_hz = 0.0;
  double f_r_hz = 0.0;
  double f_l_hz = 0.0;
  bool variant_resolved = true;
  bool corrected_zeeman = false;
  bool corrected_quadrupole = false;
  bool uncorrected_gap = false;
  bool exact_parity = false;   // records carried expectation values, not shots
  bool has_basis = false;
  // Exact window means of {1, sin wT, cos wT, sin 2wT, cos 2wT} as seen by
  // this entry's frequency estimate; the sidereal fit uses them directly.
  Eigen::Matrix<double, 5, 1> basis = Eigen::Matrix<double, 5, 1>::Zero();
  std::int32_t block = -1;
};

struct FrequencySeries {
  std::vector<FreqEntry> entries;
  double delta_tau_s = 0.1;
  double epoch_utc = 0.0;
  double omega_rad = 0.0;
  std::vector<std::string> skipped;  // one reason per dropped block
};

struct ExtractOptions {
  // Scales the short-tau contrast estimate down to the long wait time,
  // A_long = A_short * exp(-2 (tau_long - tau_short) / lifetime).
  // Zero or negative disables the scaling (noiseless runs).
  double decay_lifetime_s = 1.2;
  double ema_alpha = 0.2;     // contrast tracking across blocks
  double clamp_slack = 0.5;
  double min_amplitude = 0.05;
  bool store_basis = true;
  double epoch_utc = 0.0;     // resolved equinox epoch for the basis rows
  double omega_rad = 0.0;     // 0 means the standard sidereal rate
};

// One block's 10 records -> one frequency entry. a_short is the tracked
// contrast at the short wait time. Throws on missing settings.
FreqEntry extract_frequency(const std::vector<MeasurementRecord>& block,
                            double a_short, const ExtractOptions& opts);

// Campaign-scale driver: groups records into blocks, tracks the contrast
// with an EMA over the flagged pairs, extracts one entry per usable block.
// The parallel version splits the per-block extraction across threads after
// the sequential contrast pass; results are identical to the serial one.
FrequencySeries extract_block_frequencies(
    const std::vector<MeasurementRecord>& records, const ExtractOptions& opts);
FrequencySeries extract_block_frequencies_serial(
    const std::vector<MeasurementRecord>& records, const ExtractOptions& opts);

// Subtracts the measured-field Zeeman term and the mode-frequency quadrupole
// drift using nearest log samples. Entries farther than max_gap_s from any
// log sample keep their value and are flagged uncorrected.
void correct_systematics(FrequencySeries& series,
                         const std::vector<FieldLogEntry>& field_log,
                         const std::vector<OmegaLogEntry>& omega_log,
                         const ZeemanModel& zeeman,
                         const QuadrupoleModel& quadrupole,
                         double max_gap_s = 600.0);

// Inverse-variance binning; basis rows aggregate with the same weights as
// the values, so a fit on the bins equals a fit on the raw entries for a
// band-limited signal.
FrequencySeries bin_series(const FrequencySeries& series,
                           double width_s = 3600.0);

struct AllanPoint {
  double tau_s = 0.0;
  double sigma_hz = 0.0;
  int groups = 0;
};
struct AllanCurve {
  std::vector<AllanPoint> points;
  double prefactor_hz_rt_s = 0.0;  // sigma extrapolated to tau = 1 s
  double exponent = 0.0;
};
struct AllanOptions {
  bool overlapping = false;
  double fit_decade_factor = 10.0;  // log-log fit over tau <= factor * dt
  int min_groups = 4;
};

// Two-sample deviation on the doubling grid from the median sampling step.
// Gaps are tolerated by grouping on index, with tau labeled m * dt.
AllanCurve allan_deviation(const FrequencySeries& series,
                           const AllanOptions& opts = {});

struct FitResult {
  double dc = 0.0, a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  Eigen::Matrix<double, 5, 5> covariance =
      Eigen::Matrix<double, 5, 5>::Zero();
  double chi2_red = 0.0;
  bool scaled = false;  // covariance inflated by chi2_red
  int n_bins = 0;
};

// Weighted least squares on {1, sin wT, cos wT, sin 2wT, cos 2wT}, T from
// the equinox epoch. Uses stored basis rows when present. Covariance is
// scaled by chi2_red when chi2_red > 1. Throws on rank deficiency.
FitResult fit_sidereal(const FrequencySeries& binned, const LabFrame& frame);

struct Bound {
  double value = 0.0;
  double sigma = 0.0;
};
struct CmnBounds {
  Bound c_x_minus_y, c_xy, c_xz, c_yz;
};

// (a,b,c,d) -> tensor components through the inverse harmonic map, with
// linear error propagation. The fit's dc row is dropped here.
CmnBounds invert_to_cmn(const FitResult& fit, const HarmonicDesign& design);

// Seconds since the reference equinox.
double sidereal_time(double utc, double epoch);

}  // namespace lli
