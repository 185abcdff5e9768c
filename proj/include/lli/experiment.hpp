#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lli/lli_physics.hpp"
#include "lli/ms_gate.hpp"
#include "lli/noise.hpp"

// Campaign driver: prepares the two-ion frequency states, evolves them under
// the signal plus backgrounds, measures parity at the servo-tracked analysis
// phases, and writes the run log the analysis stage consumes.
//
// Fringe convention used throughout: the mean parity of a signal point is
//   P = A * cos(Phi + 2*phase_setting)
// and the servo locks each setting to Phi + 2*phi0 = +pi/2, the crossing
// where the contrast estimate (p(-45) - p(+45))/2 comes out positive. Near
// the lock p(phi0) = A sin(dphi) and p(phi0+90) = -A sin(dphi), so the phase
// error estimate is asin((p0 - p90)/(2A)) and the servo applies half of it.

namespace lli {

enum class PrepMode { effective_channel, full_gate };
enum class Scheme { entangled, mixed };

struct BlockConfig {
  double tau_short_s = 0.005;
  double tau_long_s = 0.105;
  int shots_per_point = 28;  // calibrated so the entangled Allan prefactor
                             // lands at 1.72 Hz*sqrt(s); see tools/bench notes
  double block_duration_s = 40.0;
  double point_spacing_s = 4.0;  // 10 points per block
  void validate() const;
};

struct RunConfig {
  // Default window: 2018-02-19 06:00 to 2018-02-23 03:00 UTC.
  double start_utc = 1519020000.0;
  double end_utc = 1519354800.0;
  double calibration_interval_s = 600.0;  // measurement time between gaps
  double calibration_gap_s = 60.0;
  PrepMode prep_mode = PrepMode::effective_channel;
  Scheme scheme = Scheme::entangled;
  double prep_fidelity = 0.94;
  double pi_pulse_fidelity = 0.99;

  BlockConfig block;
  BFieldProcess bfield;
  ZeemanModel zeeman;
  QuadrupoleModel quadrupole;
  DecayModel decay;
  bool decay_enabled = true;

  // Gradient left over after the R/L lock calibration absorbed the static
  // part; this is what the per-variant frequencies actually show.
  double residual_gradient_gauss = 2e-7;

  // Axial mode frequency wander feeding the quadrupole shift.
  double omega_cm_sigma_hz = 60.0;
  double omega_cm_tau_s = 43200.0;

  // Slow phase random walk of the state preparation, rad per sqrt(s).
  double prep_drift_rad_rt_s = 1e-3;

  double field_log_interval_s = 60.0;

  GateConfig gate;  // used only in full_gate preparation mode

  void validate() const;
};

struct MeasurementRecord {
  double utc = 0.0;
  StateVariant variant = StateVariant::R;
  double tau_s = 0.0;
  double phase_setting_rad = 0.0;
  double parity = 0.0;
  int shots = 0;  // 0 means the exact parity expectation was recorded
  bool contrast_flag = false;
  std::int32_t block = 0;
};

// Branch-pair description the measurement model needs: fringe contrast
// before decay and the preparation phase folded into the fringe.
struct PreparedState {
  StateVariant variant = StateVariant::R;
  double p_outer = 0.5;  // |D5/2 D-5/2| branch population (mirrored for L)
  double p_inner = 0.5;
  double contrast = 0.0;
  double prep_phase_rad = 0.0;
};

PreparedState prepare_lli_state(StateVariant v, const RunConfig& cfg);

// Everything the environment contributes to one measurement window.
struct EnvInputs {
  double f_mean_hz = 0.0;       // signal + zeeman + quadrupole + gradient
  double extra_phase_rad = 0.0; // line pickup integral and prep drift
  double pair_survival = 1.0;
};

MeasurementRecord evolve_and_measure(const PreparedState& prep, double utc,
                                     double tau_s, double phase_setting_rad,
                                     const EnvInputs& env, int shots,
                                     Rng& rng);

// Servo state: one lock phase per (variant, tau) setting.
struct LockState {
  // index [variant][tau], tau 0 = short, 1 = long
  std::array<std::array<double, 2>, 2> phi0{{{0.0, 0.0}, {0.0, 0.0}}};
  double& at(StateVariant v, int tau_idx) {
    return phi0[v == StateVariant::R ? 0 : 1][static_cast<size_t>(tau_idx)];
  }
  double at(StateVariant v, int tau_idx) const {
    return phi0[v == StateVariant::R ? 0 : 1][static_cast<size_t>(tau_idx)];
  }
};

// Environment query the block runner calls per record.
using EnvFn = std::function<EnvInputs(StateVariant v, double utc, double tau_s)>;

// One block: 8 signal records (R/L x short/long x phi0/phi0+90) followed by
// the two contrast records at phi0 -/+ 45 deg on the short-tau R setting.
std::vector<MeasurementRecord> run_block(const RunConfig& cfg,
                                         std::int32_t block_index,
                                         double t_start,
                                         const LockState& locks,
                                         const PreparedState& prep_r,
                                         const PreparedState& prep_l,
                                         const EnvFn& env, Rng& rng);

struct ServoResult {
  LockState locks;
  double dphi_mean_rad = 0.0;
  double amplitude = 0.0;
  bool held = false;  // contrast below threshold, no update applied
};

// Common-mode phase servo: mean of the four per-setting phase errors, half
// of it added to every lock. Holds (and flags) when the block's contrast
// estimate is below the threshold.
ServoResult servo_phase_offset(const std::vector<MeasurementRecord>& block,
                               const LockState& locks,
                               double contrast_threshold = 0.3);

struct FieldLogEntry {
  double utc = 0.0;
  double delta_b_gauss = 0.0;  // slow common-mode deviation from b0
};

struct OmegaLogEntry {
  double utc = 0.0;
  double omega_cm_hz = 0.0;
};

struct CalibrationEvent {
  double utc = 0.0;
  double duration_s = 0.0;
};

struct RunLog {
  std::vector<MeasurementRecord> records;
  std::vector<FieldLogEntry> field_log;
  std::vector<OmegaLogEntry> omega_log;
  std::vector<CalibrationEvent> calibrations;
  int servo_holds = 0;
  int blocks = 0;
  std::uint64_t seed = 0;
  std::string scheme;
};

// Full campaign over [start_utc, end_utc): line-synchronous schedule,
// per-block servo updates, calibration gaps every calibration_interval of
// measurement, field and mode-frequency logs on their own cadence.
// Deterministic for a fixed seed.
RunLog run_campaign(const RunConfig& cfg, const CTensor& c,
                    const LabFrame& frame, std::uint64_t seed);

}  // namespace lli
