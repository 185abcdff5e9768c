#include "lli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lli/constants.hpp"
#include "lli/parity.hpp"

namespace lli {

namespace {

constexpr double kLinePeriod = 1.0 / 60.0;

// Mean-reverting process with exact bridge steps (same scheme as the field
// sampler, reused for the axial mode frequency).
class OuSampler {
 public:
  OuSampler(double mean, double sigma, double tau, std::uint64_t seed)
      : mean_(mean), sigma_(sigma), tau_(tau), rng_(seed) {}

  double at(double t) {
    if (!primed_) {
      dev_ = sigma_ * rng_.normal();
      t_ = t;
      primed_ = true;
      return mean_ + dev_;
    }
    if (t < t_) throw std::logic_error("mode sampler queried backwards");
    if (sigma_ > 0.0 && t > t_) {
      const double decay = std::exp(-(t - t_) / tau_);
      dev_ = dev_ * decay +
             sigma_ * std::sqrt(1.0 - decay * decay) * rng_.normal();
    }
    t_ = t;
    return mean_ + dev_;
  }

 private:
  double mean_, sigma_, tau_;
  Rng rng_;
  double t_ = 0.0, dev_ = 0.0;
  bool primed_ = false;
};

class RandomWalk {
 public:
  RandomWalk(double rate_rt_s, std::uint64_t seed)
      : rate_(rate_rt_s), rng_(seed) {}

  double at(double t) {
    if (!primed_) {
      t_ = t;
      primed_ = true;
      return value_;
    }
    if (t < t_) throw std::logic_error("drift sampler queried backwards");
    if (rate_ > 0.0 && t > t_)
      value_ += rate_ * std::sqrt(t - t_) * rng_.normal();
    t_ = t;
    return value_;
  }

 private:
  double rate_;
  Rng rng_;
  double t_ = 0.0, value_ = 0.0;
  bool primed_ = false;
};

double total_phase(const PreparedState& prep, const EnvInputs& env,
                   double tau_s) {
  return constants::two_pi * env.f_mean_hz * tau_s + env.extra_phase_rad +
         prep.prep_phase_rad;
}

struct Point {
  StateVariant v;
  int tau_idx;   // 0 short, 1 long
  int kind;      // 0 p0, 1 p90, 2 contrast -45, 3 contrast +45
};

constexpr Point kBlockOrder[10] = {
    {StateVariant::R, 0, 0}, {StateVariant::R, 0, 1},
    {StateVariant::R, 1, 0}, {StateVariant::R, 1, 1},
    {StateVariant::L, 0, 0}, {StateVariant::L, 0, 1},
    {StateVariant::L, 1, 0}, {StateVariant::L, 1, 1},
    {StateVariant::R, 0, 2}, {StateVariant::R, 0, 3}};

double point_phase(const LockState& locks, const Point& pt) {
  const double phi0 = locks.at(pt.v, pt.tau_idx);
  switch (pt.kind) {
    case 0: return phi0;
    case 1: return phi0 + 0.5 * constants::pi;
    case 2: return phi0 - 0.25 * constants::pi;
    default: return phi0 + 0.25 * constants::pi;
  }
}

// Moves the gate-basis state into the six-level transfer basis and applies
// the two shelving pi pulses (C2 on ion 0, C1 on ion 1).
Ket transfer_chain(const Ket& gate_final) {
  std::vector<std::vector<IonLevel>> lv{
      {{Manifold::S_half, 1}, {Manifold::D_five_half, 1},
       {Manifold::D_five_half, 5}},
      {{Manifold::S_half, -1}, {Manifold::D_five_half, -1},
       {Manifold::D_five_half, -5}}};
  BasisPtr b3 = make_basis(std::move(lv), gate_final.basis->n_max());
  Ket out{b3, Eigen::VectorXcd::Zero(b3->dim())};
  const CompositeBasis& bg = *gate_final.basis;
  std::vector<int> li;
  int n = 0;
  for (int idx = 0; idx < bg.dim(); ++idx) {
    bg.decompose(idx, li, n);
    std::vector<int> li3(2);
    for (int ion = 0; ion < 2; ++ion) {
      const IonLevel& lvl = bg.levels(ion)[static_cast<size_t>(li[static_cast<size_t>(ion)])];
      li3[static_cast<size_t>(ion)] = b3->level_index(ion, lvl);
    }
    out.amp[b3->index(li3, n)] = gate_final.amp[idx];
  }
  out = apply(carrier_rotation(b3, 0, Transition::C2, constants::pi, 0.0), out);
  out = apply(carrier_rotation(b3, 1, Transition::C1, constants::pi, 0.0), out);
  return out;
}

}  // namespace

void BlockConfig::validate() const {
  if (tau_short_s <= 0.0 || tau_long_s <= tau_short_s)
    throw std::invalid_argument("wait times must satisfy 0 < short < long");
  if (shots_per_point < 0) throw std::invalid_argument("shots_per_point");
  if (point_spacing_s <= tau_long_s)
    throw std::invalid_argument("points would overlap");
  if (block_duration_s < 9.0 * point_spacing_s + tau_long_s)
    throw std::invalid_argument("block too short for 10 points");
  // Line-synchronous schedule: spacing on the 60 Hz grid so every window
  // starts at the same mains phase.
  const double cycles = point_spacing_s / kLinePeriod;
  if (std::abs(cycles - std::round(cycles)) > 1e-9)
    throw std::invalid_argument("point spacing must be a multiple of 1/60 s");
}

void RunConfig::validate() const {
  if (end_utc <= start_utc) throw std::invalid_argument("empty campaign window");
  if (prep_fidelity <= 0.0 || prep_fidelity > 1.0 ||
      pi_pulse_fidelity <= 0.0 || pi_pulse_fidelity > 1.0)
    throw std::invalid_argument("fidelities must be in (0, 1]");
  if (calibration_interval_s < block.block_duration_s)
    throw std::invalid_argument("calibration interval shorter than a block");
  if (calibration_gap_s < 0.0) throw std::invalid_argument("calibration gap");
  if (field_log_interval_s <= 0.0) throw std::invalid_argument("log interval");
  block.validate();
}

PreparedState prepare_lli_state(StateVariant v, const RunConfig& cfg) {
  PreparedState st;
  st.variant = v;
  // Four shelving pi pulses touch the branch amplitudes between preparation
  // and readout; each costs its fidelity twice in the fringe (once per
  // branch amplitude).
  const double pulse_penalty = std::pow(cfg.pi_pulse_fidelity, 8);
  if (cfg.prep_mode == PrepMode::effective_channel) {
    st.contrast = cfg.prep_fidelity * pulse_penalty;
  } else {
    GateConfig g = cfg.gate;
    if (g.tones[0].rabi_rad <= 0.0) {
      calibrate_rabi(g);
      if (g.tones[0].stark_shift_hz != 0.0 || g.tones[1].stark_shift_hz != 0.0)
        calibrate_stark_offsets(g);
    }
    // The L chain is the exact mirror (C4/C3 gate, C1/C2 transfers), so one
    // simulation serves both variants.
    BasisPtr basis = make_gate_basis(g.mode.n_max);
    Ket after = transfer_chain(propagate_final(gate_initial_state(basis), g,
                                               g.gate_time_s));
    const CompositeBasis& b3 = *after.basis;
    cplx rho = 0.0;
    double p_outer = 0.0, p_inner = 0.0;
    for (int n = 0; n < b3.fock_dim(); ++n) {
      const cplx a_out = after.amp[b3.index({2, 2}, n)];
      const cplx a_in = after.amp[b3.index({1, 1}, n)];
      rho += a_out * std::conj(a_in);
      p_outer += std::norm(a_out);
      p_inner += std::norm(a_in);
    }
    st.p_outer = p_outer;
    st.p_inner = p_inner;
    st.contrast = 2.0 * std::abs(rho) * pulse_penalty;
    st.prep_phase_rad = std::arg(rho);
  }
  if (cfg.scheme == Scheme::mixed) st.contrast *= 0.5;
  return st;
}

MeasurementRecord evolve_and_measure(const PreparedState& prep, double utc,
                                     double tau_s, double phase_setting_rad,
                                     const EnvInputs& env, int shots,
                                     Rng& rng) {
  MeasurementRecord rec;
  rec.utc = utc;
  rec.variant = prep.variant;
  rec.tau_s = tau_s;
  rec.phase_setting_rad = phase_setting_rad;
  rec.shots = shots;
  const double phi = total_phase(prep, env, tau_s);
  const double fringe =
      prep.contrast * std::cos(phi + 2.0 * phase_setting_rad);
  if (shots == 0) {
    rec.parity = env.pair_survival * fringe;
    return rec;
  }
  // Shots where an ion decayed lose the coherence and give a zero-mean
  // outcome; the rest carry the full pre-decay fringe.
  const long alive = rng.binomial(shots, env.pair_survival);
  const long plus = rng.binomial(alive, 0.5 * (1.0 + fringe)) +
                    rng.binomial(shots - alive, 0.5);
  rec.parity =
      static_cast<double>(2 * plus - shots) / static_cast<double>(shots);
  return rec;
}

std::vector<MeasurementRecord> run_block(const RunConfig& cfg,
                                         std::int32_t block_index,
                                         double t_start,
                                         const LockState& locks,
                                         const PreparedState& prep_r,
                                         const PreparedState& prep_l,
                                         const EnvFn& env, Rng& rng) {
  std::vector<MeasurementRecord> out;
  out.reserve(10);
  for (int j = 0; j < 10; ++j) {
    const Point& pt = kBlockOrder[j];
    const double tau =
        pt.tau_idx == 0 ? cfg.block.tau_short_s : cfg.block.tau_long_s;
    const double utc = t_start + j * cfg.block.point_spacing_s;
    const PreparedState& prep =
        pt.v == StateVariant::R ? prep_r : prep_l;
    MeasurementRecord rec =
        evolve_and_measure(prep, utc, tau, point_phase(locks, pt),
                           env(pt.v, utc, tau), cfg.block.shots_per_point,
                           rng);
    rec.contrast_flag = pt.kind >= 2;
    rec.block = block_index;
    out.push_back(rec);
  }
  return out;
}

ServoResult servo_phase_offset(const std::vector<MeasurementRecord>& block,
                               const LockState& locks,
                               double contrast_threshold) {
  ServoResult res;
  res.locks = locks;
  // Contrast pair: the two flagged records, lower analysis phase first.
  const MeasurementRecord* c_lo = nullptr;
  const MeasurementRecord* c_hi = nullptr;
  for (const auto& r : block) {
    if (!r.contrast_flag) continue;
    if (!c_lo) {
      c_lo = &r;
    } else {
      c_hi = &r;
      if (c_hi->phase_setting_rad < c_lo->phase_setting_rad)
        std::swap(c_lo, c_hi);
    }
  }
  if (!c_lo || !c_hi) throw std::invalid_argument("block lacks contrast records");
  res.amplitude = 0.5 * (c_lo->parity - c_hi->parity);
  if (!(res.amplitude >= contrast_threshold)) {
    res.held = true;
    return res;
  }
  // Four settings, each a (p0, p90) pair identified by the quarter-turn
  // between their analysis phases.
  double tau_short = std::numeric_limits<double>::max();
  for (const auto& r : block)
    if (!r.contrast_flag) tau_short = std::min(tau_short, r.tau_s);
  double sum = 0.0;
  int count = 0;
  for (int vi = 0; vi < 2; ++vi) {
    for (int ti = 0; ti < 2; ++ti) {
      const StateVariant v = vi == 0 ? StateVariant::R : StateVariant::L;
      const MeasurementRecord* p0 = nullptr;
      const MeasurementRecord* p90 = nullptr;
      // Collect the two signal records of this setting in time order.
      std::vector<const MeasurementRecord*> pair;
      for (const auto& r : block) {
        if (r.contrast_flag || r.variant != v) continue;
        if ((r.tau_s > 1.5 * tau_short ? 1 : 0) != ti) continue;
        pair.push_back(&r);
      }
      if (pair.size() != 2) continue;
      const double dphase =
          pair[1]->phase_setting_rad - pair[0]->phase_setting_rad;
      if (dphase > 0.0) {
        p0 = pair[0];
        p90 = pair[1];
      } else {
        p0 = pair[1];
        p90 = pair[0];
      }
      double x = (p0->parity - p90->parity) / (2.0 * res.amplitude);
      x = std::max(-1.0, std::min(1.0, x));
      sum += std::asin(x);
      ++count;
    }
  }
  if (count == 0) {
    res.held = true;
    return res;
  }
  res.dphi_mean_rad = sum / count;
  // The estimate runs opposite the fringe-phase drift, so adding half of it
  // re-centers the lock (the 1/2 undoes the doubled phase dependence).
  for (int vi = 0; vi < 2; ++vi)
    for (int ti = 0; ti < 2; ++ti)
      res.locks.phi0[static_cast<size_t>(vi)][static_cast<size_t>(ti)] +=
          0.5 * res.dphi_mean_rad;
  return res;
}

RunLog run_campaign(const RunConfig& cfg, const CTensor& c,
                    const LabFrame& frame_in, std::uint64_t seed) {
  cfg.validate();
  LabFrame frame = frame_in;
  resolve_equinox_epoch(frame, cfg.start_utc);
  if (cfg.start_utc < frame.equinox_epoch_utc)
    throw std::invalid_argument("campaign precedes the equinox epoch");
  const SiderealModel signal = sidereal_coefficients(c, frame);

  const PreparedState prep_r = prepare_lli_state(StateVariant::R, cfg);
  const PreparedState prep_l = prepare_lli_state(StateVariant::L, cfg);

  BFieldSampler bfield(cfg.bfield, derive_seed(seed, 1));
  OuSampler omega(cfg.quadrupole.ref_freq_hz, cfg.omega_cm_sigma_hz,
                  cfg.omega_cm_tau_s, derive_seed(seed, 2));
  RandomWalk prep_drift(cfg.prep_drift_rad_rt_s, derive_seed(seed, 3));

  RunLog log;
  log.seed = seed;
  log.scheme = cfg.scheme == Scheme::mixed ? "mixed" : "entangled";

  double next_log = cfg.start_utc;
  auto drain_logs = [&](double upto) {
    while (next_log <= upto) {
      log.field_log.push_back(
          {next_log, bfield.at(next_log).slow_gauss - cfg.bfield.b0_gauss});
      log.omega_log.push_back({next_log, omega.at(next_log)});
      next_log += cfg.field_log_interval_s;
    }
  };

  auto env_at = [&](StateVariant v, double utc, double tau) {
    drain_logs(utc);
    EnvInputs e;
    const BFieldSampler::Sample b = bfield.at(utc + 0.5 * tau);
    e.f_mean_hz =
        signal.window_mean(utc - frame.equinox_epoch_utc, tau) +
        quadratic_zeeman_shift_hz(b.slow_gauss - cfg.bfield.b0_gauss,
                                  cfg.zeeman) +
        cfg.quadrupole.slope_hz_per_hz *
            (omega.at(utc + 0.5 * tau) - cfg.quadrupole.ref_freq_hz) +
        dfs_frequency_hz(v, b.slow_gauss, cfg.residual_gradient_gauss,
                         cfg.zeeman);
    e.extra_phase_rad =
        constants::two_pi * cfg.zeeman.quad_coeff_hz_per_gauss *
            bfield.line_integral(utc, tau) +
        prep_drift.at(utc);
    e.pair_survival =
        cfg.decay_enabled ? survival_probability(2, tau, cfg.decay) : 1.0;
    return e;
  };

  // Block 0 environments are computed once, used first to set every lock at
  // its zero crossing and then replayed for the actual records.
  std::vector<EnvInputs> cache;
  size_t cache_pos = 0;
  bool replay = false;
  EnvFn env_fn = [&](StateVariant v, double utc, double tau) {
    if (replay && cache_pos < cache.size()) return cache[cache_pos++];
    return env_at(v, utc, tau);
  };

  LockState locks;
  {
    for (int j = 0; j < 10; ++j) {
      const Point& pt = kBlockOrder[j];
      const double tau =
          pt.tau_idx == 0 ? cfg.block.tau_short_s : cfg.block.tau_long_s;
      cache.push_back(
          env_at(pt.v, cfg.start_utc + j * cfg.block.point_spacing_s, tau));
    }
    for (int j : {0, 2, 4, 6}) {
      const Point& pt = kBlockOrder[j];
      const double tau =
          pt.tau_idx == 0 ? cfg.block.tau_short_s : cfg.block.tau_long_s;
      const PreparedState& prep =
          pt.v == StateVariant::R ? prep_r : prep_l;
      locks.at(pt.v, pt.tau_idx) =
          0.5 * (0.5 * constants::pi -
                 total_phase(prep, cache[static_cast<size_t>(j)], tau));
    }
    replay = true;
  }

  double t = cfg.start_utc;
  double measured_since_cal = 0.0;
  std::int32_t block_index = 0;
  while (t + cfg.block.block_duration_s <= cfg.end_utc) {
    Rng block_rng(derive_seed(seed, 4, static_cast<std::uint64_t>(block_index)));
    std::vector<MeasurementRecord> recs = run_block(
        cfg, block_index, t, locks, prep_r, prep_l, env_fn, block_rng);
    ServoResult sr = servo_phase_offset(recs, locks);
    locks = sr.locks;
    if (sr.held) ++log.servo_holds;
    for (auto& r : recs) log.records.push_back(r);
    ++block_index;
    replay = false;

    t += cfg.block.block_duration_s;
    measured_since_cal += cfg.block.block_duration_s;
    if (measured_since_cal >= cfg.calibration_interval_s &&
        t + cfg.calibration_gap_s + cfg.block.block_duration_s <=
            cfg.end_utc) {
      log.calibrations.push_back({t, cfg.calibration_gap_s});
      t += cfg.calibration_gap_s;
      measured_since_cal = 0.0;
    }
  }
  drain_logs(cfg.end_utc);
  log.blocks = block_index;
  return log;
}

}  // namespace lli
