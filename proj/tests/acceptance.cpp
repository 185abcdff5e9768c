// Acceptance gate for the simulator. Runs the nine release criteria end to
// end and prints one PASS/FAIL line each, with the measured numbers inline.
// Exit code is the number of failed criteria. Tolerances are pinned here, in
// code, so a regression shows up as a red line and not as a quiet drift.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "lli/analysis.hpp"
#include "lli/constants.hpp"
#include "lli/experiment.hpp"
#include "lli/frame.hpp"
#include "lli/lli_physics.hpp"
#include "lli/ms_gate.hpp"
#include "lli/noise.hpp"
#include "lli/rng.hpp"

using namespace lli;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void report(int idx, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", idx, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double secs(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Campaign with every stochastic input switched off and exact parities.
RunConfig quiet_run() {
  RunConfig r;
  r.block.shots_per_point = 0;
  r.bfield.sigma_slow_gauss = 0.0;
  r.bfield.line_60hz_gauss = 0.0;
  r.bfield.gradient_gauss = 0.0;
  r.residual_gradient_gauss = 0.0;
  r.omega_cm_sigma_hz = 0.0;
  r.prep_drift_rad_rt_s = 0.0;
  r.decay_enabled = false;
  return r;
}

FrequencySeries analyze_log(const RunLog& log, const RunConfig& rc,
                            const LabFrame& frame, double lifetime) {
  ExtractOptions opts;
  opts.decay_lifetime_s = lifetime;
  opts.epoch_utc = frame.equinox_epoch_utc;
  FrequencySeries s = extract_block_frequencies(log.records, opts);
  correct_systematics(s, log.field_log, log.omega_log, rc.zeeman,
                      rc.quadrupole);
  return s;
}

// 1. Calibrated noiseless gate: closure at t_g, small transient population,
//    agreement with the eigendecomposition propagator, under 10 s of wall.
void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  GateConfig cfg;
  calibrate_rabi(cfg);
  const Ket k0 = gate_initial_state(make_gate_basis(cfg.mode.n_max));
  const Ket kf = propagate_final(k0, cfg, cfg.gate_time_s);
  const GatePopulations p = gate_populations(kf);
  const Ket ke = propagate_expm(k0, cfg, cfg.gate_time_s, cfg.step_s);
  const double fid = fidelity(kf, ke);
  const double wall = secs(t0);
  const bool ok = std::abs(p.p_ss - 0.5) <= 0.01 &&
                  std::abs(p.p_dd - 0.5) <= 0.01 && p.p_mixed <= 0.02 &&
                  fid >= 1.0 - 1e-6 && wall < 10.0;
  report(1, ok,
         fmt("p_ss=%.4f p_dd=%.4f p_mixed=%.4f oracle_fidelity=%.9f "
             "wall=%.1fs (need 0.5+-0.01, <=0.02, >=1-1e-6, <10s)",
             p.p_ss, p.p_dd, p.p_mixed, fid, wall));
}

// 2. 5% quasi-static intensity noise costs 2.5% +- 1% of Bell fidelity.
void criterion2() {
  GateConfig cfg;
  cfg.mode.n_max = 5;
  cfg.tones[0].stark_shift_hz = 1e4;
  cfg.tones[1].stark_shift_hz = 1e4;
  calibrate_rabi(cfg);
  calibrate_stark_offsets(cfg);
  const Ket k0 = gate_initial_state(make_gate_basis(cfg.mode.n_max));
  const double f0 =
      gate_fidelity(propagate_final(k0, cfg, cfg.gate_time_s)).overlap;
  const EnsembleResult mc = bell_fidelity_ensemble(cfg, 1000, 0.05, 42);
  const double drop = f0 - mc.fidelity;
  const bool ok = drop >= 0.015 && drop <= 0.035;
  report(2, ok,
         fmt("noiseless=%.4f ensemble=%.4f drop=%.4f (need 0.025+-0.010, "
             "%d trials)",
             f0, mc.fidelity, drop, mc.n_trials));
}

// 3. Prepared contrast 0.87 decays to 0.70+-0.03 at tau=105 ms with the
//    1.2 s lifetime; 1-survival matches 1-exp(-0.175)=0.161.
void criterion3() {
  RunConfig rc;
  const PreparedState ps = prepare_lli_state(StateVariant::R, rc);
  const DecayModel dm;  // 1.2 s default
  const double surv = survival_probability(2, 0.105, dm);

  EnvInputs env;
  env.pair_survival = surv;
  const double phi0 = 0.5 * (0.5 * constants::pi - ps.prep_phase_rad);
  Rng rng(1);
  const MeasurementRecord lo = evolve_and_measure(
      ps, rc.start_utc, 0.105, phi0 - 0.25 * constants::pi, env, 0, rng);
  const MeasurementRecord hi = evolve_and_measure(
      ps, rc.start_utc, 0.105, phi0 + 0.25 * constants::pi, env, 0, rng);
  const double a_tau = extract_amplitude(lo.parity, hi.parity);
  const double decay_frac = 1.0 - surv;
  const bool ok = std::abs(ps.contrast - 0.87) <= 0.01 &&
                  a_tau >= 0.67 && a_tau <= 0.73 &&
                  std::abs(decay_frac - 0.161) < 1e-3 &&
                  std::abs(surv - std::exp(-0.175)) < 1e-12;
  report(3, ok,
         fmt("contrast=%.6f at_105ms=%.6f 1-survival=%.6f (need 0.87+-0.01, "
             "0.70+-0.03, 0.161+-1e-3)",
             ps.contrast, a_tau, decay_frac));
}

// 4. Null-campaign properties: common-mode field only -> differential phase
//    identically zero; gradient only -> f_R = -f_L with zero average.
void criterion4(const LabFrame& frame) {
  const auto t0 = std::chrono::steady_clock::now();

  RunConfig rc = quiet_run();
  rc.bfield.sigma_slow_gauss = 5e-3;
  rc.bfield.line_60hz_gauss = 2e-4;
  rc.zeeman.quad_coeff_hz_per_gauss = 0.0;  // leaves the linear coupling only
  rc.end_utc = rc.start_utc + 33000.0;
  const RunLog log_c = run_campaign(rc, CTensor{}, frame, 5);
  const FrequencySeries sc = analyze_log(log_c, rc, frame, 0.0);
  double cmax = 0.0;
  for (const auto& e : sc.entries)
    cmax = std::max({cmax, std::abs(e.f_hz), std::abs(e.f_r_hz),
                     std::abs(e.f_l_hz)});

  RunConfig rg = quiet_run();
  rg.residual_gradient_gauss = 2e-7;
  rg.end_utc = rg.start_utc + 33000.0;
  const RunLog log_g = run_campaign(rg, CTensor{}, frame, 6);
  const FrequencySeries sg = analyze_log(log_g, rg, frame, 0.0);
  double asym = 0.0, favg = 0.0, fr0 = 0.0;
  for (const auto& e : sg.entries) {
    asym = std::max(asym, std::abs(e.f_r_hz + e.f_l_hz));
    favg = std::max(favg, std::abs(e.f_hz));
  }
  if (!sg.entries.empty()) fr0 = sg.entries[0].f_r_hz;

  const double wall = secs(t0);
  const bool ok = sc.entries.size() > 500 && sg.entries.size() > 500 &&
                  cmax <= 1e-15 && asym <= 1e-12 && favg <= 1e-15 &&
                  std::abs(fr0) > 0.1 && wall < 60.0;
  report(4, ok,
         fmt("common-only max|f|=%.2e (%zu entries); gradient-only "
             "f_r=%.4f max|f_r+f_l|=%.2e max|f|=%.2e; wall=%.1fs "
             "(need <=1e-15, <=1e-12, <=1e-15, <60s)",
             cmax, sc.entries.size(), fr0, asym, favg, wall));
}

// 5. Allan deviation of the default campaign: white-phase slope, prefactors
//    1.72 / 3.54 Hz*sqrt(s) +-15% with the calibrated shot count, ratio 2.
void criterion5(const LabFrame& frame) {
  const auto t0 = std::chrono::steady_clock::now();
  double pref[2] = {0.0, 0.0}, expo[2] = {0.0, 0.0};
  std::size_t entries[2] = {0, 0};
  for (int mixed = 0; mixed < 2; ++mixed) {
    RunConfig rc;
    rc.scheme = mixed ? Scheme::mixed : Scheme::entangled;
    const RunLog log =
        run_campaign(rc, CTensor{}, frame, 20180219ull + mixed);
    const FrequencySeries s = analyze_log(log, rc, frame, 1.2);
    const AllanCurve ac = allan_deviation(s);
    // Anchor the prefactor on the shortest-tau point; the fitted exponent
    // checks the slope separately.
    const AllanPoint& p0 = *std::min_element(
        ac.points.begin(), ac.points.end(),
        [](const AllanPoint& a, const AllanPoint& b) {
          return a.tau_s < b.tau_s;
        });
    pref[mixed] = p0.sigma_hz * std::sqrt(p0.tau_s);
    expo[mixed] = ac.exponent;
    entries[mixed] = s.entries.size();
  }
  const double ratio = pref[1] / pref[0];
  const double wall = secs(t0);
  const bool ok = std::abs(pref[0] - 1.72) <= 0.15 * 1.72 &&
                  std::abs(pref[1] - 3.54) <= 0.15 * 3.54 &&
                  ratio >= 1.8 && ratio <= 2.2 &&
                  std::abs(expo[0] + 0.5) <= 0.05 &&
                  std::abs(expo[1] + 0.5) <= 0.05;
  report(5, ok,
         fmt("prefactor ent=%.3f mixed=%.3f Hz*sqrt(s) ratio=%.3f "
             "exponents %.3f/%.3f (%zu/%zu entries, %.0fs) (need 1.72/3.54 "
             "+-15%%, ratio 2.0+-0.2, slope -0.5+-0.05)",
             pref[0], pref[1], ratio, expo[0], expo[1], entries[0],
             entries[1], wall));
}

// 6. Noiseless end-to-end tensor recovery and the band limit of the signal
//    model: power only at DC and the first two sidereal harmonics.
void criterion6(const LabFrame& frame) {
  const RunConfig rc = quiet_run();
  const double s0 = 3e-22;
  CTensor c;
  c.c_x_minus_y = 0.6 * s0;
  c.c_xy = -0.4 * s0;
  c.c_xz = 1.0 * s0;
  c.c_yz = 0.2 * s0;
  c.c_zz_combo = 0.8 * s0;
  const RunLog log = run_campaign(rc, c, frame, 11);
  FrequencySeries s = analyze_log(log, rc, frame, 0.0);
  const FrequencySeries b = bin_series(s, 3600.0);
  const FitResult fit = fit_sidereal(b, frame);
  const CmnBounds bd = invert_to_cmn(fit, design_matrix(frame));
  const double in[4] = {c.c_x_minus_y, c.c_xy, c.c_xz, c.c_yz};
  const double out[4] = {bd.c_x_minus_y.value, bd.c_xy.value, bd.c_xz.value,
                         bd.c_yz.value};
  double rel = 0.0;
  for (int i = 0; i < 4; ++i)
    rel = std::max(rel, std::abs(out[i] - in[i]) / std::abs(in[i]));

  // Direct DFT of the signal model over exactly two sidereal periods. All
  // power must sit in bins {0, 2, 4} (DC, omega, 2 omega).
  CTensor cg;
  cg.c_x_minus_y = 0.3;
  cg.c_xy = -0.7;
  cg.c_xz = 0.5;
  cg.c_yz = -0.2;
  cg.c_zz_combo = 0.4;
  const int n = 1024;
  const double span = 2.0 * constants::sidereal_day_s;
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i)
    f[static_cast<size_t>(i)] = pair_frequency_hz(
        cg, frame.equinox_epoch_utc + span * i / n, frame);
  double peak = 0.0, leak = 0.0;
  for (int k = 0; k < n; ++k) {
    std::complex<double> x(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      const double ang = -constants::two_pi * k * i / n;
      x += f[static_cast<size_t>(i)] *
           std::complex<double>(std::cos(ang), std::sin(ang));
    }
    const double mag = std::abs(x);
    const bool signal_bin =
        k == 0 || k == 2 || k == 4 || k == n - 2 || k == n - 4;
    if (signal_bin)
      peak = std::max(peak, mag);
    else
      leak = std::max(leak, mag);
  }
  const double band = leak / peak;
  const bool ok = rel <= 1e-10 && band < 1e-10;
  report(6, ok,
         fmt("injected-tensor recovery rel=%.2e, spectral leakage=%.2e "
             "(need both <=1e-10; %zu entries, %d bins)",
             rel, band, s.entries.size(), fit.n_bins));
}

// 7. Realistic-noise campaign at the tuned shot count: total uncertainty
//    3.4 mHz, bounds within 2x of (9.2, 4.8, 2.1, 2.2)e-19, and an injected
//    C_XZ = 1e-18 recovered within 2 sigma.
void criterion7(const LabFrame& frame) {
  const double table[4] = {9.2e-19, 4.8e-19, 2.1e-19, 2.2e-19};
  bool ok = true;
  std::string detail;
  for (int inj = 0; inj < 2; ++inj) {
    RunConfig rc;
    rc.block.shots_per_point = 23;
    CTensor c;
    if (inj) c.c_xz = 1e-18;
    const RunLog log = run_campaign(rc, c, frame, 777ull + inj);
    FrequencySeries s = analyze_log(log, rc, frame, 1.2);
    double wsum = 0.0;
    for (const auto& e : s.entries) wsum += 1.0 / (e.sigma_hz * e.sigma_hz);
    const double sigma_tot_mhz = 1e3 / std::sqrt(wsum);
    const FrequencySeries b = bin_series(s, 3600.0);
    const FitResult fit = fit_sidereal(b, frame);
    const CmnBounds bd = invert_to_cmn(fit, design_matrix(frame));
    const double sig[4] = {bd.c_x_minus_y.sigma, bd.c_xy.sigma,
                           bd.c_xz.sigma, bd.c_yz.sigma};
    if (inj == 0) {
      ok = ok && std::abs(sigma_tot_mhz - 3.4) <= 0.4;
      for (int i = 0; i < 4; ++i)
        ok = ok && sig[i] >= 0.5 * table[i] && sig[i] <= 2.0 * table[i];
      detail += fmt("sigma_tot=%.2fmHz bounds=(%.1f %.1f %.1f %.1f)e-19 vs "
                    "(9.2 4.8 2.1 2.2)e-19 within 2x; ",
                    sigma_tot_mhz, sig[0] * 1e19, sig[1] * 1e19,
                    sig[2] * 1e19, sig[3] * 1e19);
    } else {
      const double pull = (bd.c_xz.value - 1e-18) / bd.c_xz.sigma;
      ok = ok && std::abs(pull) <= 2.0;
      detail += fmt("injected C_XZ pull=%.2f sigma (need <=2)", pull);
    }
  }
  report(7, ok, detail);
}

// 8. The two-ion sensitivity prefactor: 12 * 7.42e14 = 8.904e15 Hz, inside
//    the quoted 8.9(2)e15, and used consistently by the signal model.
void criterion8(const LabFrame& frame) {
  const double pref = 12.0 * 7.42e14;
  const double code = -constants::pair_frequency_hz_per_c0;
  const double lvl =
      2.0 * (level_shift_hz(5, 1.0) - level_shift_hz(1, 1.0));

  CTensor c;
  c.c_x_minus_y = 0.3;
  c.c_xy = 0.7;
  c.c_xz = -0.4;
  c.c_yz = 0.1;
  c.c_zz_combo = -0.6;
  const double utc = frame.equinox_epoch_utc + 1.23e7;
  const double via_c0 = -pref * c0_lab(c, utc, frame);
  const double direct = pair_frequency_hz(c, utc, frame);

  const bool ok = pref >= 8.7e15 && pref <= 9.1e15 && code == pref &&
                  std::abs(lvl + pref) <= 1e-3 * pref &&
                  std::abs(direct - via_c0) <= 1e-12 * std::abs(direct);
  report(8, ok,
         fmt("12*7.42e14=%.4e Hz (need within 8.9(2)e15); level-shift "
             "difference=%.4e; model consistency=%.1e",
             pref, lvl, std::abs(direct - via_c0) / std::abs(direct)));
}

// 9a. c0_lab against a from-scratch rotation of the lab triad.
double rotation_worst_case(int cases) {
  Rng rng(99);
  double worst = 0.0;
  for (int it = 0; it < cases; ++it) {
    LabFrame fr;
    fr.colatitude_rad = rng.uniform(0.05, constants::pi - 0.05);
    fr.b_azimuth_rad = rng.uniform(0.0, constants::two_pi);
    fr.b_elevation_rad = rng.uniform(-0.5 * constants::pi,
                                     0.5 * constants::pi);
    fr.equinox_epoch_utc = 1490005680.0;
    CTensor c;
    c.c_x_minus_y = rng.uniform(-1.0, 1.0);
    c.c_xy = rng.uniform(-1.0, 1.0);
    c.c_xz = rng.uniform(-1.0, 1.0);
    c.c_yz = rng.uniform(-1.0, 1.0);
    c.c_zz_combo = rng.uniform(-1.0, 1.0);
    const double utc = fr.equinox_epoch_utc + rng.uniform(0.0, 4e7);

    // Plain-array reconstruction of the tensor and the rotated triad.
    const double czz = -c.c_zz_combo / 3.0;
    const double cxx = 0.5 * (c.c_zz_combo / 3.0 + c.c_x_minus_y);
    const double cyy = 0.5 * (c.c_zz_combo / 3.0 - c.c_x_minus_y);
    const double m[3][3] = {{cxx, c.c_xy, c.c_xz},
                            {c.c_xy, cyy, c.c_yz},
                            {c.c_xz, c.c_yz, czz}};
    const double al =
        constants::omega_sidereal_rad * (utc - fr.equinox_epoch_utc);
    const double rz[3][3] = {{std::cos(al), -std::sin(al), 0.0},
                             {std::sin(al), std::cos(al), 0.0},
                             {0.0, 0.0, 1.0}};
    const double chi = fr.colatitude_rad;
    const double e0[3] = {0.0, 1.0, 0.0};
    const double n0[3] = {-std::cos(chi), 0.0, std::sin(chi)};
    const double u0[3] = {std::sin(chi), 0.0, std::cos(chi)};
    double e[3], nn[3], u[3], b[3];
    for (int i = 0; i < 3; ++i) {
      e[i] = nn[i] = u[i] = 0.0;
      for (int j = 0; j < 3; ++j) {
        e[i] += rz[i][j] * e0[j];
        nn[i] += rz[i][j] * n0[j];
        u[i] += rz[i][j] * u0[j];
      }
    }
    const double ca = std::cos(fr.b_azimuth_rad);
    const double sa = std::sin(fr.b_azimuth_rad);
    const double ce = std::cos(fr.b_elevation_rad);
    const double se = std::sin(fr.b_elevation_rad);
    for (int i = 0; i < 3; ++i)
      b[i] = ce * (ca * e[i] + sa * nn[i]) + se * u[i];
    double quad = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) quad += b[i] * m[i][j] * b[j];
    worst = std::max(worst, std::abs(-3.0 * quad - c0_lab(c, utc, fr)));
  }
  return worst;
}

// 9b. Allan implementation against the definition written as plain loops.
double allan_worst_rel() {
  Rng rng(5);
  FrequencySeries s;
  const int n = 4096;
  for (int i = 0; i < n; ++i) {
    FreqEntry e;
    e.utc = 1519020000.0 + 10.0 * i;
    e.f_hz = rng.normal() + 1e-4 * i;
    e.sigma_hz = 1.0;
    s.entries.push_back(e);
  }
  double worst = 0.0;
  for (int ov = 0; ov < 2; ++ov) {
    AllanOptions opts;
    opts.overlapping = ov == 1;
    const AllanCurve ac = allan_deviation(s, opts);
    std::vector<double> y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      y[static_cast<size_t>(i)] = s.entries[static_cast<size_t>(i)].f_hz;
    auto mean = [&](long a, long m) {
      double acc = 0.0;
      for (long i = a; i < a + m; ++i) acc += y[static_cast<size_t>(i)];
      return acc / static_cast<double>(m);
    };
    size_t pi_ = 0;
    for (long m = 1; n / m >= 4; m *= 2, ++pi_) {
      double acc = 0.0;
      long cnt = 0;
      if (opts.overlapping) {
        for (long i = 0; i + 2 * m <= n; ++i) {
          const double d = mean(i + m, m) - mean(i, m);
          acc += d * d;
          ++cnt;
        }
      } else {
        for (long g = 0; g + 1 < n / m; ++g) {
          const double d = mean((g + 1) * m, m) - mean(g * m, m);
          acc += d * d;
          ++cnt;
        }
      }
      const double sig = std::sqrt(acc / (2.0 * static_cast<double>(cnt)));
      const AllanPoint& p = ac.points.at(pi_);
      worst = std::max({worst, std::abs(p.sigma_hz - sig) / sig,
                        std::abs(p.tau_s - 10.0 * static_cast<double>(m)),
                        p.groups == cnt ? 0.0 : 1.0});
    }
  }
  return worst;
}

// 9c. Sampled-parity phase estimator against forward-model Monte Carlo.
double estimator_worst_bias(double contrast) {
  const double a = contrast * std::exp(-2.0 * 0.005 / 1.2);
  const long shots = 28;
  const int trials = 400000;
  Rng rng(7);
  double worst = 0.0;
  for (const double dphi : {0.1, 0.3, 0.5}) {
    const double p0t = a * std::sin(dphi);
    const double p90t = -a * std::sin(dphi);
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const double p0 =
          static_cast<double>(2 * rng.binomial(shots, 0.5 * (1.0 + p0t)) -
                              shots) /
          static_cast<double>(shots);
      const double p90 =
          static_cast<double>(2 * rng.binomial(shots, 0.5 * (1.0 + p90t)) -
                              shots) /
          static_cast<double>(shots);
      sum += extract_phase_sampled(p0, p90, a, shots);
    }
    worst = std::max(worst, std::abs(sum / trials - dphi) / dphi);
  }
  return worst;
}

void criterion9() {
  const double rot = rotation_worst_case(1000);
  const double allan = allan_worst_rel();
  RunConfig rc;
  const double bias =
      estimator_worst_bias(prepare_lli_state(StateVariant::R, rc).contrast);
  const bool ok = rot <= 1e-14 && allan <= 1e-12 && bias < 0.01;
  report(9, ok,
         fmt("rotation worst=%.2e (1000 cases, need <=1e-14); allan vs "
             "definition=%.2e (need <=1e-12); estimator bias=%.3f%% "
             "(need <1%%)",
             rot, allan, bias * 100.0));
}

}  // namespace

int main() {
  LabFrame frame;
  resolve_equinox_epoch(frame, 1519020000.0);

  criterion1();
  criterion2();
  criterion3();
  criterion4(frame);
  criterion5(frame);
  criterion6(frame);
  criterion7(frame);
  criterion8(frame);
  criterion9();

  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures;
}
