#include <doctest.h>

#include <cmath>
#include <complex>

#include "lli/ms_gate.hpp"

using namespace lli;

namespace {

GateConfig small_cfg() {
  GateConfig cfg;
  cfg.mode.n_max = 5;  // keeps the unit tests fast; defaults are checked in
                       // the acceptance run
  return cfg;
}

double overlap2(const Ket& a, const Ket& b) {
  std::complex<double> s = 0.0;
  for (int i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
  return std::norm(s);
}

}  // namespace

TEST_CASE("rabi calibration lands near the loop-closure estimate") {
  GateConfig cfg = small_cfg();
  const double est = analytic_rabi_estimate(cfg);
  const double cal = calibrate_rabi(cfg);
  CHECK(cal / est == doctest::Approx(1.0).epsilon(0.01));
  CHECK(cfg.tones[0].rabi_rad == cal);
  CHECK(cfg.tones[1].rabi_rad == cal);
}

TEST_CASE("gate closes and matches the eigensolver propagator") {
  GateConfig cfg = small_cfg();
  calibrate_rabi(cfg);
  BasisPtr basis = make_gate_basis(cfg.mode.n_max);
  Ket k0 = gate_initial_state(basis);

  Trajectory tr = propagate(k0, cfg, cfg.gate_time_s, 50);
  GatePopulations fin = gate_populations(tr.final);
  CHECK(std::abs(fin.p_ss - 0.5) < 0.015);
  CHECK(std::abs(fin.p_dd - 0.5) < 0.015);
  CHECK(fin.p_mixed < 0.02);
  // norm is preserved by the series exponential
  double norm2 = 0.0;
  for (int i = 0; i < tr.final.amp.size(); ++i)
    norm2 += std::norm(tr.final.amp[i]);
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-10));

  for (double frac : {0.25, 0.5, 1.0}) {
    Ket a = propagate_final(k0, cfg, frac * cfg.gate_time_s);
    Ket b = propagate_expm(k0, cfg, frac * cfg.gate_time_s, cfg.step_s);
    CHECK(overlap2(a, b) >= 1.0 - 1e-9);
  }
}

TEST_CASE("populations stay sane along the trajectory") {
  GateConfig cfg = small_cfg();
  calibrate_rabi(cfg);
  BasisPtr basis = make_gate_basis(cfg.mode.n_max);
  Trajectory tr = propagate(gate_initial_state(basis), cfg, cfg.gate_time_s, 20);
  REQUIRE(!tr.populations.empty());
  for (const auto& p : tr.populations) {
    CHECK(p.p_ss >= -1e-12);
    CHECK(p.p_dd >= -1e-12);
    CHECK(p.p_mixed >= -1e-12);
    CHECK(p.p_ss + p.p_dd + p.p_mixed <= 1.0 + 1e-9);
  }
  // starts in SS
  CHECK(tr.populations.front().p_ss == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("fock cutoff is converged at the default") {
  GateConfig a;  // default n_max = 8
  calibrate_rabi(a);
  GateConfig b = a;
  b.mode.n_max = 11;  // same drive, larger space
  Ket ka = propagate_final(gate_initial_state(make_gate_basis(a.mode.n_max)),
                           a, a.gate_time_s);
  Ket kb = propagate_final(gate_initial_state(make_gate_basis(b.mode.n_max)),
                           b, b.gate_time_s);
  GateFidelity fa = gate_fidelity(ka);
  GateFidelity fb = gate_fidelity(kb);
  CHECK(std::abs(fa.overlap - fb.overlap) < 1e-6);
}

TEST_CASE("stark compensation calibration recovers the light shifts") {
  GateConfig cfg = small_cfg();
  cfg.tones[0].stark_shift_hz = 1e4;
  cfg.tones[1].stark_shift_hz = 1e4;
  calibrate_rabi(cfg);
  calibrate_stark_offsets(cfg);
  // offsets should track the physical shifts well inside the coarse grid
  CHECK(std::abs(cfg.tones[0].stark_offset_hz - 1e4) < 25.0);
  CHECK(std::abs(cfg.tones[1].stark_offset_hz - 1e4) < 25.0);
  Ket k = propagate_final(gate_initial_state(make_gate_basis(cfg.mode.n_max)),
                          cfg, cfg.gate_time_s);
  CHECK(gate_fidelity(k).overlap > 0.999);
}

TEST_CASE("intensity ensemble: serial and parallel agree bitwise") {
  GateConfig cfg = small_cfg();
  calibrate_rabi(cfg);
  EnsembleResult par = bell_fidelity_ensemble(cfg, 8, 0.05, 321);
  EnsembleResult ser = bell_fidelity_ensemble_serial(cfg, 8, 0.05, 321);
  CHECK(par.n_trials == 8);
  CHECK(par.p_ss == ser.p_ss);
  CHECK(par.p_dd == ser.p_dd);
  CHECK(par.coherence == ser.coherence);
  CHECK(par.fidelity == ser.fidelity);
  // zero noise collapses to the deterministic gate
  EnsembleResult quiet = bell_fidelity_ensemble(cfg, 3, 0.0, 1);
  Ket k = propagate_final(gate_initial_state(make_gate_basis(cfg.mode.n_max)),
                          cfg, cfg.gate_time_s);
  CHECK(quiet.fidelity == doctest::Approx(gate_fidelity(k).overlap).epsilon(1e-12));
}

TEST_CASE("config validation catches nonsense") {
  GateConfig cfg;
  cfg.step_s = -1.0;
  CHECK_THROWS(cfg.validate());
  GateConfig cfg2;
  cfg2.mode.n_max = 0;
  CHECK_THROWS(cfg2.validate());
  GateConfig cfg3;
  cfg3.gate_time_s = 0.0;
  CHECK_THROWS(cfg3.validate());
}
