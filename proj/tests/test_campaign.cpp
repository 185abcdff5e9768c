#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "lli/experiment.hpp"
#include "lli/frame.hpp"
#include "lli/runlog.hpp"

using namespace lli;

namespace {

RunConfig quiet_short() {
  RunConfig r;
  r.end_utc = r.start_utc + 2000.0;
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

LabFrame resolved_frame() {
  LabFrame f;
  f.equinox_epoch_utc = 1490005680.0;
  return f;
}

bool same_record(const MeasurementRecord& a, const MeasurementRecord& b) {
  return a.utc == b.utc && a.variant == b.variant && a.tau_s == b.tau_s &&
         a.phase_setting_rad == b.phase_setting_rad && a.parity == b.parity &&
         a.shots == b.shots && a.contrast_flag == b.contrast_flag &&
         a.block == b.block;
}

}  // namespace

TEST_CASE("prepared state carries the configured fidelities") {
  RunConfig cfg;
  PreparedState pr = prepare_lli_state(StateVariant::R, cfg);
  PreparedState pl = prepare_lli_state(StateVariant::L, cfg);
  // 0.94 preparation times eight pi-pulses at 0.99
  const double expect = 0.94 * std::pow(0.99, 8);
  CHECK(pr.contrast == doctest::Approx(expect).epsilon(1e-12));
  CHECK(pl.contrast == doctest::Approx(expect).epsilon(1e-12));
  CHECK(pr.contrast == doctest::Approx(0.867380).epsilon(1e-5));
  CHECK(pr.p_outer + pr.p_inner == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pr.variant == StateVariant::R);
  CHECK(pl.variant == StateVariant::L);
}

TEST_CASE("block layout: ten records, settings and flags in place") {
  RunConfig cfg = quiet_short();
  LabFrame f = resolved_frame();
  RunLog log = run_campaign(cfg, CTensor{}, f, 42);
  REQUIRE(log.blocks >= 2);
  REQUIRE(log.records.size() == static_cast<size_t>(10 * log.blocks));

  // per block: 8 signal records then 2 contrast records
  for (int b = 0; b < log.blocks; ++b) {
    int sig = 0, con = 0;
    for (int j = 0; j < 10; ++j) {
      const MeasurementRecord& r = log.records[static_cast<size_t>(10 * b + j)];
      CHECK(r.block == b);
      if (r.contrast_flag) {
        ++con;
        CHECK(j >= 8);  // contrast pair comes last
      } else {
        ++sig;
      }
      CHECK((r.tau_s == cfg.block.tau_short_s || r.tau_s == cfg.block.tau_long_s));
    }
    CHECK(sig == 8);
    CHECK(con == 2);
  }
  // each variant and wait time shows up equally often among signal records
  int n_r = 0, n_long = 0;
  for (const auto& r : log.records) {
    if (r.contrast_flag) continue;
    if (r.variant == StateVariant::R) ++n_r;
    if (r.tau_s == cfg.block.tau_long_s) ++n_long;
  }
  CHECK(n_r == 4 * log.blocks);
  CHECK(n_long == 4 * log.blocks);

  // timestamps never move backwards
  for (size_t i = 1; i < log.records.size(); ++i)
    CHECK(log.records[i].utc >= log.records[i - 1].utc);
}

TEST_CASE("campaign is reproducible per seed") {
  RunConfig cfg = quiet_short();
  cfg.block.shots_per_point = 28;  // exercise the sampling path too
  cfg.bfield.sigma_slow_gauss = 1e-3;
  cfg.prep_drift_rad_rt_s = 1e-3;
  cfg.decay_enabled = true;
  LabFrame f = resolved_frame();
  RunLog a = run_campaign(cfg, CTensor{}, f, 7);
  RunLog b = run_campaign(cfg, CTensor{}, f, 7);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i)
    CHECK(same_record(a.records[i], b.records[i]));
  REQUIRE(a.field_log.size() == b.field_log.size());
  for (size_t i = 0; i < a.field_log.size(); ++i) {
    CHECK(a.field_log[i].utc == b.field_log[i].utc);
    CHECK(a.field_log[i].delta_b_gauss == b.field_log[i].delta_b_gauss);
  }

  RunLog c = run_campaign(cfg, CTensor{}, f, 8);
  bool any_diff = false;
  for (size_t i = 0; i < std::min(a.records.size(), c.records.size()); ++i)
    any_diff = any_diff || !same_record(a.records[i], c.records[i]);
  CHECK(any_diff);
}

TEST_CASE("log cadences and calibration gaps") {
  RunConfig cfg = quiet_short();
  cfg.end_utc = cfg.start_utc + 4000.0;
  LabFrame f = resolved_frame();
  RunLog log = run_campaign(cfg, CTensor{}, f, 3);

  REQUIRE(log.field_log.size() >= 2);
  CHECK(log.field_log.front().utc == cfg.start_utc);
  for (size_t i = 1; i < log.field_log.size(); ++i)
    CHECK(log.field_log[i].utc - log.field_log[i - 1].utc ==
          doctest::Approx(cfg.field_log_interval_s));
  CHECK(log.omega_log.size() == log.field_log.size());

  // 600 s of measurement then a 60 s hole in the record timeline
  REQUIRE(!log.calibrations.empty());
  CHECK(log.calibrations.front().duration_s == cfg.calibration_gap_s);
  const double cal_utc = log.calibrations.front().utc;
  for (const auto& r : log.records) {
    bool inside = r.utc >= cal_utc && r.utc < cal_utc + 60.0;
    CHECK(!inside);
  }
}

TEST_CASE("servo recenters a step within three blocks, walks off unservoed") {
  RunConfig cfg = quiet_short();
  cfg.end_utc = cfg.start_utc + 600.0;
  LabFrame f = resolved_frame();

  const PreparedState pr = prepare_lli_state(StateVariant::R, cfg);
  const PreparedState pl = prepare_lli_state(StateVariant::L, cfg);
  double step = 0.0;  // captured by the env closure
  EnvFn env = [&](StateVariant, double, double) {
    EnvInputs e;
    e.extra_phase_rad = step;
    return e;
  };
  Rng rng(1);

  // start each lock at its fringe crossing, the way the campaign driver
  // seeds them; from exactly zero the contrast estimate vanishes and the
  // servo would hold forever
  LockState locks;
  for (int ti = 0; ti < 2; ++ti) {
    locks.at(StateVariant::R, ti) = 0.5 * (0.5 * M_PI - pr.prep_phase_rad);
    locks.at(StateVariant::L, ti) = 0.5 * (0.5 * M_PI - pl.prep_phase_rad);
  }
  for (int b = 0; b < 4; ++b) {
    auto recs = run_block(cfg, b, cfg.start_utc + 40.0 * b, locks, pr, pl,
                          env, rng);
    locks = servo_phase_offset(recs, locks).locks;
  }
  auto first_signal_parity = [&](const std::vector<MeasurementRecord>& recs) {
    for (const auto& r : recs)
      if (!r.contrast_flag) return std::abs(r.parity);
    return 0.0;
  };
  auto settled = run_block(cfg, 4, cfg.start_utc + 160.0, locks, pr, pl, env,
                           rng);
  CHECK(first_signal_parity(settled) < 0.05);  // steady state on the crossing

  // apply a 0.3 rad step: the next block sees it, three servoed blocks
  // later it is gone
  step = 0.3;
  auto hit = run_block(cfg, 5, cfg.start_utc + 200.0, locks, pr, pl, env, rng);
  CHECK(first_signal_parity(hit) > 0.2);
  LockState servoed = servo_phase_offset(hit, locks).locks;
  double residual = 1.0;
  for (int b = 0; b < 3; ++b) {
    auto recs = run_block(cfg, 6 + b, cfg.start_utc + 240.0 + 40.0 * b,
                          servoed, pr, pl, env, rng);
    residual = first_signal_parity(recs);
    servoed = servo_phase_offset(recs, servoed).locks;
  }
  CHECK(residual < 0.05);

  // negative control: frozen locks keep reading the displaced fringe
  auto off = run_block(cfg, 9, cfg.start_utc + 360.0, locks, pr, pl, env, rng);
  CHECK(first_signal_parity(off) > 0.2);
}

TEST_CASE("run log CSV round trip") {
  namespace fs = std::filesystem;
  RunConfig cfg = quiet_short();
  cfg.block.shots_per_point = 17;
  cfg.bfield.sigma_slow_gauss = 1e-3;
  cfg.decay_enabled = true;
  LabFrame f = resolved_frame();
  RunLog log = run_campaign(cfg, CTensor{}, f, 99);

  const std::string dir = (fs::temp_directory_path() / "lli_runlog_rt").string();
  save_runlog(log, dir);
  auto records = load_records_csv(dir + "/records.csv");
  REQUIRE(records.size() == log.records.size());
  for (size_t i = 0; i < records.size(); ++i)
    CHECK(same_record(records[i], log.records[i]));

  auto field = load_field_log_csv(dir + "/field_log.csv");
  REQUIRE(field.size() == log.field_log.size());
  for (size_t i = 0; i < field.size(); ++i) {
    CHECK(field[i].utc == log.field_log[i].utc);
    CHECK(field[i].delta_b_gauss == log.field_log[i].delta_b_gauss);
  }
  auto omega = load_omega_log_csv(dir + "/omega_log.csv");
  REQUIRE(omega.size() == log.omega_log.size());
  for (size_t i = 0; i < omega.size(); ++i)
    CHECK(omega[i].omega_cm_hz == log.omega_log[i].omega_cm_hz);
  fs::remove_all(dir);
}

TEST_CASE("config validation rejects inconsistent schedules") {
  RunConfig cfg;
  cfg.block.point_spacing_s = 0.05;  // shorter than the long wait
  CHECK_THROWS(cfg.validate());
  RunConfig cfg2;
  cfg2.calibration_interval_s = 10.0;  // shorter than a block
  CHECK_THROWS(cfg2.validate());
  RunConfig cfg3;
  cfg3.block.block_duration_s = 20.0;  // ten points no longer fit
  CHECK_THROWS(cfg3.validate());
}
