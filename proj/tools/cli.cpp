// lli: simulate and analyze the two-ion Lorentz-symmetry test.
//
//   lli gate-dynamics   calibrated entangling-gate populations -> CSV
//   lli simulate        full campaign -> run log CSVs + manifest.json
//   lli analyze         run log -> series, Allan curve, sidereal fit, bounds
//   lli reproduce       canned comparisons: paper-gate, paper-allan,
//                       paper-table (exit 2 when outside the quoted bands)

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "lli/analysis.hpp"
#include "lli/config.hpp"
#include "lli/constants.hpp"
#include "lli/csv.hpp"
#include "lli/experiment.hpp"
#include "lli/frame.hpp"
#include "lli/lli_physics.hpp"
#include "lli/ms_gate.hpp"
#include "lli/runlog.hpp"
#include "lli/timeutil.hpp"

using namespace lli;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string scheme;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

PipelineConfig resolve_config(const CommonFlags& fl) {
  PipelineConfig cfg =
      fl.config_path.empty() ? PipelineConfig{} : load_config(fl.config_path);
  apply_env_overrides(cfg);
  // command-line flags outrank both the file and the environment
  if (fl.seed_set) cfg.master_seed = fl.seed;
  if (!fl.out_dir.empty()) cfg.out_dir = fl.out_dir;
  if (!fl.scheme.empty()) {
    if (fl.scheme == "entangled")
      cfg.run.scheme = Scheme::entangled;
    else if (fl.scheme == "mixed")
      cfg.run.scheme = Scheme::mixed;
    else
      throw CLI::ValidationError("--scheme must be entangled or mixed");
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& fl, bool with_scheme = true) {
  cmd->add_option("-c,--config", fl.config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", fl.out_dir, "output directory");
  cmd->add_option("-s,--seed", fl.seed, "master seed")
      ->each([&fl](const std::string&) { fl.seed_set = true; });
  if (with_scheme)
    cmd->add_option("--scheme", fl.scheme,
                    "preparation scheme: entangled or mixed");
}

int run_gate_dynamics(const CommonFlags& fl) {
  PipelineConfig cfg = resolve_config(fl);
  GateConfig g = cfg.run.gate;
  calibrate_rabi(g);
  if (g.tones[0].stark_shift_hz != 0.0 || g.tones[1].stark_shift_hz != 0.0)
    calibrate_stark_offsets(g);

  const int steps =
      static_cast<int>(std::llround(g.gate_time_s / g.step_s));
  const int every = std::max(1, steps / 200);
  const Ket k0 = gate_initial_state(make_gate_basis(g.mode.n_max));
  const Trajectory tr = propagate(k0, g, g.gate_time_s, every);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/gate_dynamics.csv";
  csv::Writer w(path, {"time_us", "p_ss", "p_mixed", "p_dd"});
  for (std::size_t i = 0; i < tr.times_s.size(); ++i)
    w.row({csv::Writer::num(tr.times_s[i] * 1e6),
           csv::Writer::num(tr.populations[i].p_ss),
           csv::Writer::num(tr.populations[i].p_mixed),
           csv::Writer::num(tr.populations[i].p_dd)});
  w.close();

  const GatePopulations fin = gate_populations(tr.final);
  std::printf("rabi %.1f rad/s, %zu samples -> %s\n", g.tones[0].rabi_rad,
              tr.times_s.size(), path.c_str());
  std::printf("at t_g: p_ss=%.4f p_mixed=%.4f p_dd=%.4f\n", fin.p_ss,
              fin.p_mixed, fin.p_dd);
  return 0;
}

void write_manifest(const PipelineConfig& cfg, const RunLog& log) {
  json m;
  m["seed"] = log.seed;
  m["scheme"] = log.scheme;
  m["records"] = log.records.size();
  m["blocks"] = log.blocks;
  m["servo_holds"] = log.servo_holds;
  m["calibration_gaps"] = log.calibrations.size();
  m["window_utc"] = json::array({timeutil::format_utc(cfg.run.start_utc),
                                 timeutil::format_utc(cfg.run.end_utc)});
  m["config"] = json::parse(config_json(cfg));
  std::ofstream f(cfg.out_dir + "/manifest.json");
  f << m.dump(2) << "\n";
}

int run_simulate(const CommonFlags& fl) {
  PipelineConfig cfg = resolve_config(fl);
  LabFrame frame = cfg.frame;
  resolve_equinox_epoch(frame, cfg.run.start_utc);
  const RunLog log = run_campaign(cfg.run, cfg.inject, frame, cfg.master_seed);
  save_runlog(log, cfg.out_dir);
  write_manifest(cfg, log);
  std::printf("%d blocks, %zu records, %d servo holds -> %s\n", log.blocks,
              log.records.size(), log.servo_holds, cfg.out_dir.c_str());
  return 0;
}

struct AnalysisOut {
  FrequencySeries series;
  AllanCurve allan;
  FitResult fit;
  CmnBounds bounds;
  double sigma_tot_mhz = 0.0;
  bool have_allan = false;
};

AnalysisOut analyze_records(const PipelineConfig& cfg, LabFrame& frame,
                            const std::vector<MeasurementRecord>& records,
                            const std::vector<FieldLogEntry>& field_log,
                            const std::vector<OmegaLogEntry>& omega_log) {
  if (records.empty()) throw std::runtime_error("no measurement records");
  resolve_equinox_epoch(frame, records.front().utc);

  ExtractOptions opts = cfg.extract;
  opts.epoch_utc = frame.equinox_epoch_utc;
  AnalysisOut out;
  out.series = extract_block_frequencies(records, opts);
  if (!field_log.empty() || !omega_log.empty())
    correct_systematics(out.series, field_log, omega_log, cfg.run.zeeman,
                        cfg.run.quadrupole);

  double wsum = 0.0;
  for (const auto& e : out.series.entries)
    if (e.sigma_hz > 0.0) wsum += 1.0 / (e.sigma_hz * e.sigma_hz);
  if (wsum > 0.0) out.sigma_tot_mhz = 1e3 / std::sqrt(wsum);

  if (out.series.entries.size() >= 16) {
    AllanOptions ao;
    ao.overlapping = cfg.allan_overlapping;
    out.allan = allan_deviation(out.series, ao);
    out.have_allan = true;
  }

  const FrequencySeries binned = bin_series(out.series, cfg.bin_width_s);
  out.fit = fit_sidereal(binned, frame);
  out.bounds = invert_to_cmn(out.fit, design_matrix(frame));
  return out;
}

void write_fit_report(const AnalysisOut& a, const LabFrame& frame,
                      const std::string& path) {
  json r;
  r["entries"] = a.series.entries.size();
  r["skipped_blocks"] = a.series.skipped.size();
  r["sigma_total_mhz"] = a.sigma_tot_mhz;
  r["equinox_epoch_utc"] = frame.equinox_epoch_utc;
  r["fit"] = {{"dc_hz", a.fit.dc},          {"a_sin_hz", a.fit.a},
              {"b_cos_hz", a.fit.b},        {"c_sin2_hz", a.fit.c},
              {"d_cos2_hz", a.fit.d},       {"chi2_red", a.fit.chi2_red},
              {"scaled", a.fit.scaled},     {"n_bins", a.fit.n_bins}};
  if (a.have_allan)
    r["allan"] = {{"prefactor_hz_rt_s", a.allan.prefactor_hz_rt_s},
                  {"exponent", a.allan.exponent}};
  auto put = [&](const char* name, const Bound& b) {
    r["bounds"][name] = {{"value", b.value}, {"sigma", b.sigma}};
  };
  put("c_x_minus_y", a.bounds.c_x_minus_y);
  put("c_xy", a.bounds.c_xy);
  put("c_xz", a.bounds.c_xz);
  put("c_yz", a.bounds.c_yz);
  std::ofstream f(path);
  f << r.dump(2) << "\n";
}

void print_bounds_table(const AnalysisOut& a) {
  std::printf("%-12s %14s %14s\n", "component", "value", "1 sigma");
  auto line = [](const char* n, const Bound& b) {
    std::printf("%-12s %14.3e %14.3e\n", n, b.value, b.sigma);
  };
  line("C_X-Y", a.bounds.c_x_minus_y);
  line("C_XY", a.bounds.c_xy);
  line("C_XZ", a.bounds.c_xz);
  line("C_YZ", a.bounds.c_yz);
  std::printf("chi2_red=%.3f over %d bins, sigma_tot=%.3f mHz\n",
              a.fit.chi2_red, a.fit.n_bins, a.sigma_tot_mhz);
}

int run_analyze(const CommonFlags& fl, const std::string& in_dir) {
  PipelineConfig cfg = resolve_config(fl);
  const std::string in = in_dir.empty() ? cfg.out_dir : in_dir;

  const auto records = load_records_csv(in + "/records.csv");
  std::vector<FieldLogEntry> field_log;
  std::vector<OmegaLogEntry> omega_log;
  try {
    field_log = load_field_log_csv(in + "/field_log.csv");
    omega_log = load_omega_log_csv(in + "/omega_log.csv");
  } catch (const std::exception& e) {
    std::fprintf(stderr,
                 "warning: %s; systematics stay uncorrected\n", e.what());
    field_log.clear();
    omega_log.clear();
  }

  LabFrame frame = cfg.frame;
  AnalysisOut a = analyze_records(cfg, frame, records, field_log, omega_log);

  std::filesystem::create_directories(cfg.out_dir);
  save_series_csv(a.series, cfg.out_dir + "/series.csv");
  if (a.have_allan) save_allan_csv(a.allan, cfg.out_dir + "/allan.csv");
  write_fit_report(a, frame, cfg.out_dir + "/fit_report.json");

  for (const auto& why : a.series.skipped)
    std::fprintf(stderr, "skipped block: %s\n", why.c_str());
  print_bounds_table(a);
  std::printf("-> %s/{series.csv%s,fit_report.json}\n", cfg.out_dir.c_str(),
              a.have_allan ? ",allan.csv" : "");
  return 0;
}

// ---- reproduce presets ----------------------------------------------------

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

int preset_gate(const CommonFlags& fl) {
  CommonFlags f2 = fl;
  if (f2.out_dir.empty()) f2.out_dir = "out-gate";
  const int rc = run_gate_dynamics(f2);
  if (rc) return rc;

  PipelineConfig cfg = resolve_config(f2);
  GateConfig g = cfg.run.gate;
  calibrate_rabi(g);
  const Ket k0 = gate_initial_state(make_gate_basis(g.mode.n_max));
  const GatePopulations p =
      gate_populations(propagate_final(k0, g, g.gate_time_s));
  const bool ok = within(p.p_ss, 0.49, 0.51) && within(p.p_dd, 0.49, 0.51) &&
                  p.p_mixed <= 0.02;
  std::printf("gate closure %s: p_ss=%.4f p_dd=%.4f p_mixed=%.4f "
              "(expect 0.5/0.5 and <=0.02)\n",
              ok ? "within band" : "OUTSIDE BAND", p.p_ss, p.p_dd, p.p_mixed);
  return ok ? 0 : 2;
}

int preset_allan(const CommonFlags& fl) {
  PipelineConfig base = resolve_config(fl);
  if (fl.out_dir.empty()) base.out_dir = "out-allan";
  LabFrame frame = base.frame;
  resolve_equinox_epoch(frame, base.run.start_utc);

  double pref[2] = {0.0, 0.0};
  for (int mixed = 0; mixed < 2; ++mixed) {
    PipelineConfig cfg = base;
    cfg.run.scheme = mixed ? Scheme::mixed : Scheme::entangled;
    if (!fl.seed_set) cfg.master_seed = 20180219ull + mixed;
    const RunLog log =
        run_campaign(cfg.run, cfg.inject, frame, cfg.master_seed);
    AnalysisOut a = analyze_records(cfg, frame, log.records, log.field_log,
                                    log.omega_log);
    if (!a.have_allan) return 2;
    const AllanPoint& p0 = *std::min_element(
        a.allan.points.begin(), a.allan.points.end(),
        [](const AllanPoint& x, const AllanPoint& y) {
          return x.tau_s < y.tau_s;
        });
    pref[mixed] = p0.sigma_hz * std::sqrt(p0.tau_s);
    std::filesystem::create_directories(base.out_dir);
    save_allan_csv(a.allan,
                   base.out_dir + (mixed ? "/allan_mixed.csv"
                                         : "/allan_entangled.csv"));
    std::printf("%s: prefactor %.3f Hz*sqrt(s), exponent %.3f\n",
                mixed ? "mixed" : "entangled", pref[mixed], a.allan.exponent);
  }
  const double ratio = pref[1] / pref[0];
  const bool ok = within(pref[0], 1.72 * 0.85, 1.72 * 1.15) &&
                  within(pref[1], 3.54 * 0.85, 3.54 * 1.15) &&
                  within(ratio, 1.8, 2.2);
  std::printf("ratio %.3f; reference 1.72 / 3.54 Hz*sqrt(s), ratio 2.0 "
              "(%s)\n",
              ratio, ok ? "within 15%" : "OUTSIDE BAND");
  return ok ? 0 : 2;
}

int preset_table(const CommonFlags& fl) {
  PipelineConfig cfg = resolve_config(fl);
  if (fl.out_dir.empty()) cfg.out_dir = "out-table";
  if (!fl.seed_set) cfg.master_seed = 777;
  cfg.run.block.shots_per_point = 23;  // tuned to 3.4 mHz total uncertainty
  LabFrame frame = cfg.frame;
  resolve_equinox_epoch(frame, cfg.run.start_utc);
  const RunLog log = run_campaign(cfg.run, cfg.inject, frame, cfg.master_seed);
  AnalysisOut a =
      analyze_records(cfg, frame, log.records, log.field_log, log.omega_log);

  std::filesystem::create_directories(cfg.out_dir);
  save_series_csv(a.series, cfg.out_dir + "/series.csv");
  write_fit_report(a, frame, cfg.out_dir + "/fit_report.json");
  print_bounds_table(a);

  const double ref[4] = {9.2e-19, 4.8e-19, 2.1e-19, 2.2e-19};
  const double sig[4] = {a.bounds.c_x_minus_y.sigma, a.bounds.c_xy.sigma,
                         a.bounds.c_xz.sigma, a.bounds.c_yz.sigma};
  bool ok = true;
  for (int i = 0; i < 4; ++i)
    ok = ok && within(sig[i], 0.5 * ref[i], 2.0 * ref[i]);
  std::printf("reference 1 sigma: 9.2 4.8 2.1 2.2 (x1e-19); %s\n",
              ok ? "within a factor 2" : "OUTSIDE BAND");
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-ion Lorentz-symmetry test simulator"};
  app.require_subcommand(1);

  CommonFlags fl_gate, fl_sim, fl_ana, fl_rep;
  std::string in_dir, preset;

  CLI::App* gate =
      app.add_subcommand("gate-dynamics", "entangling-gate populations");
  add_common(gate, fl_gate, false);

  CLI::App* sim = app.add_subcommand("simulate", "run one campaign");
  add_common(sim, fl_sim);

  CLI::App* ana = app.add_subcommand("analyze", "run log -> bounds");
  add_common(ana, fl_ana);
  ana->add_option("-i,--in", in_dir, "run log directory (default: out dir)");

  CLI::App* rep =
      app.add_subcommand("reproduce", "compare against the published numbers");
  add_common(rep, fl_rep);
  rep->add_option("preset", preset, "paper-gate | paper-allan | paper-table")
      ->required()
      ->check(CLI::IsMember({"paper-gate", "paper-allan", "paper-table"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (gate->parsed()) return run_gate_dynamics(fl_gate);
    if (sim->parsed()) return run_simulate(fl_sim);
    if (ana->parsed()) return run_analyze(fl_ana, in_dir);
    if (rep->parsed()) {
      if (preset == "paper-gate") return preset_gate(fl_rep);
      if (preset == "paper-allan") return preset_allan(fl_rep);
      return preset_table(fl_rep);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
