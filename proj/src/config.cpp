#include "lli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lli {

namespace {

using nlohmann::json;

constexpr double kDeg = 0.017453292519943295;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("config: " + (path.empty() ? what : path + ": " + what));
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

std::string sub(const std::string& path, const char* k) {
  return path.empty() ? k : path + "." + k;
}

void set_d(const json& j, const std::string& path, const char* k, double& v) {
  if (!j.contains(k)) return;
  const json& x = j.at(k);
  if (!x.is_number()) fail(sub(path, k), "expected a number");
  v = x.get<double>();
}

void set_i(const json& j, const std::string& path, const char* k, int& v) {
  if (!j.contains(k)) return;
  const json& x = j.at(k);
  if (!x.is_number_integer()) fail(sub(path, k), "expected an integer");
  v = x.get<int>();
}

void set_b(const json& j, const std::string& path, const char* k, bool& v) {
  if (!j.contains(k)) return;
  const json& x = j.at(k);
  if (!x.is_boolean()) fail(sub(path, k), "expected true or false");
  v = x.get<bool>();
}

void set_s(const json& j, const std::string& path, const char* k,
           std::string& v) {
  if (!j.contains(k)) return;
  const json& x = j.at(k);
  if (!x.is_string()) fail(sub(path, k), "expected a string");
  v = x.get<std::string>();
}

PrepMode parse_prep_mode(const std::string& s, const std::string& path) {
  if (s == "effective_channel") return PrepMode::effective_channel;
  if (s == "full_gate") return PrepMode::full_gate;
  fail(path, "expected effective_channel or full_gate, got \"" + s + "\"");
}

Scheme parse_scheme(const std::string& s, const std::string& path) {
  if (s == "entangled") return Scheme::entangled;
  if (s == "mixed") return Scheme::mixed;
  fail(path, "expected entangled or mixed, got \"" + s + "\"");
}

void load_block(const json& j, const std::string& path, BlockConfig& b) {
  check_keys(j, path,
             {"tau_short_s", "tau_long_s", "shots_per_point",
              "block_duration_s", "point_spacing_s"});
  set_d(j, path, "tau_short_s", b.tau_short_s);
  set_d(j, path, "tau_long_s", b.tau_long_s);
  set_i(j, path, "shots_per_point", b.shots_per_point);
  set_d(j, path, "block_duration_s", b.block_duration_s);
  set_d(j, path, "point_spacing_s", b.point_spacing_s);
}

void load_bfield(const json& j, const std::string& path, BFieldProcess& b) {
  check_keys(j, path,
             {"b0_gauss", "sigma_slow_gauss", "correlation_time_s",
              "gradient_gauss", "line_60hz_gauss", "line_freq_hz"});
  set_d(j, path, "b0_gauss", b.b0_gauss);
  set_d(j, path, "sigma_slow_gauss", b.sigma_slow_gauss);
  set_d(j, path, "correlation_time_s", b.correlation_time_s);
  set_d(j, path, "gradient_gauss", b.gradient_gauss);
  set_d(j, path, "line_60hz_gauss", b.line_60hz_gauss);
  set_d(j, path, "line_freq_hz", b.line_freq_hz);
}

void load_zeeman(const json& j, const std::string& path, ZeemanModel& z) {
  check_keys(j, path, {"quad_coeff_hz_per_gauss", "g_s", "g_d"});
  set_d(j, path, "quad_coeff_hz_per_gauss", z.quad_coeff_hz_per_gauss);
  set_d(j, path, "g_s", z.g_s);
  set_d(j, path, "g_d", z.g_d);
}

void load_quadrupole(const json& j, const std::string& path,
                     QuadrupoleModel& q) {
  check_keys(j, path, {"ref_shift_hz", "ref_freq_hz", "slope_hz_per_hz"});
  set_d(j, path, "ref_shift_hz", q.ref_shift_hz);
  set_d(j, path, "ref_freq_hz", q.ref_freq_hz);
  set_d(j, path, "slope_hz_per_hz", q.slope_hz_per_hz);
}

void load_tones(const json& j, const std::string& path, CarrierTones& t) {
  check_keys(j, path,
             {"rabi_rad", "stark_shift_hz", "stark_offset_hz", "phase_red",
              "phase_blue"});
  set_d(j, path, "rabi_rad", t.rabi_rad);
  set_d(j, path, "stark_shift_hz", t.stark_shift_hz);
  set_d(j, path, "stark_offset_hz", t.stark_offset_hz);
  set_d(j, path, "phase_red", t.phase_red);
  set_d(j, path, "phase_blue", t.phase_blue);
}

void load_gate(const json& j, const std::string& path, GateConfig& g) {
  check_keys(j, path, {"delta_ms_hz", "gate_time_s", "step_s", "mode", "tones"});
  set_d(j, path, "delta_ms_hz", g.delta_ms_hz);
  set_d(j, path, "gate_time_s", g.gate_time_s);
  set_d(j, path, "step_s", g.step_s);
  if (j.contains("mode")) {
    const std::string p = sub(path, "mode");
    const json& m = j.at("mode");
    check_keys(m, p, {"frequency_hz", "lamb_dicke", "n_max"});
    set_d(m, p, "frequency_hz", g.mode.frequency_hz);
    set_d(m, p, "lamb_dicke", g.mode.lamb_dicke);
    set_i(m, p, "n_max", g.mode.n_max);
  }
  if (j.contains("tones")) {
    const std::string p = sub(path, "tones");
    const json& arr = j.at("tones");
    if (!arr.is_array() || arr.size() != 2)
      fail(p, "expected an array of 2 carrier objects");
    load_tones(arr[0], p + "[0]", g.tones[0]);
    load_tones(arr[1], p + "[1]", g.tones[1]);
  }
}

void load_run(const json& j, const std::string& path, RunConfig& r) {
  check_keys(j, path,
             {"start_utc", "end_utc", "calibration_interval_s",
              "calibration_gap_s", "prep_mode", "scheme", "prep_fidelity",
              "pi_pulse_fidelity", "block", "bfield", "zeeman", "quadrupole",
              "decay", "decay_enabled", "residual_gradient_gauss",
              "omega_cm_sigma_hz", "omega_cm_tau_s", "prep_drift_rad_rt_s",
              "field_log_interval_s", "gate"});
  set_d(j, path, "start_utc", r.start_utc);
  set_d(j, path, "end_utc", r.end_utc);
  set_d(j, path, "calibration_interval_s", r.calibration_interval_s);
  set_d(j, path, "calibration_gap_s", r.calibration_gap_s);
  if (j.contains("prep_mode")) {
    std::string s;
    set_s(j, path, "prep_mode", s);
    r.prep_mode = parse_prep_mode(s, sub(path, "prep_mode"));
  }
  if (j.contains("scheme")) {
    std::string s;
    set_s(j, path, "scheme", s);
    r.scheme = parse_scheme(s, sub(path, "scheme"));
  }
  set_d(j, path, "prep_fidelity", r.prep_fidelity);
  set_d(j, path, "pi_pulse_fidelity", r.pi_pulse_fidelity);
  if (j.contains("block")) load_block(j.at("block"), sub(path, "block"), r.block);
  if (j.contains("bfield"))
    load_bfield(j.at("bfield"), sub(path, "bfield"), r.bfield);
  if (j.contains("zeeman"))
    load_zeeman(j.at("zeeman"), sub(path, "zeeman"), r.zeeman);
  if (j.contains("quadrupole"))
    load_quadrupole(j.at("quadrupole"), sub(path, "quadrupole"), r.quadrupole);
  if (j.contains("decay")) {
    const std::string p = sub(path, "decay");
    const json& d = j.at("decay");
    check_keys(d, p, {"lifetime_s"});
    set_d(d, p, "lifetime_s", r.decay.lifetime_s);
  }
  set_b(j, path, "decay_enabled", r.decay_enabled);
  set_d(j, path, "residual_gradient_gauss", r.residual_gradient_gauss);
  set_d(j, path, "omega_cm_sigma_hz", r.omega_cm_sigma_hz);
  set_d(j, path, "omega_cm_tau_s", r.omega_cm_tau_s);
  set_d(j, path, "prep_drift_rad_rt_s", r.prep_drift_rad_rt_s);
  set_d(j, path, "field_log_interval_s", r.field_log_interval_s);
  if (j.contains("gate")) load_gate(j.at("gate"), sub(path, "gate"), r.gate);
}

void load_inject(const json& j, const std::string& path, CTensor& c) {
  check_keys(j, path, {"c_x_minus_y", "c_xy", "c_xz", "c_yz", "c_zz_combo"});
  set_d(j, path, "c_x_minus_y", c.c_x_minus_y);
  set_d(j, path, "c_xy", c.c_xy);
  set_d(j, path, "c_xz", c.c_xz);
  set_d(j, path, "c_yz", c.c_yz);
  set_d(j, path, "c_zz_combo", c.c_zz_combo);
}

void load_frame(const json& j, const std::string& path, LabFrame& f) {
  check_keys(j, path,
             {"colatitude_deg", "b_azimuth_deg", "b_elevation_deg",
              "equinox_epoch_utc"});
  double colat = f.colatitude_rad / kDeg;
  double az = f.b_azimuth_rad / kDeg;
  double el = f.b_elevation_rad / kDeg;
  set_d(j, path, "colatitude_deg", colat);
  set_d(j, path, "b_azimuth_deg", az);
  set_d(j, path, "b_elevation_deg", el);
  f.colatitude_rad = colat * kDeg;
  f.b_azimuth_rad = az * kDeg;
  f.b_elevation_rad = el * kDeg;
  if (j.contains("equinox_epoch_utc")) {
    const json& x = j.at("equinox_epoch_utc");
    if (x.is_null()) {
      f.equinox_epoch_utc = std::numeric_limits<double>::quiet_NaN();
    } else if (x.is_number()) {
      f.equinox_epoch_utc = x.get<double>();
    } else {
      fail(sub(path, "equinox_epoch_utc"), "expected a number or null");
    }
  }
}

void load_extract(const json& j, const std::string& path, ExtractOptions& e) {
  check_keys(j, path,
             {"decay_lifetime_s", "ema_alpha", "clamp_slack", "min_amplitude",
              "store_basis"});
  set_d(j, path, "decay_lifetime_s", e.decay_lifetime_s);
  set_d(j, path, "ema_alpha", e.ema_alpha);
  set_d(j, path, "clamp_slack", e.clamp_slack);
  set_d(j, path, "min_amplitude", e.min_amplitude);
  set_b(j, path, "store_basis", e.store_basis);
}

PipelineConfig from_json(const json& j) {
  PipelineConfig cfg;
  check_keys(j, "",
             {"seed", "out_dir", "run", "inject", "frame", "extract",
              "bin_width_s", "allan_overlapping", "gate_mc_trials",
              "gate_intensity_rms"});
  if (j.contains("seed")) {
    const json& x = j.at("seed");
    if (!x.is_number_integer() || x.get<long long>() < 0)
      fail("seed", "expected a nonnegative integer");
    cfg.master_seed = x.get<std::uint64_t>();
  }
  set_s(j, "", "out_dir", cfg.out_dir);
  if (j.contains("run")) load_run(j.at("run"), "run", cfg.run);
  if (j.contains("inject")) load_inject(j.at("inject"), "inject", cfg.inject);
  if (j.contains("frame")) load_frame(j.at("frame"), "frame", cfg.frame);
  if (j.contains("extract"))
    load_extract(j.at("extract"), "extract", cfg.extract);
  set_d(j, "", "bin_width_s", cfg.bin_width_s);
  set_b(j, "", "allan_overlapping", cfg.allan_overlapping);
  set_i(j, "", "gate_mc_trials", cfg.gate_mc_trials);
  set_d(j, "", "gate_intensity_rms", cfg.gate_intensity_rms);
  return cfg;
}

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: JSON parse error: ") +
                             e.what());
  }
  return from_json(j);
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

void apply_env_overrides(PipelineConfig& cfg) {
  if (const char* s = std::getenv("LLI_SEED")) {
    try {
      cfg.master_seed = std::stoull(s);
    } catch (const std::exception&) {
      throw std::runtime_error("LLI_SEED is not a valid integer");
    }
  }
  if (const char* s = std::getenv("LLI_OUT")) cfg.out_dir = s;
  if (const char* s = std::getenv("LLI_SCHEME"))
    cfg.run.scheme = parse_scheme(s, "LLI_SCHEME");
}

std::string config_json(const PipelineConfig& cfg) {
  json j;
  j["seed"] = cfg.master_seed;
  j["out_dir"] = cfg.out_dir;

  json r;
  r["start_utc"] = cfg.run.start_utc;
  r["end_utc"] = cfg.run.end_utc;
  r["calibration_interval_s"] = cfg.run.calibration_interval_s;
  r["calibration_gap_s"] = cfg.run.calibration_gap_s;
  r["prep_mode"] = cfg.run.prep_mode == PrepMode::effective_channel
                       ? "effective_channel"
                       : "full_gate";
  r["scheme"] =
      cfg.run.scheme == Scheme::entangled ? "entangled" : "mixed";
  r["prep_fidelity"] = cfg.run.prep_fidelity;
  r["pi_pulse_fidelity"] = cfg.run.pi_pulse_fidelity;
  r["block"] = {{"tau_short_s", cfg.run.block.tau_short_s},
                {"tau_long_s", cfg.run.block.tau_long_s},
                {"shots_per_point", cfg.run.block.shots_per_point},
                {"block_duration_s", cfg.run.block.block_duration_s},
                {"point_spacing_s", cfg.run.block.point_spacing_s}};
  r["bfield"] = {{"b0_gauss", cfg.run.bfield.b0_gauss},
                 {"sigma_slow_gauss", cfg.run.bfield.sigma_slow_gauss},
                 {"correlation_time_s", cfg.run.bfield.correlation_time_s},
                 {"gradient_gauss", cfg.run.bfield.gradient_gauss},
                 {"line_60hz_gauss", cfg.run.bfield.line_60hz_gauss},
                 {"line_freq_hz", cfg.run.bfield.line_freq_hz}};
  r["zeeman"] = {
      {"quad_coeff_hz_per_gauss", cfg.run.zeeman.quad_coeff_hz_per_gauss},
      {"g_s", cfg.run.zeeman.g_s},
      {"g_d", cfg.run.zeeman.g_d}};
  r["quadrupole"] = {{"ref_shift_hz", cfg.run.quadrupole.ref_shift_hz},
                     {"ref_freq_hz", cfg.run.quadrupole.ref_freq_hz},
                     {"slope_hz_per_hz", cfg.run.quadrupole.slope_hz_per_hz}};
  r["decay"] = {{"lifetime_s", cfg.run.decay.lifetime_s}};
  r["decay_enabled"] = cfg.run.decay_enabled;
  r["residual_gradient_gauss"] = cfg.run.residual_gradient_gauss;
  r["omega_cm_sigma_hz"] = cfg.run.omega_cm_sigma_hz;
  r["omega_cm_tau_s"] = cfg.run.omega_cm_tau_s;
  r["prep_drift_rad_rt_s"] = cfg.run.prep_drift_rad_rt_s;
  r["field_log_interval_s"] = cfg.run.field_log_interval_s;

  json tones = json::array();
  for (const auto& t : cfg.run.gate.tones)
    tones.push_back({{"rabi_rad", t.rabi_rad},
                     {"stark_shift_hz", t.stark_shift_hz},
                     {"stark_offset_hz", t.stark_offset_hz},
                     {"phase_red", t.phase_red},
                     {"phase_blue", t.phase_blue}});
  r["gate"] = {{"delta_ms_hz", cfg.run.gate.delta_ms_hz},
               {"gate_time_s", cfg.run.gate.gate_time_s},
               {"step_s", cfg.run.gate.step_s},
               {"mode",
                {{"frequency_hz", cfg.run.gate.mode.frequency_hz},
                 {"lamb_dicke", cfg.run.gate.mode.lamb_dicke},
                 {"n_max", cfg.run.gate.mode.n_max}}},
               {"tones", tones}};
  j["run"] = r;

  j["inject"] = {{"c_x_minus_y", cfg.inject.c_x_minus_y},
                 {"c_xy", cfg.inject.c_xy},
                 {"c_xz", cfg.inject.c_xz},
                 {"c_yz", cfg.inject.c_yz},
                 {"c_zz_combo", cfg.inject.c_zz_combo}};

  json f;
  f["colatitude_deg"] = cfg.frame.colatitude_rad / kDeg;
  f["b_azimuth_deg"] = cfg.frame.b_azimuth_rad / kDeg;
  f["b_elevation_deg"] = cfg.frame.b_elevation_rad / kDeg;
  if (std::isnan(cfg.frame.equinox_epoch_utc))
    f["equinox_epoch_utc"] = nullptr;
  else
    f["equinox_epoch_utc"] = cfg.frame.equinox_epoch_utc;
  j["frame"] = f;

  j["extract"] = {{"decay_lifetime_s", cfg.extract.decay_lifetime_s},
                  {"ema_alpha", cfg.extract.ema_alpha},
                  {"clamp_slack", cfg.extract.clamp_slack},
                  {"min_amplitude", cfg.extract.min_amplitude},
                  {"store_basis", cfg.extract.store_basis}};

  j["bin_width_s"] = cfg.bin_width_s;
  j["allan_overlapping"] = cfg.allan_overlapping;
  j["gate_mc_trials"] = cfg.gate_mc_trials;
  j["gate_intensity_rms"] = cfg.gate_intensity_rms;
  return j.dump(2) + "\n";
}

}  // namespace lli
