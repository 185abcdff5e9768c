#include "lli/runlog.hpp"

#include <filesystem>
#include <stdexcept>

#include "lli/csv.hpp"

namespace lli {

namespace {

double cell_d(const csv::Table& t, std::size_t row, int col) {
  return std::stod(t.rows[row][static_cast<std::size_t>(col)]);
}

long cell_l(const csv::Table& t, std::size_t row, int col) {
  return std::stol(t.rows[row][static_cast<std::size_t>(col)]);
}

int need(const csv::Table& t, const std::string& name) {
  const int c = t.col(name);
  if (c < 0) throw std::runtime_error("missing CSV column: " + name);
  return c;
}

}  // namespace

void save_records_csv(const std::vector<MeasurementRecord>& records,
                      const std::string& path) {
  csv::Writer w(path, {"utc_s", "variant", "tau_s", "phase_setting_rad",
                       "parity", "shots", "contrast_flag", "block"});
  for (const auto& r : records)
    w.row({csv::Writer::num(r.utc),
           r.variant == StateVariant::R ? "R" : "L",
           csv::Writer::num(r.tau_s),
           csv::Writer::num(r.phase_setting_rad),
           csv::Writer::num(r.parity),
           csv::Writer::num(static_cast<long>(r.shots)),
           r.contrast_flag ? "1" : "0",
           csv::Writer::num(static_cast<long>(r.block))});
}

std::vector<MeasurementRecord> load_records_csv(const std::string& path) {
  const csv::Table t = csv::read(path);
  const int c_utc = need(t, "utc_s"), c_var = need(t, "variant"),
            c_tau = need(t, "tau_s"), c_ph = need(t, "phase_setting_rad"),
            c_par = need(t, "parity"), c_sh = need(t, "shots"),
            c_fl = need(t, "contrast_flag"), c_bl = need(t, "block");
  std::vector<MeasurementRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    MeasurementRecord r;
    r.utc = cell_d(t, i, c_utc);
    const std::string& v = t.rows[i][static_cast<std::size_t>(c_var)];
    if (v == "R") {
      r.variant = StateVariant::R;
    } else if (v == "L") {
      r.variant = StateVariant::L;
    } else {
      throw std::runtime_error("unknown variant label: " + v);
    }
    r.tau_s = cell_d(t, i, c_tau);
    r.phase_setting_rad = cell_d(t, i, c_ph);
    r.parity = cell_d(t, i, c_par);
    r.shots = static_cast<int>(cell_l(t, i, c_sh));
    r.contrast_flag = cell_l(t, i, c_fl) != 0;
    r.block = static_cast<std::int32_t>(cell_l(t, i, c_bl));
    out.push_back(r);
  }
  return out;
}

void save_field_log_csv(const std::vector<FieldLogEntry>& log,
                        const std::string& path) {
  csv::Writer w(path, {"utc_seconds", "delta_b_gauss"});
  for (const auto& e : log)
    w.row({csv::Writer::num(e.utc), csv::Writer::num(e.delta_b_gauss)});
}

std::vector<FieldLogEntry> load_field_log_csv(const std::string& path) {
  const csv::Table t = csv::read(path);
  const int c_utc = need(t, "utc_seconds"), c_db = need(t, "delta_b_gauss");
  std::vector<FieldLogEntry> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    out.push_back({cell_d(t, i, c_utc), cell_d(t, i, c_db)});
  return out;
}

void save_omega_log_csv(const std::vector<OmegaLogEntry>& log,
                        const std::string& path) {
  csv::Writer w(path, {"utc_seconds", "omega_cm_hz"});
  for (const auto& e : log)
    w.row({csv::Writer::num(e.utc), csv::Writer::num(e.omega_cm_hz)});
}

std::vector<OmegaLogEntry> load_omega_log_csv(const std::string& path) {
  const csv::Table t = csv::read(path);
  const int c_utc = need(t, "utc_seconds"), c_om = need(t, "omega_cm_hz");
  std::vector<OmegaLogEntry> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    out.push_back({cell_d(t, i, c_utc), cell_d(t, i, c_om)});
  return out;
}

void save_runlog(const RunLog& log, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_records_csv(log.records, dir + "/records.csv");
  save_field_log_csv(log.field_log, dir + "/field_log.csv");
  save_omega_log_csv(log.omega_log, dir + "/omega_log.csv");
}

void save_series_csv(const FrequencySeries& series, const std::string& path) {
  csv::Writer w(path,
                {"utc_s", "f_hz", "sigma_f_hz", "f_r_hz", "f_l_hz",
                 "corrected_zeeman", "corrected_quadrupole",
                 "uncorrected_gap", "exact_parity", "block"});
  for (const auto& e : series.entries)
    w.row({csv::Writer::num(e.utc), csv::Writer::num(e.f_hz),
           csv::Writer::num(e.sigma_hz), csv::Writer::num(e.f_r_hz),
           csv::Writer::num(e.f_l_hz), e.corrected_zeeman ? "1" : "0",
           e.corrected_quadrupole ? "1" : "0", e.uncorrected_gap ? "1" : "0",
           e.exact_parity ? "1" : "0",
           csv::Writer::num(static_cast<long>(e.block))});
}

void save_allan_csv(const AllanCurve& curve, const std::string& path) {
  csv::Writer w(path, {"tau_s", "sigma_hz", "groups"});
  for (const auto& p : curve.points)
    w.row({csv::Writer::num(p.tau_s), csv::Writer::num(p.sigma_hz),
           csv::Writer::num(static_cast<long>(p.groups))});
}

}  // namespace lli
