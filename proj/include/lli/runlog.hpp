#pragma once

#include <string>
#include <vector>

#include "lli/analysis.hpp"
#include "lli/experiment.hpp"

// Fixed-schema CSV persistence for campaign outputs and analysis products.
// Columns are documented in the README; all files carry a header row and
// numbers are written so they parse back bit-exact.

namespace lli {

void save_records_csv(const std::vector<MeasurementRecord>& records,
                      const std::string& path);
std::vector<MeasurementRecord> load_records_csv(const std::string& path);

void save_field_log_csv(const std::vector<FieldLogEntry>& log,
                        const std::string& path);
std::vector<FieldLogEntry> load_field_log_csv(const std::string& path);

void save_omega_log_csv(const std::vector<OmegaLogEntry>& log,
                        const std::string& path);
std::vector<OmegaLogEntry> load_omega_log_csv(const std::string& path);

// records.csv, field_log.csv, omega_log.csv under dir (created if needed).
void save_runlog(const RunLog& log, const std::string& dir);

void save_series_csv(const FrequencySeries& series, const std::string& path);

void save_allan_csv(const AllanCurve& curve, const std::string& path);

}  // namespace lli
