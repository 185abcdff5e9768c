#pragma once

#include <cstdint>
#include <string>

#include "lli/analysis.hpp"
#include "lli/experiment.hpp"

// Pipeline configuration: one struct covering simulation, analysis, and the
// gate Monte Carlo, loadable from JSON. Unknown keys are rejected so typos
// fail loud instead of silently running defaults. Angles are degrees in the
// JSON file and radians in memory.

namespace lli {

struct PipelineConfig {
  std::uint64_t master_seed = 20180219;
  std::string out_dir = "out";

  RunConfig run;
  CTensor inject;       // tensor driving the simulated signal
  LabFrame frame;
  ExtractOptions extract;

  double bin_width_s = 3600.0;
  bool allan_overlapping = false;

  int gate_mc_trials = 100;
  double gate_intensity_rms = 0.05;
};

// Reads and validates a JSON config file. Throws std::runtime_error with the
// offending key path on unknown keys, bad enum labels, or parse errors.
PipelineConfig load_config(const std::string& path);

// Same, from an in-memory JSON string.
PipelineConfig config_from_json_text(const std::string& text);

// LLI_SEED, LLI_OUT, LLI_SCHEME override the corresponding fields when set.
void apply_env_overrides(PipelineConfig& cfg);

// Fully resolved snapshot (every field, current values) as pretty-printed
// JSON; feeding it back through config_from_json_text reproduces cfg.
std::string config_json(const PipelineConfig& cfg);

}  // namespace lli
