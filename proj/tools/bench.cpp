// Timing harness for the two OpenMP kernels against their serial reference
// implementations. Also asserts the results agree bitwise, since the parallel
// paths are required to be deterministic.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "lli/analysis.hpp"
#include "lli/experiment.hpp"
#include "lli/frame.hpp"
#include "lli/ms_gate.hpp"

using namespace lli;

namespace {

double wall(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int mismatch = 0;

void check(bool same, const char* what) {
  if (!same) {
    std::fprintf(stderr, "MISMATCH: %s\n", what);
    ++mismatch;
  }
}

}  // namespace

int main(int argc, char** argv) {
  int trials = 64;
  double hours = 12.0;
  if (argc > 1) trials = std::atoi(argv[1]);
  if (argc > 2) hours = std::atof(argv[2]);

  {
    GateConfig cfg;
    cfg.mode.n_max = 5;  // the ensemble sweep dominates either way
    calibrate_rabi(cfg);

    auto t0 = std::chrono::steady_clock::now();
    const EnsembleResult ser =
        bell_fidelity_ensemble_serial(cfg, trials, 0.05, 42);
    const double ts = wall(t0);
    t0 = std::chrono::steady_clock::now();
    const EnsembleResult par = bell_fidelity_ensemble(cfg, trials, 0.05, 42);
    const double tp = wall(t0);

    check(std::memcmp(&ser, &par, sizeof ser) == 0, "gate ensemble");
    std::printf("gate ensemble, %d trials: serial %.2f s, parallel %.2f s "
                "(x%.2f), fidelity %.4f\n",
                trials, ts, tp, ts / tp, par.fidelity);
  }

  {
    RunConfig rc;
    rc.end_utc = rc.start_utc + hours * 3600.0;
    LabFrame frame;
    resolve_equinox_epoch(frame, rc.start_utc);
    const RunLog log = run_campaign(rc, CTensor{}, frame, 7);

    ExtractOptions opts;
    opts.epoch_utc = frame.equinox_epoch_utc;
    auto t0 = std::chrono::steady_clock::now();
    const FrequencySeries ser =
        extract_block_frequencies_serial(log.records, opts);
    const double ts = wall(t0);
    t0 = std::chrono::steady_clock::now();
    const FrequencySeries par = extract_block_frequencies(log.records, opts);
    const double tp = wall(t0);

    bool same = ser.entries.size() == par.entries.size() &&
                ser.skipped == par.skipped;
    for (std::size_t i = 0; same && i < ser.entries.size(); ++i)
      same = std::memcmp(&ser.entries[i], &par.entries[i],
                         sizeof(FreqEntry)) == 0;
    check(same, "frequency extraction");
    std::printf("extraction, %zu blocks: serial %.3f s, parallel %.3f s "
                "(x%.2f)\n",
                par.entries.size(), ts, tp, ts / tp);
  }

  return mismatch;
}
