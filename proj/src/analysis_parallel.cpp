#include "analysis_detail.hpp"
#include "lli/analysis.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace lli {

FrequencySeries extract_block_frequencies(
    const std::vector<MeasurementRecord>& records,
    const ExtractOptions& opts) {
  detail::Pass1 p = detail::contrast_pass(records, opts);
  const std::size_t nb = p.blocks.size();
  std::vector<FreqEntry> entries(nb);
  std::vector<char> ok(nb, 0);
  std::vector<std::string> reasons(nb);
  // The contrast pass fixed every per-block input, so the extraction is
  // embarrassingly parallel and the merge below restores block order.
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (long i = 0; i < static_cast<long>(nb); ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    ok[u] = detail::block_entry(p, u, opts, &entries[u], &reasons[u]) ? 1 : 0;
  }
  return detail::assemble(p, entries, ok, reasons, opts);
}

}  // namespace lli
