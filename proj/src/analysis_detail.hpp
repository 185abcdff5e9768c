#pragma once

#include <string>
#include <vector>

#include "lli/analysis.hpp"

// Shared plumbing between the serial and parallel frequency-extraction
// drivers. Not part of the public headers.

namespace lli::detail {

struct BlockRange {
  std::int32_t id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Pass1 {
  std::vector<const MeasurementRecord*> ordered;  // sorted by (block, utc)
  std::vector<BlockRange> blocks;
  std::vector<double> a_short;      // tracked contrast per block
  std::vector<std::string> fail;    // nonempty = skip this block
};

// Sequential pass: sorts, groups by block id, and runs the contrast EMA.
Pass1 contrast_pass(const std::vector<MeasurementRecord>& records,
                    const ExtractOptions& opts);

// Per-block extraction; false + reason on malformed blocks. Pure function of
// its inputs, safe to call from any thread.
bool block_entry(const Pass1& p, std::size_t i, const ExtractOptions& opts,
                 FreqEntry* out, std::string* reason);

// Collects the surviving entries in block order and fills the series meta.
FrequencySeries assemble(const Pass1& p, const std::vector<FreqEntry>& entries,
                         const std::vector<char>& ok,
                         const std::vector<std::string>& reasons,
                         const ExtractOptions& opts);

double resolved_omega(const ExtractOptions& opts);

}  // namespace lli::detail
