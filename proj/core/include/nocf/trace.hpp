#pragma once

// Line-delimited JSON output. Every line is one object with a "type" field:
//   header  - run parameters and config overrides
//   cycle   - one TraceRecord
//   stats   - final SimStats
// Field names are stable; see README for the schema.

#include <map>
#include <string>

#include "nocf/system.hpp"

namespace nocf {

std::string header_line(const std::map<std::string, std::string>& fields,
                        const std::map<std::string, std::string>& overrides);
std::string trace_line(const TraceRecord& rec);
std::string stats_line(const SimStats& stats);

/// Compact human-readable rendering of one cycle, for text output.
std::string trace_text(const TraceRecord& rec);
std::string stats_text(const SimStats& stats);

std::string hex32(std::uint32_t v);

}  // namespace nocf
