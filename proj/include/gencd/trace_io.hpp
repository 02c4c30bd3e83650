#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gencd/engine.hpp"

namespace gencd {

inline constexpr const char* kTraceHeader = "wall_time_s,iterations,updates,objective,nnz";

/// One CSV row per record under kTraceHeader. Times carry 6 decimals and
/// objectives 15, so output is byte-stable for identical records.
void write_trace(std::ostream& out, std::span<const TraceRecord> records);
void write_trace(const std::string& path, std::span<const TraceRecord> records);

std::vector<TraceRecord> read_trace(std::istream& in);
std::vector<TraceRecord> read_trace(const std::string& path);

}  // namespace gencd
