#include "gencd/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gencd/libsvm.hpp"

namespace gencd {

void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  out << kTraceHeader << '\n';
  char line[160];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%.6f,%" PRIu64 ",%" PRIu64 ",%.15f,%" PRId64 "\n",
                  r.wall_time, r.iterations, r.total_updates, r.objective,
                  static_cast<std::int64_t>(r.nnz));
    out << line;
  }
}

void write_trace(const std::string& path, std::span<const TraceRecord> records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace '" + path + "'");
  write_trace(out, records);
  if (!out) throw IoError("write failed for trace '" + path + "'");
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ParseError("missing trace header", 1);
  }
  std::vector<TraceRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    TraceRecord r;
    std::int64_t nnz = 0;
    if (std::sscanf(line.c_str(), "%lf,%" SCNu64 ",%" SCNu64 ",%lf,%" SCNd64, &r.wall_time,
                    &r.iterations, &r.total_updates, &r.objective, &nnz) != 5) {
      throw ParseError("malformed trace row", line_no);
    }
    r.nnz = nnz;
    records.push_back(r);
  }
  return records;
}

std::vector<TraceRecord> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace '" + path + "'");
  return read_trace(in);
}

}  // namespace gencd
