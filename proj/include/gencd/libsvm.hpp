#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "gencd/sparse_data.hpp"

namespace gencd {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Maps a raw label to +-1.
struct LabelRule {
  enum class Kind { threshold, positive_value };
  Kind kind = Kind::threshold;
  double value = 0.0;

  /// Labels >= t become +1, everything else -1.
  static LabelRule at_least(double t) { return {Kind::threshold, t}; }
  /// Labels equal to v become +1, everything else -1.
  static LabelRule equals(double v) { return {Kind::positive_value, v}; }

  double operator()(double raw) const {
    if (kind == Kind::threshold) return raw >= value ? 1.0 : -1.0;
    return raw == value ? 1.0 : -1.0;
  }
};

struct LibsvmOptions {
  /// Declared feature count; defaults to the largest index seen.
  std::optional<Index> n_features;
  std::optional<LabelRule> label_rule;
};

/// Parses `label idx:val ...` lines with 1-based, strictly increasing
/// indices. Blank lines and `#` comments are skipped.
Dataset read_libsvm(std::istream& in, const LibsvmOptions& opts = {});
Dataset load_libsvm(const std::string& path, const LibsvmOptions& opts = {});

/// Writes with round-trip precision.
void write_libsvm(std::ostream& out, const Dataset& data);
void save_libsvm(const std::string& path, const Dataset& data);

/// Reads an RCV1-style topic assignment file (`TOPIC docid 1` per line) and
/// returns the document ids carrying `topic`.
std::unordered_set<long long> read_topic_members(std::istream& in, const std::string& topic);

}  // namespace gencd
