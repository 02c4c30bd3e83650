#include "gencd/libsvm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace gencd {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    std::size_t q = p;
    while (q < line.size() && !std::isspace(static_cast<unsigned char>(line[q]))) ++q;
    if (q > p) out.push_back(line.substr(p, q - p));
    p = q;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset read_libsvm(std::istream& in, const LibsvmOptions& opts) {
  std::vector<DesignMatrix::Triplet> entries;
  std::vector<double> labels;
  Index max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    const auto tokens = split_ws(view);
    if (tokens.empty()) continue;

    double raw_label = 0.0;
    if (!parse_number(tokens[0], raw_label)) {
      throw ParseError("bad label '" + std::string(tokens[0]) + "'", line_no);
    }
    const int row = static_cast<int>(labels.size());
    Index prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected idx:val, got '" + std::string(tokens[t]) + "'", line_no);
      }
      Index idx = 0;
      double val = 0.0;
      if (!parse_number(tokens[t].substr(0, colon), idx) ||
          !parse_number(tokens[t].substr(colon + 1), val)) {
        throw ParseError("malformed pair '" + std::string(tokens[t]) + "'", line_no);
      }
      if (idx < 1) throw ParseError("feature index must be >= 1", line_no);
      if (opts.n_features && idx > *opts.n_features) {
        throw ParseError("feature index " + std::to_string(idx) + " exceeds declared count " +
                             std::to_string(*opts.n_features),
                         line_no);
      }
      if (idx == prev) {
        throw ParseError("duplicate entry for feature " + std::to_string(idx), line_no);
      }
      if (idx < prev) throw ParseError("feature indices not increasing", line_no);
      prev = idx;
      max_index = std::max(max_index, idx);
      if (val != 0.0) entries.emplace_back(row, static_cast<int>(idx - 1), val);
    }
    labels.push_back(opts.label_rule ? (*opts.label_rule)(raw_label) : raw_label);
  }
  if (labels.empty()) throw ParseError("no samples", 0);

  const Index k = opts.n_features.value_or(max_index);
  Dataset data{DesignMatrix::from_triplets(static_cast<Index>(labels.size()), k,
                                           std::move(entries)),
               Eigen::Map<const Eigen::VectorXd>(labels.data(),
                                                 static_cast<Index>(labels.size()))};
  return data;
}

Dataset load_libsvm(const std::string& path, const LibsvmOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_libsvm(in, opts);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  // Row-major traversal needs a transposed copy.
  const Eigen::SparseMatrix<double, Eigen::RowMajor, int> rows = data.x.matrix();
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < rows.rows(); ++i) {
    out << data.y[i];
    for (decltype(rows)::InnerIterator it(rows, i); it; ++it) {
      out << ' ' << it.col() + 1 << ':' << it.value();
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void save_libsvm(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_libsvm(out, data);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::unordered_set<long long> read_topic_members(std::istream& in, const std::string& topic) {
  std::unordered_set<long long> members;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2) throw ParseError("expected 'TOPIC docid ...'", line_no);
    if (tokens[0] != topic) continue;
    long long doc = 0;
    if (!parse_number(tokens[1], doc)) throw ParseError("bad document id", line_no);
    members.insert(doc);
  }
  return members;
}

}  // namespace gencd
