#include "gencd/sparse_data.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gencd {

DesignMatrix::DesignMatrix(Storage m) : m_(std::move(m)) {
  m_.makeCompressed();
  const int* starts = m_.outerIndexPtr();
  const int* rows = m_.innerIndexPtr();
  const double* vals = m_.valuePtr();
  for (Index j = 0; j < m_.cols(); ++j) {
    for (int p = starts[j]; p < starts[j + 1]; ++p) {
      if (rows[p] < 0 || rows[p] >= m_.rows()) {
        throw DataError("row index out of range in column " + std::to_string(j));
      }
      if (p > starts[j] && rows[p] <= rows[p - 1]) {
        throw DataError("row indices not strictly increasing in column " +
                        std::to_string(j));
      }
      if (vals[p] == 0.0) {
        throw DataError("explicit zero stored in column " + std::to_string(j));
      }
    }
  }
}

DesignMatrix DesignMatrix::from_triplets(Index n_samples, Index n_features,
                                         std::vector<Triplet> entries) {
  std::erase_if(entries, [](const Triplet& t) { return t.value() == 0.0; });
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= n_samples || t.col() < 0 || t.col() >= n_features) {
      throw DataError("entry (" + std::to_string(t.row()) + ", " +
                      std::to_string(t.col()) + ") outside " +
                      std::to_string(n_samples) + "x" + std::to_string(n_features));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.col() != b.col() ? a.col() < b.col() : a.row() < b.row();
  });
  for (std::size_t p = 1; p < entries.size(); ++p) {
    if (entries[p].col() == entries[p - 1].col() && entries[p].row() == entries[p - 1].row()) {
      throw DataError("duplicate entry at row " + std::to_string(entries[p].row() + 1) +
                      ", feature " + std::to_string(entries[p].col() + 1));
    }
  }
  Storage m(n_samples, n_features);
  m.setFromTriplets(entries.begin(), entries.end());
  return DesignMatrix(std::move(m));
}

double DesignMatrix::column_squared_norm(Index j) const {
  double s = 0.0;
  for (double v : column(j).values) s += v * v;
  return s;
}

void Dataset::validate(bool require_binary) const {
  if (y.size() != x.n_samples()) {
    throw DataError("response length " + std::to_string(y.size()) +
                    " does not match sample count " + std::to_string(x.n_samples()));
  }
  if (require_binary) {
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] != 1.0 && y[i] != -1.0) {
        throw DataError("response " + std::to_string(i) + " is not +-1");
      }
    }
  }
}

std::pair<DesignMatrix, Eigen::VectorXd> normalize_columns(const DesignMatrix& x) {
  DesignMatrix::Storage m = x.matrix();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(x.n_features());
  for (Index j = 0; j < m.cols(); ++j) {
    const double norm = std::sqrt(x.column_squared_norm(j));
    if (norm == 0.0) continue;
    scale[j] = norm;
    for (DesignMatrix::Storage::InnerIterator it(m, j); it; ++it) it.valueRef() /= norm;
  }
  return {DesignMatrix(std::move(m)), std::move(scale)};
}

double column_dot_loss_grad(const DesignMatrix& x, Index j,
                            std::span<const double> loss_derivs) {
  const ColumnView col = x.column(j);
  double acc = 0.0;
  for (std::size_t p = 0; p < col.size(); ++p) acc += loss_derivs[col.rows[p]] * col.values[p];
  return acc / static_cast<double>(x.n_samples());
}

Index max_row_degree(const DesignMatrix& x) {
  std::vector<Index> degree(x.n_samples(), 0);
  for (int r : x.row_indices()) ++degree[r];
  return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

}  // namespace gencd
