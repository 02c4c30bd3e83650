#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace gencd {

using Index = std::int64_t;

/// Raised when a design matrix or dataset violates its structural invariants.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Read-only view of one column of a design matrix: row indices and values
/// of the stored entries, rows strictly increasing.
struct ColumnView {
  std::span<const int> rows;
  std::span<const double> values;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

/// Immutable sparse column-major feature matrix (n samples x k features).
///
/// Backed by a compressed Eigen::SparseMatrix. Construction validates that
/// row indices are strictly increasing inside every column and that no
/// stored value is zero; explicit zeros handed to `from_triplets` are
/// dropped before that check.
class DesignMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  using Triplet = Eigen::Triplet<double, int>;

  DesignMatrix() = default;
  explicit DesignMatrix(Storage m);

  /// Builds from (row, col, value) entries in any order. Zero values are
  /// dropped; a repeated (row, col) pair is rejected.
  static DesignMatrix from_triplets(Index n_samples, Index n_features,
                                    std::vector<Triplet> entries);

  Index n_samples() const { return m_.rows(); }
  Index n_features() const { return m_.cols(); }
  Index nnz() const { return m_.nonZeros(); }

  ColumnView column(Index j) const {
    const int begin = m_.outerIndexPtr()[j];
    const int end = m_.outerIndexPtr()[j + 1];
    return {{m_.innerIndexPtr() + begin, static_cast<std::size_t>(end - begin)},
            {m_.valuePtr() + begin, static_cast<std::size_t>(end - begin)}};
  }

  std::span<const int> col_starts() const {
    return {m_.outerIndexPtr(), static_cast<std::size_t>(m_.cols() + 1)};
  }
  std::span<const int> row_indices() const {
    return {m_.innerIndexPtr(), static_cast<std::size_t>(m_.nonZeros())};
  }
  std::span<const double> values() const {
    return {m_.valuePtr(), static_cast<std::size_t>(m_.nonZeros())};
  }

  double column_squared_norm(Index j) const;

  const Storage& matrix() const { return m_; }

 private:
  Storage m_;
};

/// Feature matrix plus responses. For logistic loss every response is +-1.
struct Dataset {
  DesignMatrix x;
  Eigen::VectorXd y;

  Index n_samples() const { return x.n_samples(); }
  Index n_features() const { return x.n_features(); }

  /// Throws DataError if y has the wrong length, or if `require_binary`
  /// and some y_i is not in {-1, +1}.
  void validate(bool require_binary) const;
};

/// Scales every nonempty column to unit Euclidean norm. The second member
/// holds each column's original norm (1 for all-zero columns) so that a
/// weight w_j fitted on the scaled matrix maps back as w_j / scale_j.
std::pair<DesignMatrix, Eigen::VectorXd> normalize_columns(const DesignMatrix& x);

/// (1/n) * sum over column j's support of loss_derivs[i] * X_ij.
double column_dot_loss_grad(const DesignMatrix& x, Index j,
                            std::span<const double> loss_derivs);

/// Maximum number of features sharing a single row.
Index max_row_degree(const DesignMatrix& x);

}  // namespace gencd
