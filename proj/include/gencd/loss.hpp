#pragma once

#include <cmath>
#include <string_view>

#include <Eigen/Core>

#include "gencd/sparse_data.hpp"

namespace gencd {

enum class LossKind { squared, logistic };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

/// A loss together with its global curvature bound: d^2/dt^2 l(y, t) <= beta.
struct LossSpec {
  LossKind kind = LossKind::logistic;
  double beta = 0.25;

  static constexpr LossSpec squared() { return {LossKind::squared, 1.0}; }
  static constexpr LossSpec logistic() { return {LossKind::logistic, 0.25}; }
  static constexpr LossSpec of(LossKind kind) {
    return kind == LossKind::squared ? squared() : logistic();
  }
};

/// (1/n) sum_i l(y_i, (Xw)_i) + lambda * ||w||_1
struct RegularizedObjective {
  LossSpec loss = LossSpec::logistic();
  double lambda = 0.0;
};

// Derivatives are taken in the fitted value t.

template <typename Scalar>
Scalar loss_value(LossKind kind, Scalar y, Scalar t) {
  using std::exp;
  using std::log1p;
  using std::abs;
  if (kind == LossKind::squared) {
    const Scalar r = y - t;
    return Scalar(0.5) * r * r;
  }
  // log(1 + exp(-m)) = log1p(exp(-|m|)) + max(0, -m)
  const Scalar m = y * t;
  return log1p(exp(-abs(m))) + (m < Scalar(0) ? -m : Scalar(0));
}

template <typename Scalar>
Scalar loss_deriv(LossKind kind, Scalar y, Scalar t) {
  using std::exp;
  if (kind == LossKind::squared) return t - y;
  // -y / (1 + exp(y t)), evaluated without overflowing exp.
  const Scalar m = y * t;
  if (m >= Scalar(0)) {
    const Scalar e = exp(-m);
    return -y * e / (Scalar(1) + e);
  }
  return -y / (Scalar(1) + exp(m));
}

template <typename Scalar>
Scalar loss_second_deriv(LossKind kind, Scalar y, Scalar t) {
  using std::exp;
  using std::abs;
  if (kind == LossKind::squared) return Scalar(1);
  const Scalar e = exp(-abs(y * t));
  return e / ((Scalar(1) + e) * (Scalar(1) + e));
}

template <typename Scalar>
Scalar loss_value(const LossSpec& spec, Scalar y, Scalar t) {
  return loss_value(spec.kind, y, t);
}
template <typename Scalar>
Scalar loss_deriv(const LossSpec& spec, Scalar y, Scalar t) {
  return loss_deriv(spec.kind, y, t);
}

/// Smooth part (1/n) sum_i l(y_i, z_i).
template <typename DerivedY, typename DerivedZ>
typename DerivedZ::Scalar smooth_loss(LossKind kind, const Eigen::MatrixBase<DerivedY>& y,
                                      const Eigen::MatrixBase<DerivedZ>& z) {
  using Scalar = typename DerivedZ::Scalar;
  Scalar acc(0);
  for (Index i = 0; i < z.size(); ++i) acc += loss_value<Scalar>(kind, y[i], z[i]);
  return z.size() == 0 ? Scalar(0) : acc / Scalar(z.size());
}

/// Full objective given weights and their fitted values z = Xw.
double objective(const RegularizedObjective& obj, const Dataset& data,
                 const Eigen::VectorXd& w, const Eigen::VectorXd& z);

/// Writes l'(y_i, z_i) into `out` (resized to n).
void loss_derivs(LossKind kind, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                 Eigen::VectorXd& out);

}  // namespace gencd
