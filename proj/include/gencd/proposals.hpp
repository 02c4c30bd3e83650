#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "gencd/loss.hpp"
#include "gencd/sparse_data.hpp"

namespace gencd {

/// Candidate increment for coordinate j and the approximate objective change
/// it would cause. proxy <= 0, and delta == 0 implies proxy == 0.
struct Proposal {
  Index j = 0;
  double delta = 0.0;
  double proxy = 0.0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Projection of x onto [a, b].
template <typename Scalar>
constexpr Scalar clip(Scalar x, Scalar a, Scalar b) {
  assert(a <= b);
  return x < a ? a : (x > b ? b : x);
}

/// sign(x) * max(|x| - tau, 0)
template <typename Scalar>
Scalar soft_threshold(Scalar x, Scalar tau) {
  using std::abs;
  const Scalar mag = abs(x) - tau;
  if (mag <= Scalar(0)) return Scalar(0);
  return x < Scalar(0) ? -mag : mag;
}

/// Minimizer over delta of  g*delta + (c/2)*delta^2 + lambda*|w + delta|,
/// written as a clipped step. With c = H_jj this is the exact coordinate
/// minimizer for squared loss; with c = beta it minimizes the quadratic
/// upper bound for any loss with curvature bounded by beta.
template <typename Scalar>
Scalar clipped_step(Scalar w, Scalar grad, Scalar curvature, Scalar lambda) {
  return -clip<Scalar>(w, (grad - lambda) / curvature, (grad + lambda) / curvature);
}

template <typename Scalar>
Scalar exact_step_squared(Scalar w, Scalar grad, Scalar h_jj, Scalar lambda) {
  if (!(h_jj > Scalar(0))) {
    throw std::domain_error("exact_step_squared: coordinate curvature must be positive");
  }
  return clipped_step(w, grad, h_jj, lambda);
}

/// The same minimizer in soft-threshold form.
template <typename Scalar>
Scalar exact_step_squared_soft(Scalar w, Scalar grad, Scalar h_jj, Scalar lambda) {
  if (!(h_jj > Scalar(0))) {
    throw std::domain_error("exact_step_squared_soft: coordinate curvature must be positive");
  }
  return soft_threshold<Scalar>(w - grad / h_jj, lambda / h_jj) - w;
}

template <typename Scalar>
Scalar bounded_step(Scalar w, Scalar grad, Scalar beta, Scalar lambda) {
  assert(beta > Scalar(0));
  return clipped_step(w, grad, beta, lambda);
}

/// (c/2) delta^2 + grad*delta + lambda (|w + delta| - |w|)
template <typename Scalar>
Scalar proxy_value(Scalar w, Scalar grad, Scalar delta, Scalar curvature, Scalar lambda) {
  using std::abs;
  return Scalar(0.5) * curvature * delta * delta + grad * delta +
         lambda * (abs(w + delta) - abs(w));
}

/// Gradient of the smooth part along column j, with l'(y_i, z_i) supplied
/// per row by `deriv_at(i)`.
template <typename DerivAt>
double column_grad(const ColumnView& col, Index n_samples, DerivAt&& deriv_at) {
  double acc = 0.0;
  for (std::size_t p = 0; p < col.size(); ++p) acc += deriv_at(col.rows[p]) * col.values[p];
  return acc / static_cast<double>(n_samples);
}

/// Curvature used for coordinate j: H_jj = ||X_j||^2 / n for squared loss,
/// the global bound beta otherwise (scaled up by ||X_j||^2 / n when that exceeds 1).
double coordinate_curvature(const Dataset& data, const LossSpec& loss, Index j);

/// Builds the proposal from an already-computed coordinate gradient.
Proposal make_proposal(Index j, double w_j, double grad, double curvature, double lambda);

/// Proposal for coordinate j against the current loss derivatives.
/// All-zero columns yield {j, 0, 0}.
Proposal propose(const Dataset& data, std::span<const double> loss_derivs, double w_j, Index j,
                 const RegularizedObjective& obj);

struct RefineOptions {
  int steps = 500;
  double tol = 1e-12;
};

/// Result of refining one coordinate. `weight` is the new w_j as accumulated
/// step by step, so a weight driven onto the kink at zero is exactly zero.
struct RefinedStep {
  double delta = 0.0;
  double weight = 0.0;
  int steps_taken = 0;
};

/// Improves an accepted increment by repeated curvature-bounded steps along
/// coordinate j. `shadow_z` holds z restricted to column j's support (in
/// support order) before `initial_delta` is applied; it is updated in place.
/// The returned delta is the total increment, initial_delta included.
RefinedStep refine_on_shadow(const Dataset& data, const RegularizedObjective& obj, Index j,
                        double w_j, std::span<double> shadow_z, double initial_delta,
                        const RefineOptions& opts);

/// Convenience form that gathers the shadow from a full fitted-value vector.
double refine(const Dataset& data, const RegularizedObjective& obj, Index j, double w_j,
              const Eigen::VectorXd& z, double initial_delta, const RefineOptions& opts);

}  // namespace gencd
