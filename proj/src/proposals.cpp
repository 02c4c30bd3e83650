#include "gencd/proposals.hpp"

#include <algorithm>

namespace gencd {

double coordinate_curvature(const Dataset& data, const LossSpec& loss, Index j) {
  const double sq = data.x.column_squared_norm(j);
  if (sq == 0.0) return 0.0;
  const double scaled = sq / static_cast<double>(data.n_samples());
  if (loss.kind == LossKind::squared) return scaled;
  // beta alone bounds the curvature only when ||X_j||^2 <= n.
  return loss.beta * std::max(1.0, scaled);
}

Proposal make_proposal(Index j, double w_j, double grad, double curvature, double lambda) {
  if (curvature <= 0.0) return {j, 0.0, 0.0};
  const double delta = clipped_step(w_j, grad, curvature, lambda);
  if (delta == 0.0) return {j, 0.0, 0.0};
  return {j, delta, proxy_value(w_j, grad, delta, curvature, lambda)};
}

Proposal propose(const Dataset& data, std::span<const double> loss_derivs, double w_j, Index j,
                 const RegularizedObjective& obj) {
  const double curvature = coordinate_curvature(data, obj.loss, j);
  if (curvature == 0.0) return {j, 0.0, 0.0};
  const double g = column_dot_loss_grad(data.x, j, loss_derivs);
  return make_proposal(j, w_j, g, curvature, obj.lambda);
}

RefinedStep refine_on_shadow(const Dataset& data, const RegularizedObjective& obj, Index j,
                        double w_j, std::span<double> shadow_z, double initial_delta,
                        const RefineOptions& opts) {
  const ColumnView col = data.x.column(j);
  assert(shadow_z.size() == col.size());
  const double curvature = coordinate_curvature(data, obj.loss, j);
  if (curvature == 0.0) return {initial_delta, w_j + initial_delta, 0};

  using Array = Eigen::ArrayXd;
  const auto n = static_cast<Eigen::Index>(col.size());
  Eigen::Map<Array> z(shadow_z.data(), n);
  const Eigen::Map<const Array> x(col.values.data(), n);
  Array y(n);
  for (Eigen::Index p = 0; p < n; ++p) y[p] = data.y[col.rows[p]];
  const Array yx = y * x;
  const double inv_n = 1.0 / static_cast<double>(data.n_samples());
  const auto grad = [&] {
    if (obj.loss.kind == LossKind::squared) return ((z - y) * x).sum() * inv_n;
    // 1 + exp(m) may overflow to inf, which still yields the right limit of 0.
    return -(yx / (1.0 + (y * z).exp())).sum() * inv_n;
  };

  double local_w = w_j + initial_delta;
  double total = initial_delta;
  int taken = 0;
  z += initial_delta * x;
  for (int s = 0; s < opts.steps; ++s) {
    const double step = clipped_step(local_w, grad(), curvature, obj.lambda);
    if (step == 0.0) break;
    local_w += step;
    total += step;
    ++taken;
    z += step * x;
    if (std::abs(step) < opts.tol) break;
  }
  return {total, local_w, taken};
}

double refine(const Dataset& data, const RegularizedObjective& obj, Index j, double w_j,
              const Eigen::VectorXd& z, double initial_delta, const RefineOptions& opts) {
  const ColumnView col = data.x.column(j);
  std::vector<double> shadow(col.size());
  for (std::size_t p = 0; p < col.size(); ++p) shadow[p] = z[col.rows[p]];
  return refine_on_shadow(data, obj, j, w_j, shadow, initial_delta, opts).delta;
}

}  // namespace gencd
