#include "gencd/loss.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace gencd {

std::string_view to_string(LossKind kind) {
  return kind == LossKind::squared ? "squared" : "logistic";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "squared" || name == "lasso") return LossKind::squared;
  if (name == "logistic") return LossKind::logistic;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

double objective(const RegularizedObjective& obj, const Dataset& data,
                 const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
#ifndef NDEBUG
  {
    const Eigen::VectorXd fresh = data.x.matrix() * w;
    assert(z.size() == fresh.size());
    assert((fresh - z).lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + fresh.lpNorm<Eigen::Infinity>()));
  }
#endif
  return smooth_loss(obj.loss.kind, data.y, z) + obj.lambda * w.lpNorm<1>();
}

void loss_derivs(LossKind kind, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                 Eigen::VectorXd& out) {
  out.resize(z.size());
  for (Index i = 0; i < z.size(); ++i) out[i] = loss_deriv(kind, y[i], z[i]);
}

}  // namespace gencd
