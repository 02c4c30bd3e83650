#include "gencd/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gencd {

Index p_star_from_rho(Index k, double rho) {
  if (!(rho > 0.0)) return k;
  const double bound = std::floor(static_cast<double>(k) / (2.0 * rho));
  return std::max<Index>(1, static_cast<Index>(bound));
}

SpectralEstimate power_iteration(const DesignMatrix& x, const PowerIterationOptions& opts) {
  const Index k = x.n_features();
  if (k < 1) throw std::invalid_argument("power_iteration: matrix has no columns");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(k);
  for (Index j = 0; j < k; ++j) v[j] = gauss(rng);
  v.normalize();

  const auto& m = x.matrix();
  SpectralEstimate est;
  double previous = 0.0;
  Eigen::VectorXd u(x.n_samples());
  Eigen::VectorXd next(k);
  for (int it = 1; it <= opts.max_iters; ++it) {
    u.noalias() = m * v;
    next.noalias() = m.transpose() * u;
    const double rayleigh = v.dot(next);
    const double norm = next.norm();
    est.iterations_used = it;
    est.rho = rayleigh;
    if (norm == 0.0) {
      est.rho = 0.0;
      est.converged = true;
      break;
    }
    v = next / norm;
    if (it > 1 && std::abs(rayleigh - previous) < opts.tol * rayleigh) {
      est.converged = true;
      break;
    }
    previous = rayleigh;
  }
  est.p_star = p_star_from_rho(k, est.rho);
  return est;
}

}  // namespace gencd
