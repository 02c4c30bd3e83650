#pragma once

#include <cstdint>

#include "gencd/sparse_data.hpp"

namespace gencd {

/// Largest eigenvalue rho of X^T X and Shotgun's safe parallel width
/// P* = max(1, floor(k / (2 rho))).
struct SpectralEstimate {
  double rho = 0.0;
  Index p_star = 1;
  int iterations_used = 0;
  bool converged = false;
};

struct PowerIterationOptions {
  int max_iters = 1000;
  double tol = 1e-6;
  std::uint64_t seed = 12345;
};

/// Power iteration v <- X^T X v / ||X^T X v|| from a random unit vector.
/// Stops when successive Rayleigh quotients differ by less than tol * rho.
/// A zero matrix gives rho = 0 and p_star = k.
SpectralEstimate power_iteration(const DesignMatrix& x, const PowerIterationOptions& opts = {});

Index p_star_from_rho(Index k, double rho);

}  // namespace gencd
