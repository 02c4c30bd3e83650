#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gencd/coloring.hpp"
#include "gencd/loss.hpp"
#include "gencd/proposals.hpp"
#include "gencd/strategies.hpp"

namespace gencd {

/// Weights and fitted values z = X w.
struct ModelState {
  Eigen::VectorXd w;
  Eigen::VectorXd z;

  static ModelState zeros(const Dataset& data) {
    return {Eigen::VectorXd::Zero(data.n_features()), Eigen::VectorXd::Zero(data.n_samples())};
  }

  Index nnz() const { return (w.array() != 0.0).count(); }

  /// Max-abs deviation between z and a fresh X w.
  double z_drift(const DesignMatrix& x) const {
    if (z.size() == 0) return 0.0;
    return (x.matrix() * w - z).lpNorm<Eigen::Infinity>();
  }
};

struct TraceRecord {
  double wall_time = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t total_updates = 0;
  double objective = 0.0;
  Index nnz = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct RunConfig {
  RegularizedObjective objective;
  StrategyConfig strategy;
  /// Zero disables each of the three stopping rules; at least one must be on.
  std::uint64_t max_iterations = 0;
  double time_limit = 0.0;
  double convergence_tol = 1e-8;
  RefineOptions refine;
  /// Trace sampling: every `trace_every_iterations` iterations when nonzero,
  /// otherwise every `trace_every_seconds` of wall time.
  double trace_every_seconds = 0.1;
  std::uint64_t trace_every_iterations = 0;
  /// Abort once the objective exceeds this multiple of its initial value.
  double divergence_factor = 10.0;
  ColoringOrder coloring_order = ColoringOrder::first_fit;

  void validate() const;
};

enum class StopReason { converged, iteration_limit, time_limit };

struct RunResult {
  ModelState state;
  std::vector<TraceRecord> trace;
  StopReason stop = StopReason::iteration_limit;
  std::uint64_t iterations = 0;
  std::uint64_t updates = 0;
  std::uint64_t proposals = 0;
  double wall_time = 0.0;
  /// Coordinates that may move concurrently in one iteration.
  Index parallel_width = 1;

  bool converged() const { return stop == StopReason::converged; }
  double updates_per_second() const { return wall_time > 0.0 ? updates / wall_time : 0.0; }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(StrategyKind strategy, Index width, double objective, double initial);

  StrategyKind strategy() const { return strategy_; }
  Index width() const { return width_; }

 private:
  StrategyKind strategy_;
  Index width_;
};

/// Runs the Select / Propose / Accept / Update loop from w = 0.
///
/// Shotgun without an explicit subset size uses P* from power iteration.
/// Coloring without a supplied coloring colors the matrix first. Throws
/// DivergenceError when the divergence guard trips.
RunResult run(const Dataset& data, const RunConfig& cfg,
              const FeatureColoring* coloring = nullptr);

/// Propose step: J is cut into `threads` contiguous static blocks and block
/// b's proposals land in list b. Reads only `state.w` and `loss_derivs`.
std::vector<std::vector<Proposal>> propose_phase(const Dataset& data,
                                                 const RegularizedObjective& obj,
                                                 const ModelState& state,
                                                 std::span<const double> loss_derivs,
                                                 const SelectionSet& selection, int threads);

/// Update step: refines each accepted increment against the live z, writes
/// w_j, and adds delta_j X_j into z with atomic additions. Returns the
/// number of nonzero updates applied.
std::size_t update_phase(const Dataset& data, const RegularizedObjective& obj,
                         ModelState& state, std::span<const Proposal> accepted,
                         const RefineOptions& refine, int threads);

/// True when the relative objective change between the last two
/// sweep-equivalent samples is strictly below tol.
bool check_convergence(std::span<const double> sweep_objectives, double tol);

}  // namespace gencd
