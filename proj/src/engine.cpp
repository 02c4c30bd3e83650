#include "gencd/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <omp.h>

#include "gencd/spectral.hpp"

namespace gencd {
namespace {

using Clock = std::chrono::steady_clock;

double load(double& slot) {
  return std::atomic_ref<double>(slot).load(std::memory_order_relaxed);
}

void atomic_add(double& slot, double v) {
  std::atomic_ref<double>(slot).fetch_add(v, std::memory_order_relaxed);
}

void store(double& slot, double v) {
  std::atomic_ref<double>(slot).store(v, std::memory_order_relaxed);
}

std::vector<double> curvatures(const Dataset& data, const LossSpec& loss) {
  std::vector<double> c(data.n_features());
  for (Index j = 0; j < data.n_features(); ++j) c[j] = coordinate_curvature(data, loss, j);
  return c;
}

/// Per-thread scratch for shadow copies of z.
struct ThreadScratch {
  std::vector<double> shadow;
};

/// Shared worker routines. Holds no mutable state of its own; every method
/// is safe to call from any number of threads on disjoint coordinates.
class Kernels {
 public:
  Kernels(const Dataset& data, const RegularizedObjective& obj, const RefineOptions& refine)
      : data_(data), obj_(obj), refine_(refine), curvature_(curvatures(data, obj.loss)) {}

  Proposal propose_frozen(Index j, double w_j, std::span<const double> derivs) const {
    const double c = curvature_[j];
    if (c == 0.0) return {j, 0.0, 0.0};
    const ColumnView col = data_.x.column(j);
    const double g = column_grad(col, data_.n_samples(), [&](int r) { return derivs[r]; });
    return make_proposal(j, w_j, g, c, obj_.lambda);
  }

  /// Refines against the live z and publishes w_j and z. Returns true when
  /// the coordinate actually moved.
  bool apply(const Proposal& p, ModelState& state, ThreadScratch& scratch) const {
    if (p.delta == 0.0) return false;
    const ColumnView col = data_.x.column(p.j);
    gather(col, state, scratch);
    return publish(p.j, col, state, scratch, p.delta);
  }

  /// Propose and apply in one pass against the live z.
  bool propose_and_apply(Index j, ModelState& state, ThreadScratch& scratch) const {
    const double c = curvature_[j];
    if (c == 0.0) return false;
    const ColumnView col = data_.x.column(j);
    gather(col, state, scratch);
    double acc = 0.0;
    for (std::size_t p = 0; p < col.size(); ++p) {
      acc += loss_deriv(obj_.loss.kind, data_.y[col.rows[p]], scratch.shadow[p]) * col.values[p];
    }
    const double g = acc / static_cast<double>(data_.n_samples());
    const double w_j = state.w[j];
    const double delta = clipped_step(w_j, g, c, obj_.lambda);
    if (delta == 0.0) return false;
    return publish(j, col, state, scratch, delta);
  }

  void refresh_derivs(Index j, ModelState& state, std::span<double> derivs) const {
    for (int r : data_.x.column(j).rows) {
      store(derivs[r], loss_deriv(obj_.loss.kind, data_.y[r], load(state.z[r])));
    }
  }

 private:
  void gather(const ColumnView& col, ModelState& state, ThreadScratch& scratch) const {
    scratch.shadow.resize(col.size());
    for (std::size_t p = 0; p < col.size(); ++p) scratch.shadow[p] = load(state.z[col.rows[p]]);
  }

  bool publish(Index j, const ColumnView& col, ModelState& state, ThreadScratch& scratch,
               double initial_delta) const {
    const RefinedStep step =
        refine_on_shadow(data_, obj_, j, state.w[j], scratch.shadow, initial_delta, refine_);
    if (step.delta == 0.0) return false;
    state.w[j] = step.weight;
    for (std::size_t p = 0; p < col.size(); ++p) {
      atomic_add(state.z[col.rows[p]], step.delta * col.values[p]);
    }
    return true;
  }

  const Dataset& data_;
  RegularizedObjective obj_;
  RefineOptions refine_;
  std::vector<double> curvature_;
};

void propose_blocks(const Kernels& kernels, const ModelState& state,
                    std::span<const double> derivs, const SelectionSet& selection, int threads,
                    std::vector<std::vector<Proposal>>& out) {
  out.resize(threads);
  const auto& J = selection.indices;
#pragma omp parallel num_threads(threads) if (threads > 1 && J.size() > 1)
  {
    // Block ownership is fixed by `threads` even if the runtime hands us a
    // smaller team.
    const int team = omp_get_num_threads();
    for (int b = omp_get_thread_num(); b < threads; b += team) {
      const auto [begin, end] = static_block(J.size(), threads, b);
      auto& list = out[b];
      list.clear();
      for (std::size_t i = begin; i < end; ++i) {
        list.push_back(kernels.propose_frozen(J[i], state.w[J[i]], derivs));
      }
    }
  }
}

std::size_t apply_blocks(const Kernels& kernels, ModelState& state,
                         std::span<const Proposal> accepted, int threads,
                         std::vector<ThreadScratch>& scratch) {
  std::size_t applied = 0;
  scratch.resize(std::max<std::size_t>(scratch.size(), threads));
#pragma omp parallel num_threads(threads) if (threads > 1 && accepted.size() > 1) \
    reduction(+ : applied)
  {
    const int team = omp_get_num_threads();
    ThreadScratch& mine = scratch[omp_get_thread_num()];
    for (int b = omp_get_thread_num(); b < threads; b += team) {
      const auto [begin, end] = static_block(accepted.size(), threads, b);
      for (std::size_t i = begin; i < end; ++i) {
        if (kernels.apply(accepted[i], state, mine)) ++applied;
      }
    }
  }
  return applied;
}

void refresh_rows(const Kernels& kernels, ModelState& state, std::span<const Proposal> moved,
                  std::span<double> derivs, int threads) {
  const auto count = static_cast<std::ptrdiff_t>(moved.size());
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && count > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    if (moved[i].delta != 0.0) kernels.refresh_derivs(moved[i].j, state, derivs);
  }
}

Index parallel_width(const StrategyConfig& s, const FeatureColoring* coloring) {
  switch (s.kind) {
    case StrategyKind::shotgun: return s.shotgun_p;
    case StrategyKind::thread_greedy: return s.threads;
    case StrategyKind::coloring: return coloring_stats(*coloring).max_class_size;
    default: return 1;
  }
}

class Runner {
 public:
  Runner(const Dataset& data, const RunConfig& cfg, const FeatureColoring* coloring)
      : data_(data),
        cfg_(cfg),
        kernels_(data, cfg.objective, cfg.refine),
        coloring_(coloring),
        rng_(cfg.strategy.rng_seed) {
    threads_ = cfg_.strategy.threads;
    if (cfg_.strategy.kind == StrategyKind::shotgun && cfg_.strategy.shotgun_p == 0) {
      cfg_.strategy.shotgun_p = power_iteration(data.x).p_star;
    }
    if (cfg_.strategy.kind == StrategyKind::shotgun) {
      cfg_.strategy.shotgun_p = std::min(cfg_.strategy.shotgun_p, data.n_features());
    }
    if (cfg_.strategy.kind == StrategyKind::coloring && coloring_ == nullptr) {
      owned_coloring_ = color_features(data.x, cfg_.coloring_order);
      coloring_ = &*owned_coloring_;
    }
    if (cfg_.strategy.kind != StrategyKind::coloring) coloring_ = nullptr;
    selector_.emplace(cfg_.strategy, data.n_features(), coloring_);
  }

  RunResult run() {
    RunResult result;
    result.state = ModelState::zeros(data_);
    result.parallel_width = parallel_width(cfg_.strategy, coloring_);
    ModelState& state = result.state;
    loss_derivs(cfg_.objective.loss.kind, data_.y, state.z, derivs_);

    const auto start = Clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
    const double initial = objective(cfg_.objective, data_, state.w, state.z);
    result.trace.push_back({0.0, 0, 0, initial, 0});
    std::vector<double> sweep_objectives{initial};
    const auto k = static_cast<std::uint64_t>(data_.n_features());
    // A sweep-equivalent ends after k coordinate updates, or after k
    // consecutive proposals that moved nothing.
    std::uint64_t updates_since = 0;
    std::uint64_t idle_proposals = 0;
    double next_trace_time = cfg_.trace_every_seconds;

    const auto guard = [&](double value) {
      if (!std::isfinite(value) || (value > cfg_.divergence_factor * initial && value > 0.0)) {
        throw DivergenceError(cfg_.strategy.kind, result.parallel_width, value, initial);
      }
    };
    const auto record = [&](double now) {
      const double value = objective(cfg_.objective, data_, state.w, state.z);
      guard(value);
      result.trace.push_back({now, result.iterations, result.updates, value, state.nnz()});
    };

    SelectionSet selection;
    while (true) {
      if (cfg_.max_iterations && result.iterations >= cfg_.max_iterations) {
        result.stop = StopReason::iteration_limit;
        break;
      }
      if (cfg_.time_limit > 0.0 && elapsed() >= cfg_.time_limit) {
        result.stop = StopReason::time_limit;
        break;
      }

      selector_->select_into(result.iterations, rng_, selection);
      const std::size_t moved = iterate(state, selection);
      result.updates += moved;
      result.proposals += selection.size();
      updates_since += moved;
      idle_proposals = moved ? 0 : idle_proposals + selection.size();
      ++result.iterations;

      if (updates_since >= k || idle_proposals >= k) {
        updates_since = 0;
        idle_proposals = 0;
        const double value = objective(cfg_.objective, data_, state.w, state.z);
        guard(value);
        sweep_objectives.push_back(value);
        if (cfg_.convergence_tol > 0.0 && check_convergence(sweep_objectives, cfg_.convergence_tol)) {
          result.stop = StopReason::converged;
          break;
        }
      }

      if (cfg_.trace_every_iterations > 0) {
        if (result.iterations % cfg_.trace_every_iterations == 0) record(elapsed());
      } else if (const double now = elapsed(); now >= next_trace_time) {
        record(now);
        next_trace_time = now + cfg_.trace_every_seconds;
      }
    }

    result.wall_time = elapsed();
    if (result.trace.back().iterations != result.iterations) record(result.wall_time);
    return result;
  }

 private:
  std::span<double> derivs() { return {derivs_.data(), static_cast<std::size_t>(derivs_.size())}; }

  std::size_t iterate(ModelState& state, const SelectionSet& selection) {
    switch (cfg_.strategy.kind) {
      case StrategyKind::shotgun: return shotgun(state, selection);
      case StrategyKind::thread_greedy: return thread_greedy(state, selection);
      default: return phased(state, selection);
    }
  }

  // Select -> Propose (parallel, frozen derivatives) -> Accept -> Update.
  std::size_t phased(ModelState& state, const SelectionSet& selection) {
    const int width = selection.size() > 1 ? threads_ : 1;
    propose_blocks(kernels_, state, derivs(), selection, width, proposals_);
    accepted_ = accept(cfg_.strategy, proposals_);
    const std::size_t applied = apply_blocks(kernels_, state, accepted_, width, scratch_);
    refresh_rows(kernels_, state, accepted_, derivs(), width);
    return applied;
  }

  // Propose and Update fused per coordinate, z written atomically.
  std::size_t shotgun(ModelState& state, const SelectionSet& selection) {
    const auto& J = selection.indices;
    const int threads = threads_;
    std::size_t applied = 0;
    scratch_.resize(std::max<std::size_t>(scratch_.size(), threads));
#pragma omp parallel num_threads(threads) if (threads > 1 && J.size() > 1) reduction(+ : applied)
    {
      const int team = omp_get_num_threads();
      ThreadScratch& mine = scratch_[omp_get_thread_num()];
      for (int b = omp_get_thread_num(); b < threads; b += team) {
        const auto [begin, end] = static_block(J.size(), threads, b);
        for (std::size_t i = begin; i < end; ++i) {
          if (kernels_.propose_and_apply(J[i], state, mine)) ++applied;
        }
      }
    }
    return applied;
  }

  // Each thread proposes over its block and applies its own best proposal;
  // no cross-thread reduction.
  std::size_t thread_greedy(ModelState& state, const SelectionSet& selection) {
    const auto& J = selection.indices;
    const int threads = threads_;
    proposals_.resize(threads);
    winners_.assign(threads, Proposal{});
    scratch_.resize(std::max<std::size_t>(scratch_.size(), threads));
    const std::span<const double> frozen = derivs();
    std::size_t applied = 0;
#pragma omp parallel num_threads(threads) if (threads > 1) reduction(+ : applied)
    {
      const int team = omp_get_num_threads();
      ThreadScratch& mine = scratch_[omp_get_thread_num()];
      for (int b = omp_get_thread_num(); b < threads; b += team) {
        const auto [begin, end] = static_block(J.size(), threads, b);
        auto& list = proposals_[b];
        list.clear();
        for (std::size_t i = begin; i < end; ++i) {
          list.push_back(kernels_.propose_frozen(J[i], state.w[J[i]], frozen));
        }
        if (const Proposal* best = best_proposal(list)) {
          winners_[b] = *best;
          if (kernels_.apply(*best, state, mine)) ++applied;
        }
      }
    }
    refresh_rows(kernels_, state, winners_, derivs(), threads);
    return applied;
  }

  const Dataset& data_;
  RunConfig cfg_;
  Kernels kernels_;
  const FeatureColoring* coloring_;
  std::optional<FeatureColoring> owned_coloring_;
  std::optional<Selector> selector_;
  Rng rng_;
  int threads_ = 1;

  Eigen::VectorXd derivs_;
  std::vector<std::vector<Proposal>> proposals_;
  std::vector<Proposal> accepted_;
  std::vector<Proposal> winners_;
  std::vector<ThreadScratch> scratch_;
};

}  // namespace

void RunConfig::validate() const {
  strategy.validate();
  if (objective.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (max_iterations == 0 && !(time_limit > 0.0) && !(convergence_tol > 0.0)) {
    throw std::invalid_argument("no stopping rule: set max_iterations, time_limit or tol");
  }
  if (refine.steps < 0) throw std::invalid_argument("refine steps must be >= 0");
  if (trace_every_iterations == 0 && !(trace_every_seconds > 0.0)) {
    throw std::invalid_argument("trace interval must be positive");
  }
}

DivergenceError::DivergenceError(StrategyKind strategy, Index width, double objective,
                                 double initial)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "objective diverged: " << to_string(strategy) << " with parallel width " << width
           << " reached " << objective << " from initial " << initial;
        return os.str();
      }()),
      strategy_(strategy),
      width_(width) {}

RunResult run(const Dataset& data, const RunConfig& cfg, const FeatureColoring* coloring) {
  cfg.validate();
  data.validate(cfg.objective.loss.kind == LossKind::logistic);
  Runner runner(data, cfg, coloring);
  return runner.run();
}

std::vector<std::vector<Proposal>> propose_phase(const Dataset& data,
                                                 const RegularizedObjective& obj,
                                                 const ModelState& state,
                                                 std::span<const double> loss_derivs,
                                                 const SelectionSet& selection, int threads) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  Kernels kernels(data, obj, RefineOptions{});
  std::vector<std::vector<Proposal>> out;
  propose_blocks(kernels, state, loss_derivs, selection, threads, out);
  return out;
}

std::size_t update_phase(const Dataset& data, const RegularizedObjective& obj,
                         ModelState& state, std::span<const Proposal> accepted,
                         const RefineOptions& refine, int threads) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  Kernels kernels(data, obj, refine);
  std::vector<ThreadScratch> scratch;
  return apply_blocks(kernels, state, accepted, threads, scratch);
}

bool check_convergence(std::span<const double> sweep_objectives, double tol) {
  if (sweep_objectives.size() < 2) return false;
  const double prev = sweep_objectives[sweep_objectives.size() - 2];
  const double cur = sweep_objectives.back();
  const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
  return std::abs(prev - cur) / scale < tol;
}

}  // namespace gencd
