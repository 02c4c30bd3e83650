#include "gencd/strategies.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace gencd {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::cyclic: return "cyclic";
    case StrategyKind::stochastic: return "stochastic";
    case StrategyKind::shotgun: return "shotgun";
    case StrategyKind::greedy: return "greedy";
    case StrategyKind::thread_greedy: return "thread-greedy";
    case StrategyKind::coloring: return "coloring";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  if (name == "cyclic") return StrategyKind::cyclic;
  if (name == "stochastic") return StrategyKind::stochastic;
  if (name == "shotgun") return StrategyKind::shotgun;
  if (name == "greedy") return StrategyKind::greedy;
  if (name == "thread-greedy" || name == "thread_greedy") return StrategyKind::thread_greedy;
  if (name == "coloring") return StrategyKind::coloring;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

void StrategyConfig::validate() const {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (shotgun_p < 0) throw std::invalid_argument("subset size must be >= 1");
}

Selector::Selector(const StrategyConfig& cfg, Index k, const FeatureColoring* coloring)
    : cfg_(cfg), k_(k), coloring_(coloring) {
  cfg_.validate();
  if (k_ < 1) throw std::invalid_argument("selector needs at least one feature");
  if ((cfg_.kind == StrategyKind::coloring) != (coloring_ != nullptr)) {
    throw std::invalid_argument(cfg_.kind == StrategyKind::coloring
                                    ? "coloring strategy requires a feature coloring"
                                    : "feature coloring given to a non-coloring strategy");
  }
  if (coloring_ && static_cast<Index>(coloring_->color_of.size()) != k_) {
    throw std::invalid_argument("feature coloring does not match feature count");
  }
  const bool needs_subset =
      cfg_.kind == StrategyKind::shotgun ||
      (cfg_.kind == StrategyKind::thread_greedy &&
       cfg_.thread_greedy_select == ThreadGreedySelect::random_subset);
  if (needs_subset) {
    if (cfg_.shotgun_p == 0) {
      if (cfg_.kind == StrategyKind::shotgun) {
        throw std::invalid_argument("shotgun subset size must be resolved before selection");
      }
      cfg_.shotgun_p = std::max<Index>(1, k_ / 2);
    }
    cfg_.shotgun_p = std::min(cfg_.shotgun_p, k_);
    perm_.resize(k_);
    std::iota(perm_.begin(), perm_.end(), Index{0});
  }
}

SelectionSet Selector::select(std::uint64_t iteration, Rng& rng) {
  SelectionSet out;
  select_into(iteration, rng, out);
  return out;
}

void Selector::random_subset(Index size, Rng& rng, SelectionSet& out) {
  // Partial Fisher-Yates; perm_ stays a permutation between calls.
  for (Index i = 0; i < size; ++i) {
    std::uniform_int_distribution<Index> pick(i, k_ - 1);
    std::swap(perm_[i], perm_[pick(rng)]);
  }
  out.indices.assign(perm_.begin(), perm_.begin() + size);
}

void Selector::select_into(std::uint64_t iteration, Rng& rng, SelectionSet& out) {
  switch (cfg_.kind) {
    case StrategyKind::cyclic:
      out.indices.assign(1, static_cast<Index>(iteration % static_cast<std::uint64_t>(k_)));
      return;
    case StrategyKind::stochastic: {
      std::uniform_int_distribution<Index> pick(0, k_ - 1);
      out.indices.assign(1, pick(rng));
      return;
    }
    case StrategyKind::shotgun:
      random_subset(cfg_.shotgun_p, rng, out);
      return;
    case StrategyKind::thread_greedy:
      if (cfg_.thread_greedy_select == ThreadGreedySelect::random_subset) {
        random_subset(cfg_.shotgun_p, rng, out);
        return;
      }
      [[fallthrough]];
    case StrategyKind::greedy:
      if (static_cast<Index>(out.indices.size()) != k_) {
        out.indices.resize(k_);
        std::iota(out.indices.begin(), out.indices.end(), Index{0});
      }
      return;
    case StrategyKind::coloring: {
      int color = 0;
      if (cfg_.color_select == ColorSelect::uniform_color) {
        std::uniform_int_distribution<int> pick(0, coloring_->num_colors() - 1);
        color = pick(rng);
      } else {
        std::uniform_int_distribution<Index> pick(0, k_ - 1);
        color = coloring_->color_of[pick(rng)];
      }
      const auto& cls = coloring_->classes[color];
      out.indices.assign(cls.begin(), cls.end());
      return;
    }
  }
}

SelectionSet select(const StrategyConfig& cfg, std::uint64_t iteration, Index k,
                    const FeatureColoring* coloring, Rng& rng) {
  Selector selector(cfg, k, coloring);
  return selector.select(iteration, rng);
}

const Proposal* best_proposal(std::span<const Proposal> proposals) {
  const Proposal* best = nullptr;
  for (const auto& p : proposals) {
    if (p.delta == 0.0 || !(p.proxy < 0.0)) continue;
    if (!best || p.proxy < best->proxy || (p.proxy == best->proxy && p.j < best->j)) best = &p;
  }
  return best;
}

std::vector<Proposal> accept(const StrategyConfig& cfg,
                             std::span<const std::vector<Proposal>> per_thread) {
  std::vector<Proposal> accepted;
  switch (cfg.kind) {
    case StrategyKind::greedy: {
      const Proposal* best = nullptr;
      for (const auto& list : per_thread) {
        const Proposal* local = best_proposal(list);
        if (local && (!best || local->proxy < best->proxy ||
                      (local->proxy == best->proxy && local->j < best->j))) {
          best = local;
        }
      }
      if (best) accepted.push_back(*best);
      break;
    }
    case StrategyKind::thread_greedy:
      for (const auto& list : per_thread) {
        if (const Proposal* local = best_proposal(list)) accepted.push_back(*local);
      }
      break;
    default:
      for (const auto& list : per_thread) {
        for (const auto& p : list) {
          if (p.delta != 0.0) accepted.push_back(p);
        }
      }
      break;
  }
  return accepted;
}

}  // namespace gencd
