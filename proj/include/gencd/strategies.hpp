#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "gencd/coloring.hpp"
#include "gencd/proposals.hpp"
#include "gencd/sparse_data.hpp"

namespace gencd {

enum class StrategyKind { cyclic, stochastic, shotgun, greedy, thread_greedy, coloring };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view name);

/// Whether a strategy's Accept step is a non-trivial (proxy based) choice.
constexpr bool is_greedy(StrategyKind kind) {
  return kind == StrategyKind::greedy || kind == StrategyKind::thread_greedy;
}

enum class ThreadGreedySelect { all, random_subset };
enum class ColorSelect { uniform_color, size_weighted };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::cyclic;
  /// Subset size for shotgun, and for thread_greedy in random_subset mode.
  /// Zero means "derive it": P* for shotgun, k / 2 for thread_greedy.
  Index shotgun_p = 0;
  int threads = 1;
  std::uint64_t rng_seed = 42;
  ThreadGreedySelect thread_greedy_select = ThreadGreedySelect::all;
  ColorSelect color_select = ColorSelect::uniform_color;

  /// Throws std::invalid_argument on threads < 1 or a negative subset size.
  void validate() const;
};

/// Coordinates to propose in one iteration; distinct and < k.
struct SelectionSet {
  std::vector<Index> indices;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

using Rng = std::mt19937_64;

/// Select step. Keeps a scratch permutation so that drawing a random subset
/// costs O(subset) rather than O(k).
class Selector {
 public:
  /// `coloring` must be non-null exactly when cfg.kind is coloring; it has
  /// to outlive the selector. `shotgun_p` must already be resolved (>= 1) for
  /// shotgun.
  Selector(const StrategyConfig& cfg, Index k, const FeatureColoring* coloring);

  SelectionSet select(std::uint64_t iteration, Rng& rng);

  /// Fills `out` in place, reusing its storage.
  void select_into(std::uint64_t iteration, Rng& rng, SelectionSet& out);

 private:
  void random_subset(Index size, Rng& rng, SelectionSet& out);

  StrategyConfig cfg_;
  Index k_;
  const FeatureColoring* coloring_;
  std::vector<Index> perm_;
};

/// One-shot form of Selector::select.
SelectionSet select(const StrategyConfig& cfg, std::uint64_t iteration, Index k,
                    const FeatureColoring* coloring, Rng& rng);

/// Best proposal in one list: minimal proxy, ties to the smallest index.
/// Returns nullptr when no proposal has proxy < 0.
const Proposal* best_proposal(std::span<const Proposal> proposals);

/// Accept step over per-thread proposal lists; returns accepted proposals
/// (every one with delta != 0).
///   cyclic, stochastic, shotgun, coloring: all nonzero proposals.
///   greedy: the single global best.
///   thread_greedy: the best of each thread's list.
std::vector<Proposal> accept(const StrategyConfig& cfg,
                             std::span<const std::vector<Proposal>> per_thread);

/// Contiguous static block [begin, end) of `count` items owned by `thread`;
/// the first count % threads blocks get one extra item.
constexpr std::pair<std::size_t, std::size_t> static_block(std::size_t count, int threads,
                                                           int thread) {
  const std::size_t t = static_cast<std::size_t>(threads);
  const std::size_t b = static_cast<std::size_t>(thread);
  const std::size_t q = count / t;
  const std::size_t r = count % t;
  const std::size_t begin = b * q + std::min(b, r);
  return {begin, begin + q + (b < r ? 1 : 0)};
}

}  // namespace gencd
