#pragma once

#include <vector>

#include "gencd/sparse_data.hpp"

namespace gencd {

/// Assignment of features to color classes such that two features with the
/// same color never share a row. classes[c] is sorted ascending and the
/// classes partition {0, ..., k-1}.
struct FeatureColoring {
  std::vector<int> color_of;
  std::vector<std::vector<Index>> classes;

  int num_colors() const { return static_cast<int>(classes.size()); }
};

enum class ColoringOrder {
  /// Smallest admissible color (first fit).
  first_fit,
  /// Least-populated admissible color; opens a new color only when every
  /// existing one conflicts.
  balanced,
};

/// Partial distance-2 coloring of the bipartite row/feature graph, greedy
/// over features in ascending index order.
FeatureColoring color_features(const DesignMatrix& x,
                               ColoringOrder order = ColoringOrder::first_fit);

struct ColoringStats {
  int num_colors = 0;
  double mean_class_size = 0.0;
  Index min_class_size = 0;
  Index max_class_size = 0;
};

ColoringStats coloring_stats(const FeatureColoring& c);

/// True iff same-colored features have pairwise disjoint row supports and
/// the classes are consistent with color_of.
bool is_valid_coloring(const DesignMatrix& x, const FeatureColoring& c);

}  // namespace gencd
