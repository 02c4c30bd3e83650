#include "gencd/coloring.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace gencd {

FeatureColoring color_features(const DesignMatrix& x, ColoringOrder order) {
  const Index k = x.n_features();
  FeatureColoring out;
  out.color_of.assign(k, -1);

  // Features already colored, grouped by the rows they touch.
  std::vector<std::vector<Index>> row_features(x.n_samples());
  // forbidden_by[c] == j marks color c as unavailable for feature j.
  std::vector<Index> forbidden_by;

  for (Index j = 0; j < k; ++j) {
    const ColumnView col = x.column(j);
    for (int r : col.rows) {
      for (Index other : row_features[r]) forbidden_by[out.color_of[other]] = j;
    }

    int chosen = -1;
    if (order == ColoringOrder::first_fit) {
      for (int c = 0; c < out.num_colors(); ++c) {
        if (forbidden_by[c] != j) {
          chosen = c;
          break;
        }
      }
    } else {
      std::size_t best_size = std::numeric_limits<std::size_t>::max();
      for (int c = 0; c < out.num_colors(); ++c) {
        if (forbidden_by[c] != j && out.classes[c].size() < best_size) {
          best_size = out.classes[c].size();
          chosen = c;
        }
      }
    }
    if (chosen < 0) {
      chosen = out.num_colors();
      out.classes.emplace_back();
      forbidden_by.push_back(-1);
    }

    out.color_of[j] = chosen;
    out.classes[chosen].push_back(j);
    for (int r : col.rows) row_features[r].push_back(j);
  }
  return out;
}

ColoringStats coloring_stats(const FeatureColoring& c) {
  ColoringStats s;
  s.num_colors = c.num_colors();
  if (c.classes.empty()) return s;
  Index total = 0;
  s.min_class_size = std::numeric_limits<Index>::max();
  for (const auto& cls : c.classes) {
    const auto size = static_cast<Index>(cls.size());
    total += size;
    s.min_class_size = std::min(s.min_class_size, size);
    s.max_class_size = std::max(s.max_class_size, size);
  }
  s.mean_class_size = static_cast<double>(total) / s.num_colors;
  return s;
}

bool is_valid_coloring(const DesignMatrix& x, const FeatureColoring& c) {
  const Index k = x.n_features();
  if (static_cast<Index>(c.color_of.size()) != k) return false;
  Index seen = 0;
  std::vector<Index> row_owner(x.n_samples(), -1);
  for (int color = 0; color < c.num_colors(); ++color) {
    const auto& cls = c.classes[color];
    if (std::adjacent_find(cls.begin(), cls.end(), std::greater_equal<>()) != cls.end()) {
      return false;
    }
    // row_owner stamps rows with the color that last claimed them; a second
    // claim within one color is a conflict.
    for (Index j : cls) {
      if (j < 0 || j >= k || c.color_of[j] != color) return false;
      ++seen;
      for (int r : x.column(j).rows) {
        if (row_owner[r] == color) return false;
        row_owner[r] = color;
      }
    }
  }
  return seen == k;
}

}  // namespace gencd
