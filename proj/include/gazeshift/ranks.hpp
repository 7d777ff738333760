#pragma once

#include <span>
#include <vector>

namespace gazeshift {

struct Ranking {
  std::vector<double> midranks;  ///< 1-based, ties share the mean of their positions
  double tie_term = 0.0;         ///< sum over tie groups of (t^3 - t)
  bool has_ties = false;
};

/// Midranks of `values` in input order. Ties are exact equality; NaN is not allowed.
Ranking rank_with_midranks(std::span<const double> values);

}  // namespace gazeshift
