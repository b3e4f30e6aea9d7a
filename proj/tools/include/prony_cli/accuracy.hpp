#pragma once

#include <vector>

#include <prony/signal_model.hpp>

namespace prony::cli {

/// Recovered terms paired with ground-truth terms.
struct Matching {
  /// truth index for each recovered row, -1 when the row stays unmatched
  std::vector<int> truth_of;
  double max_t_error = 0.0;  ///< over matched pairs, mod-1 per component
  double rel_c_error = 0.0;  ///< unmatched truth terms count with their full coefficient
};

/// Greedy matching on the mod-1 sup-distance: repeatedly pairs the closest
/// remaining (recovered, truth) rows.
Matching match_to_truth(const RealMatrix& t, const ComplexVector& c, const ExponentialSum& truth);

}  // namespace prony::cli
