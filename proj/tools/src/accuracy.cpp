#include "prony_cli/accuracy.hpp"

#include <algorithm>
#include <tuple>

namespace prony::cli {

Matching match_to_truth(const RealMatrix& t, const ComplexVector& c, const ExponentialSum& truth) {
  const Index rec = t.rows();
  const Index m = truth.terms();
  std::vector<std::tuple<double, Index, Index>> pairs;
  for (Index r = 0; r < rec; ++r) {
    for (Index j = 0; j < m; ++j) {
      double dist = 0.0;
      for (Index i = 0; i < t.cols(); ++i) dist = std::max(dist, mod1_distance(t(r, i), truth.params()(j, i)));
      pairs.emplace_back(dist, r, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  Matching out;
  out.truth_of.assign(static_cast<std::size_t>(rec), -1);
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  ComplexVector aligned = ComplexVector::Zero(m);
  for (const auto& [dist, r, j] : pairs) {
    if (out.truth_of[static_cast<std::size_t>(r)] >= 0 || used[static_cast<std::size_t>(j)]) continue;
    out.truth_of[static_cast<std::size_t>(r)] = static_cast<int>(j);
    used[static_cast<std::size_t>(j)] = true;
    out.max_t_error = std::max(out.max_t_error, dist);
    aligned(j) = c(r);
  }
  out.rel_c_error = (aligned - truth.coeffs()).norm() / truth.coeffs().norm();
  return out;
}

}  // namespace prony::cli
