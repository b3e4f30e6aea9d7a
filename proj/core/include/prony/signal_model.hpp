#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prony/types.hpp"

namespace prony {

class WorkerPool;

/// Sparse exponential sum  f(k) = sum_j c_j exp(-2 pi i <t_j, k>)  on Z^d.
///
/// Parameters live on the torus [0,1)^d; coefficients are nonzero. The
/// object is immutable once constructed.
class ExponentialSum {
 public:
  /// \param params  m x d matrix, row j holds t_j.
  /// \param coeffs  length-m vector of nonzero coefficients.
  /// \throws InputError if any invariant is violated.
  ExponentialSum(RealMatrix params, ComplexVector coeffs);

  /// Same as the constructor but first reduces every parameter modulo 1.
  static ExponentialSum wrapped(RealMatrix params, ComplexVector coeffs);

  int dim() const noexcept { return static_cast<int>(params_.cols()); }
  int terms() const noexcept { return static_cast<int>(params_.rows()); }
  const RealMatrix& params() const noexcept { return params_; }
  const ComplexVector& coeffs() const noexcept { return coeffs_; }

  /// f(k). Each inner product is reduced modulo 1 before exponentiation.
  Complex evaluate(std::span<const int> k) const;

 private:
  RealMatrix params_;
  ComplexVector coeffs_;
};

/// Relative noise model: samples become f(k)(1 + delta_k) with |delta_k| <= epsilon.
struct NoiseModel {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// Perturbation delta_k for one lattice point; a pure function of (noise, k).
Complex noise_factor(const NoiseModel& noise, std::span<const int> k);

/// Samples over the box {-n, ..., n+1}^d, lexicographic with last coordinate fastest.
class SampleGrid {
 public:
  SampleGrid(int dim, int n, std::vector<Complex> values);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  /// Points per axis, 2n + 2.
  int side() const noexcept { return 2 * n_ + 2; }
  const std::vector<Complex>& values() const noexcept { return values_; }

  /// Linear position of lattice point k inside the box.
  Index offset(std::span<const int> k) const;
  Complex at(std::span<const int> k) const { return values_[static_cast<std::size_t>(offset(k))]; }

  /// Lattice point at a linear position (inverse of offset).
  std::vector<int> point(Index linear) const;

  bool operator==(const SampleGrid&) const = default;

 private:
  int dim_;
  int n_;
  std::vector<Complex> values_;
};

/// Number of points in the sample box, (2n+2)^d.
Index box_size(int dim, int n);

/// Samples sum over {-n..n+1}^d with relative noise drawn from noise.seed.
SampleGrid sample_grid(const ExponentialSum& sum, int n, const NoiseModel& noise,
                       const WorkerPool* pool = nullptr);

/// Benchmark family: t_j(i) = ((i-1) m + j - 1) 10^-p with p = ceil(log10(d m)),
/// c_j = j + i j (i the imaginary unit).
ExponentialSum standard_test_family(int dim, int terms);

}  // namespace prony
