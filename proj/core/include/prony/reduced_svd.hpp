#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "prony/types.hpp"

namespace prony {

class WorkerPool;

/// How small a singular value must be to count as zero.
struct RankCriterion {
  enum class Mode { machine, noise };

  Mode mode = Mode::machine;
  double tol = 0.0;

  /// tol = N * machine epsilon, relative to sigma_1.
  static RankCriterion machine(Index n);
  /// tol = user epsilon (expected relative noise level).
  static RankCriterion noise(double epsilon);

  /// Number of leading values with sigma_i >= tol * sigma_1.
  int rank_of(const RealVector& sigma) const;
};

enum class SvdBackend { dense, lanczos, power };

std::string_view to_string(SvdBackend backend);
/// \throws InputError on an unknown name.
SvdBackend parse_svd_backend(std::string_view name);

/// Thin factorisation A ~ U diag(sigma) V^* restricted to the detected rank.
struct ReducedSVD {
  DenseMatrix u;
  RealVector sigma;
  DenseMatrix v;

  /// Complete spectrum when the backend computed one (dense only).
  std::optional<RealVector> full_spectrum;
  /// Backend iteration count (Lanczos steps or power iterations).
  int iterations = 0;
  /// Lanczos restart checks that found the recursion was not finished.
  int restarts = 0;
  /// Lanczos restart checks performed in total.
  int restart_checks = 0;

  int rank() const noexcept { return static_cast<int>(sigma.size()); }
};

/// Full SVD (Householder bidiagonalisation + divide and conquer), truncated
/// by the criterion. \throws InputError for non-finite entries.
ReducedSVD dense_svd(const DenseMatrix& a, const RankCriterion& criterion);

struct LanczosOptions {
  /// Cap on bidiagonalisation steps is 4 * expected_rank + 40 when set,
  /// otherwise min(rows, cols) + 40.
  std::optional<int> expected_rank;
  std::uint64_t seed = 0;
};

/// Golub-Kahan-Lanczos bidiagonalisation with full reorthogonalisation.
///
/// Stops when alpha or beta drops below tol * ||A||_F and then checks
/// whether the accumulated basis spans the whole range. If a random vector
/// orthogonal to the basis is not in the relevant null space, the
/// recursion continues from that vector. The reduced SVD is read off the
/// small bidiagonal factor.
///
/// \throws InputError if p1 is zero or has the wrong length.
/// \throws ConvergenceError when the step cap is exceeded.
ReducedSVD lanczos_svd(const DenseMatrix& a, const ComplexVector& p1,
                       const RankCriterion& criterion, const LanczosOptions& options = {},
                       const WorkerPool* pool = nullptr);

struct PowerOptions {
  int max_iterations = 100;
};

/// Block power method with rank determination from a column-pivoted QR of
/// A^* U_1 in the first sweep.
///
/// \param r0  overestimate of the rank; u0, v0 have r0 orthonormal columns.
/// \throws RankOverflowError if no drop is found inside the r0 block.
/// \throws ConvergenceError when max_iterations is exceeded.
ReducedSVD power_svd(const DenseMatrix& a, int r0, const DenseMatrix& u0, const DenseMatrix& v0,
                     const RankCriterion& criterion, const PowerOptions& options = {},
                     const WorkerPool* pool = nullptr);

/// A P = Q R with |R(i,i)| nonincreasing.
struct PivotedQR {
  DenseMatrix q;                ///< rows x k, k = min(rows, cols), orthonormal columns
  DenseMatrix r;                ///< k x cols, upper triangular
  std::vector<Index> perm;      ///< column j of A P is column perm[j] of A
};

PivotedQR pivoted_qr(const DenseMatrix& a);

/// Smallest i with ||R(i:k, i:k)||_F <= tol * ||R||_F, or k when there is no drop.
int rank_from_pivoted_r(const DenseMatrix& r, double tol);

/// Orthonormalised columns of a seeded complex Gaussian rows x cols matrix.
DenseMatrix random_orthonormal(Index rows, Index cols, std::uint64_t seed);

/// Seeded complex Gaussian vector.
ComplexVector random_complex_vector(Index size, std::uint64_t seed);

}  // namespace prony
