#pragma once

#include "prony/matrix_assembly.hpp"
#include "prony/types.hpp"

namespace prony {

class WorkerPool;

/// A(j, col(k)) = prod_i z_j(i)^k(i), from per-axis power tables.
DenseMatrix build_A(const DenseMatrix& z, const IndexSet& idx, const WorkerPool* pool = nullptr);

struct LeastSquaresResult {
  ComplexVector c;
  double residual_rel = 0.0;   ///< ||A^T c - f|| / ||f||
  double cond_a = 0.0;         ///< sigma_max(A) / sigma_min(A)
};

/// argmin_c ||A^T c - f||_2 via Householder QR of A^T.
/// \throws InputError if N < m or shapes disagree.
/// \throws RankDeficiencyError if some |R(i,i)| <= N eps ||A||_F.
LeastSquaresResult solve_ls(const DenseMatrix& a, const ComplexVector& f);

}  // namespace prony
