#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prony/reduced_svd.hpp"
#include "prony/types.hpp"

namespace prony {

class WorkerPool;

/// S = U^* M V Sigma^-1 where M V is already available (M is T_ell or B_mu).
/// \throws SingularScaleError if the smallest sigma cannot be inverted.
DenseMatrix compute_S_from_product(const ReducedSVD& svd, const DenseMatrix& mv);

/// S_ell = U^* T_ell V Sigma^-1.
DenseMatrix compute_S(const ReducedSVD& svd, const DenseMatrix& t_ell,
                      const WorkerPool* pool = nullptr);

/// Complex Gaussian vector normalised to unit 2-norm, deterministic in seed.
ComplexVector random_mu(int dim, std::uint64_t seed);

struct Eigendecomposition {
  DenseMatrix w;          ///< unit-norm eigenvectors as columns
  ComplexVector values;
};

/// Schur-based eigendecomposition of a general complex matrix.
/// \throws ConvergenceError if the QR iteration needs more than 30 m sweeps
/// or an eigenpair residual exceeds 1e-10 ||C||_F.
Eigendecomposition eigendecompose(const DenseMatrix& c);

/// min_{i != j} |lambda_i - lambda_j|; +inf for a single value.
double min_eigen_gap(const ComplexVector& values);

/// True when two eigenvalues are closer than 1e3 eps ||C||_F.
bool eigenvalues_collide(const ComplexVector& values, double c_norm_f);

struct PencilSet {
  std::vector<DenseMatrix> s;   ///< S_1, ..., S_d
  ComplexVector mu;             ///< unit combination weights
  DenseMatrix c_mu;             ///< sum_ell mu_ell S_ell
  DenseMatrix w;                ///< eigenvectors of C_mu
  ComplexVector eigvals;
};

struct NodeSet {
  DenseMatrix z;                ///< m x d, z_j(ell) on row j
  RealMatrix t;                 ///< m x d, in [0,1)
  std::vector<double> offdiag;  ///< ||D_ell - diag(D_ell)||_F / ||D_ell||_F per ell
  double kappa_w = 0.0;
  double sigma_min_w = 0.0;
  bool modulus_ok = true;       ///< every |z_j(ell)| within [0.5, 1.5]
  std::vector<std::string> warnings;
};

/// Extracts the diagonals of W^-1 S_ell W through an LU solve with W.
/// \param n_points  N, the size of the index set; scales the singularity guard.
/// \throws SingularBasisError when sigma_min(W) <= N eps ||W||_2.
NodeSet simultaneous_diagonalize(const PencilSet& pencil, Index n_points);

/// t = (-arg z / 2 pi) mod 1, componentwise.
/// \throws DomainError for a zero component.
RealMatrix extract_t(const DenseMatrix& z);

}  // namespace prony
