#include "prony/pencil_solver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "prony/errors.hpp"
#include "prony/parallel.hpp"

namespace prony {

namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();
constexpr double kIllConditionedW = 1e8;

}  // namespace

DenseMatrix compute_S_from_product(const ReducedSVD& svd, const DenseMatrix& mv) {
  const Index r = svd.rank();
  if (r == 0) throw InputError("cannot form the pencil of a rank-zero factorisation");
  if (mv.rows() != svd.u.rows() || mv.cols() != r) throw InputError("product shape does not match the factorisation");
  const double smallest = svd.sigma.minCoeff();
  if (!(smallest > std::numeric_limits<double>::min()) || !std::isfinite(1.0 / smallest)) {
    throw SingularScaleError("smallest retained singular value cannot be inverted");
  }
  DenseMatrix s = svd.u.adjoint() * mv;
  for (Index j = 0; j < r; ++j) s.col(j) /= svd.sigma(j);
  return s;
}

DenseMatrix compute_S(const ReducedSVD& svd, const DenseMatrix& t_ell, const WorkerPool* pool) {
  if (t_ell.cols() != svd.v.rows()) throw InputError("shifted matrix does not match the factorisation");
  return compute_S_from_product(svd, panel_multiply(t_ell, svd.v, pool));
}

ComplexVector random_mu(int dim, std::uint64_t seed) {
  if (dim < 1) throw InputError("mu needs d >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  ComplexVector mu(dim);
  do {
    for (int i = 0; i < dim; ++i) {
      const double re = normal(gen);
      mu(i) = Complex(re, normal(gen));
    }
  } while (mu.norm() == 0.0);
  return mu / mu.norm();
}

Eigendecomposition eigendecompose(const DenseMatrix& c) {
  if (c.rows() < 1 || c.rows() != c.cols()) throw InputError("eigendecomposition needs a nonempty square matrix");
  if (!c.allFinite()) throw InputError("matrix has non-finite entries");
  const Index m = c.rows();
  Eigen::ComplexEigenSolver<DenseMatrix> solver;
  solver.setMaxIterations(30 * m);
  solver.compute(c, true);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("Schur iteration did not converge", static_cast<int>(30 * m), 0);
  }
  Eigendecomposition out{solver.eigenvectors(), solver.eigenvalues()};
  for (Index j = 0; j < m; ++j) out.w.col(j).normalize();
  const double limit = 1e-10 * c.norm();
  for (Index j = 0; j < m; ++j) {
    const double residual = (c * out.w.col(j) - out.values(j) * out.w.col(j)).norm();
    if (!(residual <= limit)) {
      throw ConvergenceError("eigenpair residual above tolerance", static_cast<int>(30 * m), 0);
    }
  }
  return out;
}

double min_eigen_gap(const ComplexVector& values) {
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < values.size(); ++i) {
    for (Index j = i + 1; j < values.size(); ++j) gap = std::min(gap, std::abs(values(i) - values(j)));
  }
  return gap;
}

bool eigenvalues_collide(const ComplexVector& values, double c_norm_f) {
  return min_eigen_gap(values) < 1e3 * kMachineEps * c_norm_f;
}

NodeSet simultaneous_diagonalize(const PencilSet& pencil, Index n_points) {
  const Index m = pencil.w.rows();
  if (m < 1 || pencil.w.cols() != m || pencil.s.empty()) throw InputError("pencil is empty or W is not square");
  for (const auto& s : pencil.s) {
    if (s.rows() != m || s.cols() != m) throw InputError("pencil matrices differ in size from W");
  }
  const Eigen::JacobiSVD<DenseMatrix> w_svd(pencil.w);
  const RealVector& sw = w_svd.singularValues();
  NodeSet out;
  out.sigma_min_w = sw(m - 1);
  out.kappa_w = out.sigma_min_w > 0.0 ? sw(0) / out.sigma_min_w : std::numeric_limits<double>::infinity();
  const double scale = static_cast<double>(std::max<Index>(n_points, m));
  if (!(out.sigma_min_w > scale * kMachineEps * sw(0))) {
    throw SingularBasisError("eigenvector matrix is numerically singular; redraw mu");
  }
  if (out.kappa_w > kIllConditionedW) {
    std::ostringstream msg;
    msg << "eigenvector matrix is ill-conditioned (kappa=" << out.kappa_w << ")";
    out.warnings.push_back(msg.str());
  }

  const Eigen::PartialPivLU<DenseMatrix> lu(pencil.w);
  const int d = static_cast<int>(pencil.s.size());
  out.z.resize(m, d);
  out.offdiag.resize(static_cast<std::size_t>(d));
  for (int ell = 0; ell < d; ++ell) {
    const DenseMatrix x = lu.solve(pencil.s[static_cast<std::size_t>(ell)] * pencil.w);
    out.z.col(ell) = x.diagonal();
    DenseMatrix off = x;
    off.diagonal().setZero();
    const double total = x.norm();
    out.offdiag[static_cast<std::size_t>(ell)] = total > 0.0 ? off.norm() / total : 0.0;
  }
  for (Index j = 0; j < m; ++j) {
    for (int ell = 0; ell < d; ++ell) {
      const double modulus = std::abs(out.z(j, ell));
      if (modulus < 0.5 || modulus > 1.5) out.modulus_ok = false;
    }
  }
  if (!out.modulus_ok) out.warnings.emplace_back("recovered node modulus outside [0.5, 1.5]");
  out.t = extract_t(out.z);
  return out;
}

RealMatrix extract_t(const DenseMatrix& z) {
  RealMatrix t(z.rows(), z.cols());
  for (Index j = 0; j < z.rows(); ++j) {
    for (Index i = 0; i < z.cols(); ++i) {
      if (z(j, i) == Complex(0.0, 0.0)) throw DomainError("node component is zero");
      double v = -std::arg(z(j, i)) / kTwoPi;
      v -= std::floor(v);
      if (v >= 1.0) v = 0.0;
      t(j, i) = v;
    }
  }
  return t;
}

}  // namespace prony
