#include "prony/reduced_svd.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "prony/errors.hpp"
#include "prony/parallel.hpp"

namespace prony {

namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0x9E3779B97F4A7C15ULL);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Keeps the leading singular triplets that pass the criterion.
void truncate(ReducedSVD& svd, const RankCriterion& criterion) {
  const int r = criterion.rank_of(svd.sigma);
  if (r == svd.rank()) return;
  svd.sigma.conservativeResize(r);
  svd.u.conservativeResize(Eigen::NoChange, r);
  svd.v.conservativeResize(Eigen::NoChange, r);
}

struct SmallSvd {
  DenseMatrix u;
  RealVector sigma;
  DenseMatrix v;
};

SmallSvd small_svd(const DenseMatrix& a) {
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

DenseMatrix thin_q(const DenseMatrix& a, DenseMatrix* r = nullptr) {
  Eigen::HouseholderQR<DenseMatrix> qr(a);
  const Index k = std::min(a.rows(), a.cols());
  if (r) *r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return qr.householderQ() * DenseMatrix::Identity(a.rows(), k);
}

ComplexVector mat_vec(const DenseMatrix& a, const ComplexVector& x, const WorkerPool* pool) {
  return panel_multiply(a, x, pool).col(0);
}

ComplexVector adj_vec(const DenseMatrix& a, const ComplexVector& x, const WorkerPool* pool) {
  return panel_adjoint_multiply(a, x, pool).col(0);
}

// Two passes of modified Gram-Schmidt against every stored column.
void reorthogonalize(ComplexVector& x, const std::vector<ComplexVector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) x -= q * q.dot(x);
  }
}

DenseMatrix stack(const std::vector<ComplexVector>& cols, Index rows, std::size_t count) {
  DenseMatrix out(rows, static_cast<Index>(count));
  for (std::size_t j = 0; j < count; ++j) out.col(static_cast<Index>(j)) = cols[j];
  return out;
}

}  // namespace

RankCriterion RankCriterion::machine(Index n) {
  return {Mode::machine, static_cast<double>(n) * kMachineEps};
}

RankCriterion RankCriterion::noise(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("noise tolerance must be finite and >= 0");
  return {Mode::noise, epsilon};
}

int RankCriterion::rank_of(const RealVector& sigma) const {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
  const double cut = tol * sigma(0);
  int r = 0;
  while (r < sigma.size() && sigma(r) > 0.0 && sigma(r) >= cut) ++r;
  return r;
}

std::string_view to_string(SvdBackend backend) {
  switch (backend) {
    case SvdBackend::dense: return "dense";
    case SvdBackend::lanczos: return "lanczos";
    case SvdBackend::power: return "power";
  }
  return "unknown";
}

SvdBackend parse_svd_backend(std::string_view name) {
  if (name == "dense") return SvdBackend::dense;
  if (name == "lanczos") return SvdBackend::lanczos;
  if (name == "power") return SvdBackend::power;
  throw InputError("unknown SVD backend '" + std::string(name) + "'");
}

ReducedSVD dense_svd(const DenseMatrix& a, const RankCriterion& criterion) {
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  ReducedSVD out;
  if (a.size() == 0) return out;
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  out.full_spectrum = out.sigma;
  truncate(out, criterion);
  return out;
}

ReducedSVD lanczos_svd(const DenseMatrix& a, const ComplexVector& p1, const RankCriterion& criterion,
                       const LanczosOptions& options, const WorkerPool* pool) {
  if (p1.size() != a.cols()) throw InputError("start vector length differs from column count");
  if (!a.allFinite() || !p1.allFinite()) throw InputError("non-finite input");
  const double beta1 = p1.norm();
  if (!(beta1 > 0.0)) throw InputError("start vector is zero");

  ReducedSVD out;
  const double norm_a = a.norm();
  if (norm_a == 0.0) return out;
  const double stop = criterion.tol * norm_a;
  const Index rows = a.rows();
  const Index cols = a.cols();
  const int cap = options.expected_rank ? 4 * *options.expected_rank + 40
                                        : static_cast<int>(std::min(rows, cols)) + 40;

  std::vector<ComplexVector> us;
  std::vector<ComplexVector> vs{p1 / beta1};
  std::vector<double> alpha;  // B(j, j)
  std::vector<double> beta;   // B(j, j+1)

  auto bidiagonal = [&](std::size_t r, std::size_t c) {
    DenseMatrix b = DenseMatrix::Zero(static_cast<Index>(r), static_cast<Index>(c));
    for (std::size_t j = 0; j < r; ++j) {
      if (j < c) b(static_cast<Index>(j), static_cast<Index>(j)) = alpha[j];
      if (j + 1 < c) b(static_cast<Index>(j), static_cast<Index>(j + 1)) = beta[j];
    }
    return b;
  };

  // Random vector orthogonal to basis; false when it lies in the null space
  // of op (or the basis already spans everything), i.e. the recursion is done.
  std::uint64_t check_index = 0;
  auto restart = [&](const std::vector<ComplexVector>& basis, Index size, bool adjoint, ComplexVector& next) {
    ++out.restart_checks;
    ComplexVector y = random_complex_vector(size, mix_seed(options.seed, ++check_index));
    const double y0 = y.norm();
    reorthogonalize(y, basis);
    const double ny = y.norm();
    if (ny <= 1e-10 * y0) return false;
    const double image = adjoint ? adj_vec(a, y, pool).norm() : mat_vec(a, y, pool).norm();
    if (image <= criterion.tol * norm_a * ny) return false;
    ++out.restarts;
    next = y / ny;
    return true;
  };

  bool alpha_stop = false;
  double coupling = 0.0;  // beta_i multiplying u_{i-1}
  for (;;) {
    if (out.iterations >= cap) {
      RealVector partial;
      if (!us.empty()) partial = small_svd(bidiagonal(us.size(), us.size())).sigma;
      throw ConvergenceError("Lanczos bidiagonalization exceeded " + std::to_string(cap) + " steps",
                             out.iterations, static_cast<int>(us.size()), partial);
    }
    ++out.iterations;
    const ComplexVector& v = vs.back();
    ComplexVector r = mat_vec(a, v, pool);
    if (!us.empty()) r -= coupling * us.back();
    reorthogonalize(r, us);
    const double a_i = r.norm();
    ComplexVector u;
    if (a_i <= stop) {
      if (!restart(us, rows, true, u)) {
        alpha_stop = true;
        break;
      }
      alpha.push_back(0.0);
    } else {
      u = r / a_i;
      alpha.push_back(a_i);
    }
    us.push_back(std::move(u));

    ComplexVector p = adj_vec(a, us.back(), pool) - alpha.back() * vs.back();
    reorthogonalize(p, vs);
    const double b_i = p.norm();
    ComplexVector next;
    if (b_i <= stop) {
      if (!restart(vs, cols, false, next)) break;
      beta.push_back(0.0);
    } else {
      next = p / b_i;
      beta.push_back(b_i);
    }
    coupling = beta.back();
    vs.push_back(std::move(next));
  }

  const std::size_t r = us.size();
  if (r == 0) return out;
  const DenseMatrix u_basis = stack(us, rows, r);
  if (alpha_stop) {
    // B is r x (r+1); the last right singular direction spans the null space.
    const SmallSvd b = small_svd(bidiagonal(r, r + 1));
    out.u = u_basis * b.u;
    out.sigma = b.sigma;
    out.v = stack(vs, cols, r + 1) * b.v.leftCols(static_cast<Index>(r));
  } else {
    const SmallSvd b = small_svd(bidiagonal(r, r));
    out.u = u_basis * b.u;
    out.sigma = b.sigma;
    out.v = stack(vs, cols, r) * b.v;
  }
  truncate(out, criterion);
  return out;
}

ReducedSVD power_svd(const DenseMatrix& a, int r0, const DenseMatrix& u0, const DenseMatrix& v0,
                     const RankCriterion& criterion, const PowerOptions& options, const WorkerPool* pool) {
  if (r0 < 1) throw InputError("starting block must have at least one column");
  if (u0.rows() != a.rows() || v0.rows() != a.cols() || u0.cols() != r0 || v0.cols() != r0) {
    throw InputError("starting blocks do not match the matrix and r0");
  }
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  ReducedSVD out;
  const double norm_a = a.norm();
  if (norm_a == 0.0) return out;
  const double stop = criterion.tol * norm_a;
  const Index full = std::min(a.rows(), a.cols());

  DenseMatrix u = u0;
  DenseMatrix v = v0;
  DenseMatrix av = panel_multiply(a, v, pool);
  DenseMatrix q = u.adjoint() * av;
  double residual = (av - u * q).norm();
  int k = 0;
  while (residual > stop) {
    if (k >= options.max_iterations) {
      throw ConvergenceError("block power method exceeded " + std::to_string(options.max_iterations) + " iterations",
                             k, static_cast<int>(v.cols()), small_svd(q).sigma);
    }
    ++k;
    u = thin_q(av);
    const DenseMatrix v_bar = panel_adjoint_multiply(a, u, pool);
    if (k == 1) {
      const PivotedQR pqr = pivoted_qr(v_bar);
      const int r = rank_from_pivoted_r(pqr.r, criterion.tol);
      if (r == pqr.r.rows() && r < full) {
        throw RankOverflowError("no rank drop inside the starting block of " + std::to_string(r0) +
                                    " columns; raise r0",
                                r0);
      }
      if (r == 0) return out;
      v = pqr.q.leftCols(r);
      // Q^* = (R P^T)(1:r, :), one column per column of U.
      DenseMatrix q_adj(r, v_bar.cols());
      for (std::size_t j = 0; j < pqr.perm.size(); ++j) {
        q_adj.col(pqr.perm[j]) = pqr.r.block(0, static_cast<Index>(j), r, 1);
      }
      q = q_adj.adjoint();
    } else {
      DenseMatrix r_v;
      v = thin_q(v_bar, &r_v);
      q = r_v.adjoint();
    }
    av = panel_multiply(a, v, pool);
    residual = (av - u * q).norm();
  }
  out.iterations = k;
  const SmallSvd s = small_svd(q);
  out.u = u * s.u;
  out.sigma = s.sigma;
  out.v = v * s.v;
  truncate(out, criterion);
  return out;
}

PivotedQR pivoted_qr(const DenseMatrix& a) {
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(a);
  const Index k = std::min(a.rows(), a.cols());
  PivotedQR out;
  out.q = qr.householderQ() * DenseMatrix::Identity(a.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const auto& indices = qr.colsPermutation().indices();
  out.perm.assign(indices.data(), indices.data() + indices.size());
  return out;
}

int rank_from_pivoted_r(const DenseMatrix& r, double tol) {
  const Index k = std::min(r.rows(), r.cols());
  const double total = r.norm();
  if (total == 0.0) return 0;
  // Tail norms accumulated from the bottom-right corner upwards.
  std::vector<double> tail(static_cast<std::size_t>(k) + 1, 0.0);
  for (Index i = k - 1; i >= 0; --i) {
    const double row = r.row(i).tail(r.cols() - i).squaredNorm();
    tail[static_cast<std::size_t>(i)] = tail[static_cast<std::size_t>(i) + 1] + row;
  }
  for (Index i = 0; i < k; ++i) {
    if (std::sqrt(tail[static_cast<std::size_t>(i)]) <= tol * total) return static_cast<int>(i);
  }
  return static_cast<int>(k);
}

DenseMatrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  if (cols > rows) throw InputError("cannot fit more orthonormal columns than rows");
  DenseMatrix g(rows, cols);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(gen);
      g(r, c) = Complex(re, normal(gen));
    }
  }
  return thin_q(g);
}

ComplexVector random_complex_vector(Index size, std::uint64_t seed) {
  ComplexVector x(size);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  for (Index i = 0; i < size; ++i) {
    const double re = normal(gen);
    x(i) = Complex(re, normal(gen));
  }
  return x;
}

}  // namespace prony
