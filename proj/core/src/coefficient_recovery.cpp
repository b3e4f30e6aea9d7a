#include "prony/coefficient_recovery.hpp"

#include <limits>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "prony/errors.hpp"
#include "prony/parallel.hpp"

namespace prony {

DenseMatrix build_A(const DenseMatrix& z, const IndexSet& idx, const WorkerPool* pool) {
  if (z.cols() != idx.dim()) throw InputError("node dimension differs from index set");
  if (!z.allFinite()) throw InputError("nodes must be finite");
  const Index m = z.rows();
  const int d = idx.dim();
  const int n = idx.n();
  // powers[(i * m + j) * (n + 1) + p] = z_j(i)^p
  std::vector<Complex> powers(static_cast<std::size_t>(d * m * (n + 1)));
  for (int i = 0; i < d; ++i) {
    for (Index j = 0; j < m; ++j) {
      Complex* row = &powers[static_cast<std::size_t>((i * m + j) * (n + 1))];
      row[0] = Complex(1.0, 0.0);
      for (int p = 1; p <= n; ++p) row[p] = row[p - 1] * z(j, i);
    }
  }
  DenseMatrix a(m, idx.size());
  const Index panels = (idx.size() + kPanelSize - 1) / kPanelSize;
  auto body = [&](std::size_t panel) {
    const Index c0 = static_cast<Index>(panel) * kPanelSize;
    const Index c1 = std::min(idx.size(), c0 + kPanelSize);
    for (Index c = c0; c < c1; ++c) {
      const auto k = idx.point(c);
      for (Index j = 0; j < m; ++j) {
        Complex v = powers[static_cast<std::size_t>(j * (n + 1) + k[0])];
        for (int i = 1; i < d; ++i) v *= powers[static_cast<std::size_t>((i * m + j) * (n + 1) + k[static_cast<std::size_t>(i)])];
        a(j, c) = v;
      }
    }
  };
  if (pool) {
    pool->parallel_for(static_cast<std::size_t>(panels), body);
  } else {
    for (Index p = 0; p < panels; ++p) body(static_cast<std::size_t>(p));
  }
  return a;
}

LeastSquaresResult solve_ls(const DenseMatrix& a, const ComplexVector& f) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (m < 1 || f.size() != n) throw InputError("least-squares shapes disagree");
  if (n < m) throw InputError("fewer samples than unknowns");
  const double norm_f = f.norm();
  if (!(norm_f > 0.0)) throw InputError("sample vector is zero");

  const DenseMatrix at = a.transpose();
  const Eigen::HouseholderQR<DenseMatrix> qr(at);
  const DenseMatrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const double guard = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.norm();
  for (Index i = 0; i < m; ++i) {
    if (!(std::abs(r(i, i)) > guard)) throw RankDeficiencyError("node matrix is numerically rank deficient");
  }
  LeastSquaresResult out;
  out.c = qr.solve(f);
  out.residual_rel = (at * out.c - f).norm() / norm_f;
  const RealVector sv = Eigen::JacobiSVD<DenseMatrix>(r).singularValues();
  out.cond_a = sv(0) / sv(m - 1);
  return out;
}

}  // namespace prony
