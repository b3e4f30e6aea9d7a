#include <cmath>

#include <gtest/gtest.h>

#include <prony/errors.hpp>
#include <prony/matrix_assembly.hpp>
#include <prony/pencil_solver.hpp>
#include <prony/reduced_svd.hpp>

#include "test_support.hpp"

namespace prony {
namespace {

using testing::exact_nodes;
using testing::multiset_distance;

struct Pencil {
  ReducedSVD svd;
  std::vector<DenseMatrix> s;
};

Pencil make_pencil(const SampleGrid& grid, int n, const RankCriterion& crit) {
  const IndexSet idx = index_set(n, grid.dim());
  Pencil p{dense_svd(build_T(grid, idx), crit), {}};
  for (int ell = 1; ell <= grid.dim(); ++ell) p.s.push_back(compute_S(p.svd, build_T_ell(grid, idx, ell)));
  return p;
}

PencilSet pencil_set(const Pencil& p, const ComplexVector& mu) {
  PencilSet set;
  set.s = p.s;
  set.mu = mu;
  set.c_mu = DenseMatrix::Zero(p.s[0].rows(), p.s[0].cols());
  for (std::size_t ell = 0; ell < p.s.size(); ++ell) set.c_mu += mu(static_cast<Index>(ell)) * p.s[ell];
  const Eigendecomposition eig = eigendecompose(set.c_mu);
  set.w = eig.w;
  set.eigvals = eig.values;
  return set;
}

TEST(ComputeS, OneByOneCases) {
  ReducedSVD svd;
  svd.u = DenseMatrix::Ones(1, 1);
  svd.v = DenseMatrix::Ones(1, 1);
  svd.sigma = RealVector::Ones(1);
  EXPECT_EQ(compute_S(svd, DenseMatrix::Ones(1, 1))(0, 0), Complex(1.0, 0.0));
  EXPECT_EQ(compute_S(svd, -DenseMatrix::Ones(1, 1))(0, 0), Complex(-1.0, 0.0));
  svd.sigma(0) = 0.0;
  EXPECT_THROW(compute_S(svd, DenseMatrix::Ones(1, 1)), SingularScaleError);
}

TEST(ComputeS, EigenvaluesAreNodes) {
  const ExponentialSum sum = standard_test_family(2, 2);
  const Pencil p = make_pencil(sample_grid(sum, 4, {}), 4, RankCriterion::machine(25));
  ASSERT_EQ(p.svd.rank(), 2);
  const DenseMatrix z = exact_nodes(sum);
  for (int ell = 0; ell < 2; ++ell) {
    const Eigendecomposition eig = eigendecompose(p.s[static_cast<std::size_t>(ell)]);
    EXPECT_LE(multiset_distance(z.col(ell), eig.values), 1e-12);
  }
}

TEST(ComputeS, ProductRouteAgreesWithMatrixRoute) {
  const SampleGrid grid = sample_grid(standard_test_family(2, 3), 5, {});
  const IndexSet idx = index_set(5, 2);
  const ReducedSVD svd = dense_svd(build_T(grid, idx), RankCriterion::machine(idx.size()));
  const DenseMatrix direct = compute_S(svd, build_T_ell(grid, idx, 2));
  const DenseMatrix streamed = compute_S_from_product(svd, streamed_shift_product(grid, idx, ComplexVector::Unit(2, 1), svd.v));
  EXPECT_LE((direct - streamed).norm(), 1e-12 * direct.norm());
  EXPECT_THROW(compute_S_from_product(svd, DenseMatrix::Ones(idx.size(), 1)), InputError);
}

TEST(RandomMu, UnitNormAndSeeded) {
  for (int d : {1, 2, 5}) {
    const ComplexVector mu = random_mu(d, 17);
    EXPECT_NEAR(mu.norm(), 1.0, 1e-15);
    EXPECT_TRUE(mu == random_mu(d, 17));
  }
  EXPECT_FALSE(random_mu(3, 1) == random_mu(3, 2));
  EXPECT_THROW(random_mu(0, 1), InputError);
}

TEST(Eigendecompose, TriangularAndRotation) {
  DenseMatrix upper(2, 2);
  upper << 1.0, 1.0, 0.0, 2.0;
  const Eigendecomposition a = eigendecompose(upper);
  ComplexVector expected(2);
  expected << 1.0, 2.0;
  EXPECT_LE(multiset_distance(expected, a.values), 1e-14);
  for (Index j = 0; j < 2; ++j) EXPECT_NEAR(a.w.col(j).norm(), 1.0, 1e-15);

  DenseMatrix rotation(2, 2);
  rotation << 0.0, -1.0, 1.0, 0.0;
  expected << Complex(0.0, 1.0), Complex(0.0, -1.0);
  EXPECT_LE(multiset_distance(expected, eigendecompose(rotation).values), 1e-14);

  EXPECT_THROW(eigendecompose(DenseMatrix::Ones(2, 3)), InputError);
}

TEST(Eigendecompose, GapAndCollision) {
  ComplexVector v(3);
  v << 1.0, Complex(0.0, 1.0), 1.0 + 1e-15;
  EXPECT_NEAR(min_eigen_gap(v), 1e-15, 2e-16);
  EXPECT_TRUE(eigenvalues_collide(v, 1.0));
  v(2) = 2.0;
  EXPECT_DOUBLE_EQ(min_eigen_gap(v), 1.0);
  EXPECT_FALSE(eigenvalues_collide(v, 1.0));
  EXPECT_TRUE(std::isinf(min_eigen_gap(ComplexVector::Ones(1))));
}

TEST(CombinedPencil, EigenvaluesAreLinearInMu) {
  const ExponentialSum sum = standard_test_family(2, 5);
  const Pencil p = make_pencil(sample_grid(sum, 20, {}), 20, RankCriterion::machine(441));
  ASSERT_EQ(p.svd.rank(), 5);
  const ComplexVector mu = random_mu(2, 99);
  const PencilSet set = pencil_set(p, mu);
  const ComplexVector expected = exact_nodes(sum) * mu;
  EXPECT_LE(multiset_distance(expected, set.eigvals), 1e-9);
}

TEST(SimultaneousDiagonalize, RecoversNodesWithSmallOffDiagonal) {
  const ExponentialSum sum = standard_test_family(3, 5);
  const Pencil p = make_pencil(sample_grid(sum, 6, {}), 6, RankCriterion::machine(343));
  ASSERT_EQ(p.svd.rank(), 5);
  const NodeSet nodes = simultaneous_diagonalize(pencil_set(p, random_mu(3, 5)), 343);
  for (double off : nodes.offdiag) EXPECT_LE(off, 1e-10);
  EXPECT_TRUE(nodes.modulus_ok);
  EXPECT_TRUE(nodes.warnings.empty());
  EXPECT_GT(nodes.sigma_min_w, 0.0);
  EXPECT_GE(nodes.kappa_w, 1.0);
  const auto errors = testing::aligned_errors(nodes.t, ComplexVector::Ones(5), sum);
  // sigma_5 / sigma_1 is small at this n, which limits noiseless accuracy.
  EXPECT_LE(errors.max_t_error, 1e-9);
}

TEST(SimultaneousDiagonalize, NoisyNodesStayClose) {
  const ExponentialSum sum = standard_test_family(2, 5);
  const Pencil p = make_pencil(sample_grid(sum, 10, {1e-6, 7}), 10, RankCriterion::noise(1e-6));
  ASSERT_EQ(p.svd.rank(), 5);
  const NodeSet nodes = simultaneous_diagonalize(pencil_set(p, random_mu(2, 3)), 121);
  const DenseMatrix z = exact_nodes(sum);
  for (int ell = 0; ell < 2; ++ell) EXPECT_LE(multiset_distance(z.col(ell), nodes.z.col(ell)), 1e-3);
}

TEST(SimultaneousDiagonalize, SingularBasisIsRejected) {
  PencilSet set;
  set.s = {DenseMatrix::Identity(2, 2)};
  set.w = DenseMatrix::Ones(2, 2);
  EXPECT_THROW(simultaneous_diagonalize(set, 4), SingularBasisError);
  set.w = DenseMatrix::Identity(3, 3);
  EXPECT_THROW(simultaneous_diagonalize(set, 4), InputError);
}

TEST(SimultaneousDiagonalize, FlagsModulusOutsideBand) {
  PencilSet set;
  DenseMatrix s = DenseMatrix::Zero(2, 2);
  s.diagonal() << 2.0, Complex(0.0, 1.0);
  set.s = {s};
  set.w = DenseMatrix::Identity(2, 2);
  const NodeSet nodes = simultaneous_diagonalize(set, 4);
  EXPECT_FALSE(nodes.modulus_ok);
  EXPECT_FALSE(nodes.warnings.empty());
  EXPECT_DOUBLE_EQ(nodes.t(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(nodes.t(1, 0), 0.75);
}

TEST(ExtractT, RoundTripsAndRejectsZero) {
  for (double t : {0.0, 0.1, 0.25, 0.5, 0.75, 0.999}) {
    DenseMatrix z(1, 1);
    z(0, 0) = std::polar(1.0, -kTwoPi * t);
    const double back = extract_t(z)(0, 0);
    EXPECT_GE(back, 0.0);
    EXPECT_LT(back, 1.0);
    EXPECT_LE(mod1_distance(back, t), 1e-15);
  }
  EXPECT_THROW(extract_t(DenseMatrix::Zero(1, 2)), DomainError);
}

}  // namespace
}  // namespace prony
