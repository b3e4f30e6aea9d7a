#include <cmath>

#include <gtest/gtest.h>

#include <prony/diagnostics.hpp>
#include <prony/errors.hpp>
#include <prony/matrix_assembly.hpp>
#include <prony/pipeline.hpp>
#include <prony/reduced_svd.hpp>

#include "test_support.hpp"

namespace prony {
namespace {

RealVector full_spectrum(const SampleGrid& grid, int n) {
  const IndexSet idx = index_set(n, grid.dim());
  return *dense_svd(build_T(grid, idx), RankCriterion::machine(idx.size())).full_spectrum;
}

NoiseDiagnostics oracle_ingredients() {
  NoiseDiagnostics diag;
  diag.gamma = 0.05;
  diag.delta_min = 2.5;
  diag.sigma_tilde_m = 0.75;
  diag.sigma_min_w = 0.3;
  diag.kappa_w = 12.0;
  diag.kappa_a = 40.0;
  diag.lambda_max = 1.0;
  diag.eta = 0.01;
  diag.g_const = 8.0;
  return diag;
}

TEST(RankDrop, CutsAtThreshold) {
  RealVector s(3);
  s << 10.0, 1.0, 0.001;
  EXPECT_FALSE(rank_drop_check(s, 1, 0.01, 10.0));
  EXPECT_TRUE(rank_drop_check(s, 2, 0.01, 10.0));
  EXPECT_TRUE(rank_drop_check(s, 3, 0.0, 10.0));
  EXPECT_EQ(smallest_passing_rank(s, 0.01, 10.0), 2);
  EXPECT_EQ(smallest_passing_rank(s, 2.0, 10.0), 0);
}

TEST(RankDrop, NoisyFamilyPassesAtTrueRank) {
  const SampleGrid clean = sample_grid(standard_test_family(2, 5), 10, {});
  const double norm_t = build_T(clean, index_set(10, 2)).norm();
  const RealVector noisy = full_spectrum(sample_grid(standard_test_family(2, 5), 10, {1e-6, 2}), 10);
  EXPECT_EQ(smallest_passing_rank(noisy, 1e-6, norm_t), 5);
}

TEST(SpectrumPerturbation, HoffmanWielandtAndTail) {
  const ExponentialSum sum = standard_test_family(2, 3);
  const SampleGrid clean = sample_grid(sum, 8, {});
  const double norm_t = build_T(clean, index_set(8, 2)).norm();
  const RealVector s_clean = full_spectrum(clean, 8);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RealVector s_noisy = full_spectrum(sample_grid(sum, 8, {1e-6, seed}), 8);
    EXPECT_TRUE(hoffman_wielandt_check(s_clean, s_noisy, 1e-6, norm_t));
    EXPECT_TRUE(tail_bound_check(s_noisy, 3, 1e-6, norm_t));
    EXPECT_FALSE(tail_bound_check(s_noisy, 2, 1e-6, norm_t));
  }
  EXPECT_THROW(hoffman_wielandt_check(s_clean, s_clean.head(3), 1e-6, norm_t), InputError);
}

TEST(Gaps, SmallExamples) {
  RealVector exact(3);
  exact << 5.0, 3.0, 0.0;
  RealVector perturbed(3);
  perturbed << 5.1, 2.9, 0.2;
  // i=0: |5-2.9|, |5-0.2|, 5 -> 2.1; i=1: |3-5.1|, |3-0.2|, 3 -> 2.1.
  EXPECT_NEAR(delta_min(exact, perturbed, 2), 2.1, 1e-15);
  // i=2 adds sigma_3 = 0.
  EXPECT_DOUBLE_EQ(delta_min(exact, perturbed, 3), 0.0);

  ComplexVector lam(3);
  lam << 1.0, Complex(0.0, 1.0), -1.0;
  EXPECT_NEAR(gamma_gap(lam, lam), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(gamma_gap(lam, lam.head(2)), InputError);

  DenseMatrix z(2, 1);
  z << std::polar(1.0, 0.3), std::polar(1.0, 1.0);
  EXPECT_NEAR(eta_of(z), std::abs(std::cos(0.3) * std::sin(0.3)), 1e-16);
}

TEST(ForwardError, MatchesExtendedPrecisionOracle) {
  // Frozen from a 40-digit evaluation of the same closed forms.
  const ForwardErrorBound b = forward_error_estimate(oracle_ingredients(), 1e-14, 3, 5, 6, 343, 300.0, 310.0);
  EXPECT_NEAR(b.bound_t, 3.7531842519617643792e-3, 1e-12 * 3.75e-3);
  EXPECT_NEAR(b.zeta, 2.5615737402776442422e-3, 1e-12 * 2.56e-3);
  EXPECT_TRUE(b.c_finite);
  EXPECT_NEAR(b.bound_c, 0.59441773834494796378, 1e-12 * 0.594);
  const double x = 40.0 * std::sqrt(5.0) * b.zeta;
  EXPECT_NEAR(x, 0.22911412050556814164, 1e-12 * 0.229);
}

TEST(ForwardError, ZeroNoiseAndLinearity) {
  const NoiseDiagnostics diag = oracle_ingredients();
  const ForwardErrorBound zero = forward_error_estimate(diag, 0.0, 3, 5, 6, 343, 300.0, 310.0);
  EXPECT_EQ(zero.bound_t, 0.0);
  EXPECT_EQ(zero.bound_c, 0.0);
  const ForwardErrorBound one = forward_error_estimate(diag, 1e-16, 3, 5, 6, 343, 300.0, 310.0);
  const ForwardErrorBound two = forward_error_estimate(diag, 2e-16, 3, 5, 6, 343, 300.0, 310.0);
  EXPECT_NEAR(two.bound_t, 2.0 * one.bound_t, 1e-14 * one.bound_t);
  EXPECT_NEAR(two.zeta, 2.0 * one.zeta, 1e-14 * one.zeta);
  EXPECT_GT(two.bound_c, 2.0 * one.bound_c);
}

TEST(ForwardError, DegenerateIngredients) {
  NoiseDiagnostics diag = oracle_ingredients();
  diag.eta = 0.0;
  EXPECT_TRUE(std::isinf(forward_error_estimate(diag, 1e-14, 3, 5, 6, 343, 300.0, 310.0).bound_t));
  diag = oracle_ingredients();
  diag.gamma = 0.0;
  EXPECT_THROW(forward_error_estimate(diag, 1e-14, 3, 5, 6, 343, 300.0, 310.0), InputError);
  diag = oracle_ingredients();
  diag.kappa_a = 1e9;
  const ForwardErrorBound b = forward_error_estimate(diag, 1e-14, 3, 5, 6, 343, 300.0, 310.0);
  EXPECT_FALSE(b.c_finite);
  EXPECT_TRUE(std::isinf(b.bound_c));
  EXPECT_THROW(forward_error_estimate(oracle_ingredients(), -1.0, 3, 5, 6, 343, 300.0, 310.0), InputError);
}

TEST(ForwardError, JsonWritesNullForUnbounded) {
  NoiseDiagnostics diag = oracle_ingredients();
  diag.forward_error_t = INFINITY;
  const nlohmann::json j = to_json(diag);
  EXPECT_TRUE(j.at("forward_error_t").is_null());
  EXPECT_DOUBLE_EQ(j.at("gamma").get<double>(), 0.05);
}

TEST(ForwardError, DominatesObservedErrorWithExactGaps) {
  // Shifted off the axes so that eta > 0 and the t bound is finite.
  const ExponentialSum family = standard_test_family(3, 5);
  const ExponentialSum sum(family.params().array() + 0.0123, family.coeffs());
  const double eps = 1e-9;
  const SampleGrid clean = sample_grid(sum, 6, {});
  const SampleGrid noisy = sample_grid(sum, 6, {eps, 11});
  PipelineConfig config;
  config.n = 6;
  config.d = 3;
  config.m_expected = 5;
  config.svd_backend = SvdBackend::dense;
  config.rank_criterion = RankCriterion::noise(eps);
  config.seed = 4;
  const RecoveryReport report = run_prony(noisy, config);
  ASSERT_EQ(report.rank_detected, 5);

  // Replace the runtime self-gaps with gaps against the exact data.
  NoiseDiagnostics diag = report.diagnostics;
  diag.delta_min = delta_min(full_spectrum(clean, 6), full_spectrum(noisy, 6), 5);
  const DenseMatrix z_exact = testing::exact_nodes(sum);
  DenseMatrix z_noisy(5, 3);
  for (Index j = 0; j < 5; ++j) {
    for (Index i = 0; i < 3; ++i) z_noisy(j, i) = std::polar(1.0, -kTwoPi * report.t(j, i));
  }
  diag.gamma = gamma_gap(z_exact * report.mu, z_noisy * report.mu);
  diag.eta = eta_of(z_exact);
  const ForwardErrorBound b = forward_error_estimate(diag, eps, 3, 5, 6, 343, diag.norm_t_f, diag.max_norm_tl_f);
  const auto observed = testing::aligned_errors(report.t, report.c, sum);
  EXPECT_LE(observed.max_t_error, b.bound_t);
  if (b.c_finite) EXPECT_LE(observed.rel_c_error, b.bound_c);
}

}  // namespace
}  // namespace prony
