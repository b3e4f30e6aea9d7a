#include "prony/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "prony/errors.hpp"

namespace prony {

namespace {

double sigma_at(const RealVector& sigma, Index i) { return i < sigma.size() ? sigma(i) : 0.0; }

}  // namespace

bool rank_drop_check(const RealVector& sigma, int m, double eps, double norm_t_f) {
  return sigma_at(sigma, m) <= eps * norm_t_f;
}

int smallest_passing_rank(const RealVector& sigma, double eps, double norm_t_f) {
  int m = 0;
  while (!rank_drop_check(sigma, m, eps, norm_t_f)) ++m;
  return m;
}

bool hoffman_wielandt_check(const RealVector& sigma_clean, const RealVector& sigma_noisy, double eps,
                            double norm_t_f) {
  if (sigma_clean.size() != sigma_noisy.size()) throw InputError("spectra differ in length");
  return (sigma_noisy - sigma_clean).norm() <= eps * norm_t_f;
}

bool tail_bound_check(const RealVector& sigma_noisy, int m, double eps, double norm_t_f) {
  const Index tail = std::max<Index>(0, sigma_noisy.size() - m);
  return sigma_noisy.tail(tail).norm() <= eps * norm_t_f;
}

double delta_min(const RealVector& sigma_exact, const RealVector& sigma_perturbed, int m) {
  double out = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < std::min<Index>(m, sigma_exact.size()); ++i) {
    double gap = sigma_exact(i);
    for (Index j = 0; j < sigma_perturbed.size(); ++j) {
      if (j != i) gap = std::min(gap, std::abs(sigma_exact(i) - sigma_perturbed(j)));
    }
    out = std::min(out, gap);
  }
  return out;
}

double gamma_gap(const ComplexVector& exact, const ComplexVector& perturbed) {
  if (exact.size() != perturbed.size()) throw InputError("eigenvalue lists differ in length");
  double out = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < perturbed.size(); ++i) {
    for (Index j = 0; j < exact.size(); ++j) {
      if (j != i) out = std::min(out, std::abs(exact(j) - perturbed(i)));
    }
  }
  return out;
}

double eta_of(const DenseMatrix& z) {
  double out = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < z.rows(); ++j) {
    for (Index i = 0; i < z.cols(); ++i) out = std::min(out, std::abs(z(j, i).real() * z(j, i).imag()));
  }
  return out;
}

ForwardErrorBound forward_error_estimate(const NoiseDiagnostics& diag, double eps, int d, int m, int n,
                                         Index big_n, double norm_t_f, double max_norm_tl_f) {
  if (!(eps >= 0.0) || d < 1 || m < 1 || n < 1 || big_n < 1) throw InputError("bound arguments out of range");
  const double ingredients[] = {diag.gamma,       diag.delta_min,  diag.sigma_tilde_m, diag.sigma_min_w,
                                diag.kappa_w,     diag.kappa_a,    diag.lambda_max,    norm_t_f,
                                max_norm_tl_f};
  for (double x : ingredients) {
    if (!(x > 0.0) || std::isnan(x)) throw InputError("forward error bound needs positive ingredients");
  }
  if (!(diag.eta >= 0.0)) throw InputError("eta must be nonnegative");
  ForwardErrorBound out;
  if (eps == 0.0) return out;

  const double md = static_cast<double>(m) * d;
  const double g = diag.g_const;
  const double subspace =
      1.0 + (1.0 + 4.0 * std::numbers::sqrt2 + (2.0 + g) * std::sqrt(2.0 * m)) * norm_t_f / diag.delta_min;
  out.lambda_perturbation =
      eps *
      (2.0 * std::sqrt(md) * diag.lambda_max / (diag.gamma * diag.sigma_tilde_m * diag.sigma_min_w) +
       1.0 / diag.sigma_tilde_m) *
      subspace * max_norm_tl_f * diag.kappa_w;
  // eta = 0 means a node on an axis of the complex plane; the bound blows up.
  out.bound_t = diag.eta > 0.0 ? out.lambda_perturbation / (std::numbers::pi * diag.eta)
                               : std::numeric_limits<double>::infinity();

  out.zeta = std::pow(static_cast<double>(d), 1.5) * std::pow(static_cast<double>(m), 1.5) * n *
             std::sqrt(static_cast<double>(big_n)) /
             (diag.gamma * diag.delta_min * diag.sigma_tilde_m * diag.sigma_min_w) * norm_t_f *
             max_norm_tl_f * diag.kappa_w * eps;
  const double x = diag.kappa_a * std::sqrt(static_cast<double>(m)) * out.zeta;
  out.c_finite = x < 1.0;
  out.bound_c = out.c_finite ? 2.0 * x / (1.0 - x) : std::numeric_limits<double>::infinity();
  return out;
}

nlohmann::json to_json(const NoiseDiagnostics& diag) {
  // JSON has no infinity; unbounded values are written as null.
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {
      {"sigma_tilde_m", num(diag.sigma_tilde_m)},
      {"tail_norm", num(diag.tail_norm)},
      {"tail_is_surrogate", diag.tail_is_surrogate},
      {"delta_min", num(diag.delta_min)},
      {"delta_is_self_gap", diag.delta_is_self_gap},
      {"gamma", num(diag.gamma)},
      {"gamma_is_self_gap", diag.gamma_is_self_gap},
      {"eta", num(diag.eta)},
      {"kappa_W", num(diag.kappa_w)},
      {"sigma_min_W", num(diag.sigma_min_w)},
      {"kappa_A", num(diag.kappa_a)},
      {"lambda_max", num(diag.lambda_max)},
      {"g_const", diag.g_const},
      {"norm_T_F", num(diag.norm_t_f)},
      {"max_norm_Tl_F", num(diag.max_norm_tl_f)},
      {"forward_error_t", num(diag.forward_error_t)},
      {"forward_error_c", num(diag.forward_error_c)},
      {"c_bound_finite", diag.c_bound_finite},
  };
}

}  // namespace prony
