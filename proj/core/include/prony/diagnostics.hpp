#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "prony/types.hpp"

namespace prony {

/// Noise-analysis quantities evaluated on a finished recovery.
///
/// Gaps that need both exact and perturbed data (delta_min, gamma) are
/// replaced at runtime by self-gaps of the perturbed quantities; the
/// *_self flags say so.
struct NoiseDiagnostics {
  double sigma_tilde_m = 0.0;   ///< smallest retained singular value
  double tail_norm = 0.0;       ///< sqrt(sum_{i>m} sigma_i^2) or residual surrogate
  bool tail_is_surrogate = false;
  double delta_min = 0.0;
  bool delta_is_self_gap = true;
  double gamma = 0.0;           ///< min eigenvalue gap of C_mu
  bool gamma_is_self_gap = true;
  double eta = 0.0;             ///< min_{j,i} |Re z_j(i) Im z_j(i)|
  double kappa_w = 0.0;
  double sigma_min_w = 0.0;
  double kappa_a = 0.0;
  double lambda_max = 1.0;      ///< max_{j,ell} |z_j(ell)|
  double g_const = 8.0;
  double norm_t_f = 0.0;
  double max_norm_tl_f = 0.0;
  double forward_error_t = 0.0;
  double forward_error_c = 0.0;
  bool c_bound_finite = true;
};

/// True iff sigma_{m+1} <= eps ||T||_F (sigma_{m+1} = 0 when absent).
bool rank_drop_check(const RealVector& sigma, int m, double eps, double norm_t_f);

/// Smallest m that passes rank_drop_check.
int smallest_passing_rank(const RealVector& sigma, double eps, double norm_t_f);

/// True iff sqrt(sum |sigma_noisy_i - sigma_clean_i|^2) <= eps ||T||_F.
/// \throws InputError on length mismatch.
bool hoffman_wielandt_check(const RealVector& sigma_clean, const RealVector& sigma_noisy,
                            double eps, double norm_t_f);

/// True iff sqrt(sum_{i>m} sigma_noisy_i^2) <= eps ||T||_F.
bool tail_bound_check(const RealVector& sigma_noisy, int m, double eps, double norm_t_f);

/// min_i min( min_{j != i} |sigma_i - sigma_tilde_j|, sigma_i ), i over the
/// first m exact values, j over every perturbed value.
double delta_min(const RealVector& sigma_exact, const RealVector& sigma_perturbed, int m);

/// min_{i != j} |lambda_j - lambda_tilde_i| with lambda_tilde_i paired to lambda_i.
double gamma_gap(const ComplexVector& exact, const ComplexVector& perturbed);

/// min_{j,i} |Re z_j(i) Im z_j(i)|.
double eta_of(const DenseMatrix& z);

struct ForwardErrorBound {
  double bound_t = 0.0;
  double bound_c = 0.0;
  bool c_finite = true;       ///< false when kappa(A) sqrt(m) zeta >= 1
  double zeta = 0.0;
  double lambda_perturbation = 0.0;  ///< first-order bound on |Delta z_j(ell)|
};

/// First-order forward error bounds for t and c given relative sample noise eps.
///
/// bound_t = ||Delta Lambda||_F / (pi eta) where
///   ||Delta Lambda||_F <= eps (2 sqrt(m d) |Lambda|_2 / (gamma s_m s_W) + 1 / s_m)
///                      * (1 + (1 + 4 sqrt 2 + (2 + g) sqrt(2 m)) ||T||_F / delta_min)
///                      * max ||T_ell||_F kappa(W)
/// bound_c = 2 kappa(A) sqrt(m) zeta / (1 - kappa(A) sqrt(m) zeta) with
///   zeta = d^1.5 m^1.5 n N^0.5 / (gamma delta_min s_m s_W) ||T||_F max ||T_ell||_F kappa(W) eps.
///
/// \throws InputError when a required ingredient is not positive.
ForwardErrorBound forward_error_estimate(const NoiseDiagnostics& diag, double eps, int d, int m,
                                         int n, Index big_n, double norm_t_f,
                                         double max_norm_tl_f);

nlohmann::json to_json(const NoiseDiagnostics& diag);

}  // namespace prony
