#include "prony/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "prony/coefficient_recovery.hpp"
#include "prony/errors.hpp"
#include "prony/matrix_assembly.hpp"
#include "prony/parallel.hpp"
#include "prony/pencil_solver.hpp"

namespace prony {

namespace {

using Clock = std::chrono::steady_clock;

// Purpose tags for derived seeds.
enum : std::uint64_t { kSeedMu = 1, kSeedU0 = 2, kSeedV0 = 3, kSeedP1 = 4, kSeedRestart = 5 };

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t draw = 0) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (purpose * 1024 + draw + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void run_lanes(LaneMode mode, const std::function<void()>& lane_a, const std::function<void()>& lane_b) {
  if (mode == LaneMode::sequential) {
    lane_a();
    lane_b();
    return;
  }
  std::exception_ptr error_b;
  std::jthread worker([&] {
    try {
      lane_b();
    } catch (...) {
      error_b = std::current_exception();
    }
  });
  std::exception_ptr error_a;
  try {
    lane_a();
  } catch (...) {
    error_a = std::current_exception();
  }
  worker.join();
  if (error_a) std::rethrow_exception(error_a);
  if (error_b) std::rethrow_exception(error_b);
}

// Records a stage in the trace (if any) and adds its duration to a timer.
template <typename F>
void stage(ScheduleTrace* trace, Stage s, char lane, double* timer, F&& body) {
  if (trace) trace->begin(s, lane);
  const auto start = Clock::now();
  body();
  if (timer) *timer += seconds_since(start);
  if (trace) trace->end(s);
}

// ||T_ell||_F from the grid: every difference k - h occurs prod_i (n + 1 - |delta_i|) times.
double shifted_frobenius(const SampleGrid& grid, const IndexSet& idx, int ell) {
  const int d = idx.dim();
  const int n = idx.n();
  std::vector<int> delta(static_cast<std::size_t>(d), -n);
  std::vector<int> point(static_cast<std::size_t>(d));
  double sum = 0.0;
  for (;;) {
    double weight = 1.0;
    for (int i = 0; i < d; ++i) {
      weight *= n + 1 - std::abs(delta[static_cast<std::size_t>(i)]);
      point[static_cast<std::size_t>(i)] = delta[static_cast<std::size_t>(i)] + (i + 1 == ell ? 1 : 0);
    }
    sum += weight * std::norm(grid.at(point));
    int i = d - 1;
    while (i >= 0 && delta[static_cast<std::size_t>(i)] == n) delta[static_cast<std::size_t>(i--)] = -n;
    if (i < 0) break;
    ++delta[static_cast<std::size_t>(i)];
  }
  return std::sqrt(sum);
}

}  // namespace

std::string_view to_string(LaneMode mode) {
  return mode == LaneMode::sequential ? "sequential" : "parallel";
}

std::string_view to_string(AssemblyMode mode) {
  switch (mode) {
    case AssemblyMode::automatic: return "automatic";
    case AssemblyMode::materialized: return "materialized";
    case AssemblyMode::streamed: return "streamed";
  }
  return "unknown";
}

LaneMode parse_lane_mode(std::string_view name) {
  if (name == "sequential") return LaneMode::sequential;
  if (name == "parallel") return LaneMode::parallel;
  throw InputError("unknown lane mode '" + std::string(name) + "'");
}

AssemblyMode parse_assembly_mode(std::string_view name) {
  if (name == "automatic" || name == "auto") return AssemblyMode::automatic;
  if (name == "materialized") return AssemblyMode::materialized;
  if (name == "streamed") return AssemblyMode::streamed;
  throw InputError("unknown assembly mode '" + std::string(name) + "'");
}

std::array<double, 9> stage_timings(const StageTimings& t) {
  return {t.t_T, t.t_SVD, t.t_S, t.t_Cmu, t.t_eig, t.t_zt, t.t_A, t.t_LS, t.t_total};
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::build_T_f: return "build_T_f";
    case Stage::build_T_ell: return "build_T_ell";
    case Stage::draw_mu: return "draw_mu";
    case Stage::build_B_mu: return "build_B_mu";
    case Stage::svd: return "svd";
    case Stage::c_mu: return "c_mu";
    case Stage::eig: return "eig";
    case Stage::s_ell: return "s_ell";
    case Stage::diagonalize: return "diagonalize";
    case Stage::build_A: return "build_A";
    case Stage::solve_ls: return "solve_ls";
  }
  return "unknown";
}

std::vector<Stage> stage_dependencies(Stage stage) {
  switch (stage) {
    case Stage::build_T_f:
    case Stage::build_T_ell:
    case Stage::draw_mu: return {};
    case Stage::build_B_mu: return {Stage::build_T_ell, Stage::draw_mu};
    case Stage::svd: return {Stage::build_T_f};
    case Stage::c_mu: return {Stage::svd, Stage::build_B_mu};
    case Stage::eig: return {Stage::c_mu};
    case Stage::s_ell: return {Stage::svd, Stage::build_T_ell};
    case Stage::diagonalize: return {Stage::eig, Stage::s_ell};
    case Stage::build_A: return {Stage::diagonalize};
    case Stage::solve_ls: return {Stage::build_A, Stage::build_T_f};
  }
  return {};
}

void ScheduleTrace::begin(Stage stage, char lane) {
  std::lock_guard lock(mutex_);
  events_.push_back({stage, lane, ++clock_, 0, false});
}

void ScheduleTrace::end(Stage stage) {
  std::lock_guard lock(mutex_);
  for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
    if (it->stage == stage && !it->finished) {
      it->end = ++clock_;
      it->finished = true;
      return;
    }
  }
}

std::vector<ScheduleTrace::Event> ScheduleTrace::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::vector<std::string> ScheduleTrace::violations() const {
  const std::vector<Event> all = events();
  std::vector<std::string> out;
  for (const Event& e : all) {
    if (!e.finished) out.push_back(std::string(to_string(e.stage)) + " never finished");
    for (Stage dep : stage_dependencies(e.stage)) {
      const bool satisfied = std::any_of(all.begin(), all.end(), [&](const Event& other) {
        return other.stage == dep && other.finished && other.end < e.begin;
      });
      if (!satisfied) {
        out.push_back(std::string(to_string(e.stage)) + " started before " + std::string(to_string(dep)) +
                      " finished");
      }
    }
  }
  return out;
}

SvdBackend effective_backend(const PipelineConfig& config) {
  if (config.svd_backend) return *config.svd_backend;
  return config.m_expected ? SvdBackend::power : SvdBackend::lanczos;
}

RecoveryReport run_prony(const SampleGrid& grid, const PipelineConfig& config, ScheduleTrace* trace) {
  if (config.d < 1 || config.n < 1) throw InputError("configuration needs d >= 1 and n >= 1");
  if (grid.dim() != config.d || grid.n() != config.n) throw InputError("grid does not match (n, d) of the configuration");
  if (config.workers < 1) throw InputError("workers must be positive");
  if (config.m_expected && *config.m_expected < 1) throw InputError("expected term count must be positive");

  const auto total_start = Clock::now();
  const int d = config.d;
  const IndexSet idx = index_set(config.n, d);
  const Index big_n = idx.size();
  const WorkerPool pool(config.workers);

  RecoveryReport report;
  report.backend = effective_backend(config);
  report.criterion = config.rank_criterion.value_or(RankCriterion::machine(big_n));
  report.lane_mode = config.lane_mode;
  report.workers = config.workers;
  report.rank_expected = config.m_expected;
  const double dense_bytes = static_cast<double>(d + 2) * static_cast<double>(big_n) * static_cast<double>(big_n) * 16.0;
  report.assembly = config.assembly;
  if (report.assembly == AssemblyMode::automatic) {
    report.assembly = dense_bytes > static_cast<double>(config.memory_budget_bytes) ? AssemblyMode::streamed
                                                                                    : AssemblyMode::materialized;
  }
  const bool streamed = report.assembly == AssemblyMode::streamed;
  StageTimings& times = report.timings;

  DenseMatrix t_mat;
  ComplexVector f;
  ReducedSVD svd;
  std::vector<DenseMatrix> t_ells;
  DenseMatrix b_mu;
  double t_T_lane_a = 0.0;
  double t_T_lane_b = 0.0;

  auto make_b_mu = [&] {
    if (!streamed) b_mu = build_B_mu(t_ells, report.mu, &pool);
  };

  // Phase 1. Lane A: T, f, reduced SVD. Lane B: T_ell, mu, B_mu.
  run_lanes(
      config.lane_mode,
      [&] {
        stage(trace, Stage::build_T_f, 'A', &t_T_lane_a, [&] {
          t_mat = build_T(grid, idx, &pool);
          f = build_f_vector(grid, idx);
        });
        stage(trace, Stage::svd, 'A', &times.t_SVD, [&] {
          switch (report.backend) {
            case SvdBackend::dense: svd = dense_svd(t_mat, report.criterion); break;
            case SvdBackend::lanczos: {
              LanczosOptions options;
              options.expected_rank = config.m_expected;
              options.seed = derive_seed(config.seed, kSeedRestart);
              svd = lanczos_svd(t_mat, random_complex_vector(big_n, derive_seed(config.seed, kSeedP1)),
                                report.criterion, options, &pool);
              break;
            }
            case SvdBackend::power: {
              int r0 = static_cast<int>(std::min<Index>(big_n, config.m_expected ? 2 * *config.m_expected : 16));
              for (int attempt = 0;; ++attempt) {
                report.power_r0 = r0;
                try {
                  svd = power_svd(t_mat, r0, random_orthonormal(big_n, r0, derive_seed(config.seed, kSeedU0, attempt)),
                                  random_orthonormal(big_n, r0, derive_seed(config.seed, kSeedV0, attempt)),
                                  report.criterion, {}, &pool);
                  break;
                } catch (const RankOverflowError&) {
                  const int raised = static_cast<int>(std::min<Index>(big_n, 2 * static_cast<Index>(r0)));
                  if (attempt > 0 || raised == r0) throw;
                  report.warnings.push_back("no rank drop within r0=" + std::to_string(r0) + "; retried with r0=" +
                                            std::to_string(raised));
                  r0 = raised;
                }
              }
              break;
            }
          }
        });
      },
      [&] {
        stage(trace, Stage::build_T_ell, 'B', &t_T_lane_b, [&] {
          if (!streamed) {
            t_ells.reserve(static_cast<std::size_t>(d));
            for (int ell = 1; ell <= d; ++ell) t_ells.push_back(build_T_ell(grid, idx, ell, &pool));
          }
        });
        stage(trace, Stage::draw_mu, 'B', nullptr, [&] { report.mu = random_mu(d, derive_seed(config.seed, kSeedMu)); });
        stage(trace, Stage::build_B_mu, 'B', &times.t_Cmu, make_b_mu);
      });
  times.t_T = t_T_lane_a + t_T_lane_b;

  const int r = svd.rank();
  report.rank_detected = r;
  report.sigma = svd.sigma;
  report.svd_iterations = svd.iterations;
  if (r < 1) throw EmptyModelError("detected rank is zero; no exponential terms to recover");
  if (report.rank_anomaly()) {
    report.warnings.push_back("detected rank " + std::to_string(r) + " differs from expected " +
                              std::to_string(*report.rank_expected));
  }

  auto mv_product = [&](const ComplexVector& weights, const DenseMatrix* matrix) {
    return streamed ? streamed_shift_product(grid, idx, weights, svd.v, &pool) : panel_multiply(*matrix, svd.v, &pool);
  };

  PencilSet pencil;
  pencil.s.resize(static_cast<std::size_t>(d));
  Eigendecomposition eig;
  std::exception_ptr eig_error;

  auto c_mu_and_eig = [&](char lane) {
    stage(trace, Stage::c_mu, lane, &times.t_Cmu,
          [&] { pencil.c_mu = compute_S_from_product(svd, mv_product(report.mu, &b_mu)); });
    stage(trace, Stage::eig, lane, &times.t_eig, [&] {
      eig_error = nullptr;
      try {
        eig = eigendecompose(pencil.c_mu);
        if (eigenvalues_collide(eig.values, pencil.c_mu.norm())) {
          throw ConvergenceError("eigenvalues of C_mu collide", 0, 0);
        }
      } catch (const ConvergenceError&) {
        eig_error = std::current_exception();
      }
    });
  };

  auto redraw_mu = [&](const std::string& reason) {
    report.warnings.push_back(reason + "; redrew mu");
    stage(trace, Stage::draw_mu, 'A', nullptr,
          [&] { report.mu = random_mu(d, derive_seed(config.seed, kSeedMu, static_cast<std::uint64_t>(report.mu_draws))); });
    ++report.mu_draws;
    stage(trace, Stage::build_B_mu, 'A', &times.t_Cmu, make_b_mu);
    c_mu_and_eig('A');
  };

  // Phase 2. Lane A: C_mu and its eigenvectors. Lane B: S_1..S_d.
  run_lanes(
      config.lane_mode, [&] { c_mu_and_eig('A'); },
      [&] {
        stage(trace, Stage::s_ell, 'B', &times.t_S, [&] {
          for (int ell = 0; ell < d; ++ell) {
            const ComplexVector e = ComplexVector::Unit(d, ell);
            pencil.s[static_cast<std::size_t>(ell)] =
                compute_S_from_product(svd, mv_product(e, streamed ? nullptr : &t_ells[static_cast<std::size_t>(ell)]));
          }
        });
      });
  if (!streamed) {
    t_ells.clear();
    t_ells.shrink_to_fit();
  }
  if (eig_error) {
    redraw_mu("eigendecomposition of C_mu failed");
    if (eig_error) std::rethrow_exception(eig_error);
  }

  // Phase 3 (lane B): simultaneous diagonalisation, nodes, A.
  NodeSet nodes;
  for (;;) {
    pencil.mu = report.mu;
    pencil.w = eig.w;
    pencil.eigvals = eig.values;
    try {
      stage(trace, Stage::diagonalize, 'B', &times.t_zt, [&] { nodes = simultaneous_diagonalize(pencil, big_n); });
      break;
    } catch (const SingularBasisError&) {
      if (report.mu_draws > 1) throw;
      if (trace) trace->end(Stage::diagonalize);
      redraw_mu("eigenvector matrix was singular");
      if (eig_error) std::rethrow_exception(eig_error);
    }
  }
  report.offdiag = nodes.offdiag;
  report.warnings.insert(report.warnings.end(), nodes.warnings.begin(), nodes.warnings.end());
  DenseMatrix a;
  stage(trace, Stage::build_A, 'B', &times.t_A, [&] { a = build_A(nodes.z, idx, &pool); });

  // Phase 4 (lane A): coefficients.
  LeastSquaresResult ls;
  stage(trace, Stage::solve_ls, 'A', &times.t_LS, [&] { ls = solve_ls(a, f); });
  report.residual_rel = ls.residual_rel;

  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index x, Index y) {
    for (int i = 0; i < d; ++i) {
      if (nodes.t(x, i) != nodes.t(y, i)) return nodes.t(x, i) < nodes.t(y, i);
    }
    return false;
  });
  report.t.resize(r, d);
  report.c.resize(r);
  for (Index j = 0; j < r; ++j) {
    report.t.row(j) = nodes.t.row(order[static_cast<std::size_t>(j)]);
    report.c(j) = ls.c(order[static_cast<std::size_t>(j)]);
  }
  times.t_total = seconds_since(total_start);

  if (config.compute_diagnostics) {
    NoiseDiagnostics& diag = report.diagnostics;
    diag.g_const = config.g_const;
    diag.sigma_tilde_m = svd.sigma(r - 1);
    diag.norm_t_f = t_mat.norm();
    if (svd.full_spectrum) {
      diag.tail_norm = svd.full_spectrum->tail(svd.full_spectrum->size() - r).norm();
    } else {
      diag.tail_norm = (t_mat - svd.u * svd.sigma.asDiagonal() * svd.v.adjoint()).norm();
      diag.tail_is_surrogate = true;
    }
    diag.delta_min = delta_min(svd.sigma, svd.sigma, r);
    diag.gamma = gamma_gap(eig.values, eig.values);
    diag.eta = eta_of(nodes.z);
    diag.kappa_w = nodes.kappa_w;
    diag.sigma_min_w = nodes.sigma_min_w;
    diag.kappa_a = ls.cond_a;
    diag.lambda_max = nodes.z.cwiseAbs().maxCoeff();
    for (int ell = 1; ell <= d; ++ell) diag.max_norm_tl_f = std::max(diag.max_norm_tl_f, shifted_frobenius(grid, idx, ell));
    const double eps = config.noise_epsilon.value_or(
        report.criterion.mode == RankCriterion::Mode::noise ? report.criterion.tol : 0.0);
    try {
      const ForwardErrorBound bound =
          forward_error_estimate(diag, eps, d, r, config.n, big_n, diag.norm_t_f, diag.max_norm_tl_f);
      diag.forward_error_t = bound.bound_t;
      diag.forward_error_c = bound.bound_c;
      diag.c_bound_finite = bound.c_finite;
    } catch (const InputError& e) {
      diag.forward_error_t = std::numeric_limits<double>::infinity();
      diag.forward_error_c = std::numeric_limits<double>::infinity();
      diag.c_bound_finite = false;
      report.warnings.push_back(std::string("forward error bound unavailable: ") + e.what());
    }
    if (!diag.c_bound_finite && eps > 0.0) {
      report.warnings.push_back("coefficient error bound is unbounded (kappa(A) sqrt(m) zeta >= 1)");
    }
  }
  return report;
}

}  // namespace prony
