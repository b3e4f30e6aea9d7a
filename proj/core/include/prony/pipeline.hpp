#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prony/diagnostics.hpp"
#include "prony/reduced_svd.hpp"
#include "prony/signal_model.hpp"
#include "prony/types.hpp"

namespace prony {

enum class LaneMode { sequential, parallel };

/// materialized keeps T_1..T_d and B_mu in memory; streamed regenerates
/// their block columns while multiplying. automatic picks streamed when the
/// dense matrices would exceed the memory budget.
enum class AssemblyMode { automatic, materialized, streamed };

std::string_view to_string(LaneMode mode);
std::string_view to_string(AssemblyMode mode);
LaneMode parse_lane_mode(std::string_view name);
AssemblyMode parse_assembly_mode(std::string_view name);

struct PipelineConfig {
  int n = 0;
  int d = 0;
  std::optional<int> m_expected;
  /// Default: power with r0 = 2 m_expected when m_expected is set, else Lanczos.
  std::optional<SvdBackend> svd_backend;
  /// Default: machine criterion N eps.
  std::optional<RankCriterion> rank_criterion;
  /// Relative sample noise assumed by the forward error estimate. Defaults
  /// to the criterion tolerance in noise mode and to 0 in machine mode.
  std::optional<double> noise_epsilon;
  std::uint64_t seed = 0;
  int workers = 1;
  LaneMode lane_mode = LaneMode::parallel;
  AssemblyMode assembly = AssemblyMode::automatic;
  std::size_t memory_budget_bytes = std::size_t{3} << 30;
  double g_const = 8.0;
  bool compute_diagnostics = true;
};

/// Wall-clock seconds per pipeline stage.
struct StageTimings {
  double t_T = 0.0;     ///< T, T_ell and f
  double t_SVD = 0.0;
  double t_S = 0.0;     ///< all S_ell
  double t_Cmu = 0.0;   ///< B_mu and C_mu
  double t_eig = 0.0;
  double t_zt = 0.0;    ///< simultaneous diagonalisation, z and t
  double t_A = 0.0;
  double t_LS = 0.0;
  double t_total = 0.0;
};

/// The nine stage times in report order: t_T, t_SVD, t_S, t_Cmu, t_eig, t_zt, t_A, t_LS, t_total.
std::array<double, 9> stage_timings(const StageTimings& timings);
inline constexpr std::array<std::string_view, 9> kStageTimingNames = {
    "t_T", "t_SVD", "t_S", "t_Cmu", "t_eig", "t_zt", "t_A", "t_LS", "t_total"};

enum class Stage {
  build_T_f,
  build_T_ell,
  draw_mu,
  build_B_mu,
  svd,
  c_mu,
  eig,
  s_ell,
  diagonalize,
  build_A,
  solve_ls,
};
inline constexpr int kStageCount = 11;
std::string_view to_string(Stage stage);

/// Stages that must finish before the given one may start.
std::vector<Stage> stage_dependencies(Stage stage);

/// Records begin/end of each stage against a global sequence counter.
class ScheduleTrace {
 public:
  struct Event {
    Stage stage;
    char lane;                 ///< 'A' or 'B'
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
    bool finished = false;
  };

  void begin(Stage stage, char lane);
  void end(Stage stage);
  std::vector<Event> events() const;

  /// Human-readable list of dependency violations; empty when the schedule is sound.
  std::vector<std::string> violations() const;

 private:
  mutable std::mutex mutex_;
  std::uint64_t clock_ = 0;
  std::vector<Event> events_;
};

struct RecoveryReport {
  RealMatrix t;                 ///< m x d, rows sorted lexicographically
  ComplexVector c;              ///< aligned with t
  double residual_rel = 0.0;
  int rank_detected = 0;
  std::optional<int> rank_expected;
  RealVector sigma;             ///< retained singular values
  NoiseDiagnostics diagnostics;
  StageTimings timings;
  SvdBackend backend = SvdBackend::dense;
  RankCriterion criterion;
  AssemblyMode assembly = AssemblyMode::materialized;
  LaneMode lane_mode = LaneMode::parallel;
  int workers = 1;
  ComplexVector mu;
  int mu_draws = 1;
  int svd_iterations = 0;
  int power_r0 = 0;
  std::vector<double> offdiag;
  std::vector<std::string> warnings;

  /// Detected rank differs from the expected term count.
  bool rank_anomaly() const { return rank_expected && *rank_expected != rank_detected; }
};

/// Multivariate matrix-pencil recovery of (t_j, c_j) from grid samples.
///
/// Stages run on two lanes with joins between them:
///   A: T, f, reduced SVD      | B: T_ell, mu, B_mu
///   A: C_mu, eigenvectors W   | B: S_ell
///                             | B: W^-1 S_ell W, z, t, A
///   A: least squares for c
///
/// \throws EmptyModelError if the detected rank is zero; backend errors propagate.
RecoveryReport run_prony(const SampleGrid& grid, const PipelineConfig& config,
                         ScheduleTrace* trace = nullptr);

/// Resolved backend for a configuration (applies the default rule).
SvdBackend effective_backend(const PipelineConfig& config);

}  // namespace prony
