#include "prony/report_io.hpp"

#include <cmath>
#include <sstream>

namespace prony {

namespace {

nlohmann::json complex_pair(Complex z) { return {z.real(), z.imag()}; }

}  // namespace

nlohmann::json report_to_json(const RecoveryReport& report) {
  nlohmann::json t = nlohmann::json::array();
  nlohmann::json c = nlohmann::json::array();
  for (Index j = 0; j < report.t.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (Index i = 0; i < report.t.cols(); ++i) row.push_back(report.t(j, i));
    t.push_back(std::move(row));
    c.push_back(complex_pair(report.c(j)));
  }
  nlohmann::json sigma = nlohmann::json::array();
  for (Index i = 0; i < report.sigma.size(); ++i) sigma.push_back(report.sigma(i));
  nlohmann::json mu = nlohmann::json::array();
  for (Index i = 0; i < report.mu.size(); ++i) mu.push_back(complex_pair(report.mu(i)));
  nlohmann::json timings = nlohmann::json::object();
  const auto values = stage_timings(report.timings);
  for (std::size_t i = 0; i < values.size(); ++i) timings[std::string(kStageTimingNames[i])] = values[i];

  nlohmann::json out = {
      {"t", std::move(t)},
      {"c", std::move(c)},
      {"residual_rel", report.residual_rel},
      {"rank_detected", report.rank_detected},
      {"rank_expected", report.rank_expected ? nlohmann::json(*report.rank_expected) : nlohmann::json(nullptr)},
      {"rank_anomaly", report.rank_anomaly()},
      {"sigma", std::move(sigma)},
      {"diagnostics", to_json(report.diagnostics)},
      {"timings", std::move(timings)},
      {"svd_backend", std::string(to_string(report.backend))},
      {"rank_criterion",
       {{"mode", report.criterion.mode == RankCriterion::Mode::machine ? "machine" : "noise"},
        {"tol", report.criterion.tol}}},
      {"assembly", std::string(to_string(report.assembly))},
      {"lane_mode", std::string(to_string(report.lane_mode))},
      {"workers", report.workers},
      {"mu", std::move(mu)},
      {"mu_draws", report.mu_draws},
      {"svd_iterations", report.svd_iterations},
      {"offdiag", report.offdiag},
      {"warnings", report.warnings},
  };
  if (report.backend == SvdBackend::power) out["power_r0"] = report.power_r0;
  return out;
}

std::string timings_csv_header() {
  std::string out;
  for (std::size_t i = 0; i < kStageTimingNames.size(); ++i) {
    if (i) out += ',';
    out += kStageTimingNames[i];
  }
  return out;
}

std::string timings_csv_row(const StageTimings& timings) {
  std::ostringstream out;
  out.precision(9);
  const auto values = stage_timings(timings);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << values[i];
  }
  return out.str();
}

std::string build_id() { return PRONY_BUILD_ID; }

}  // namespace prony
