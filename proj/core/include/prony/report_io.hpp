#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "prony/pipeline.hpp"

namespace prony {

nlohmann::json report_to_json(const RecoveryReport& report);

/// Comma-separated stage names, report order.
std::string timings_csv_header();
std::string timings_csv_row(const StageTimings& timings);

/// Identifier of this build, used in run manifests.
std::string build_id();

}  // namespace prony
