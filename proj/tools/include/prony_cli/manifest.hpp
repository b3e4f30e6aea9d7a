#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace prony::cli {

/// Run record written next to every result file.
struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  int workers = 1;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
  void save(const std::filesystem::path& path) const;
};

/// Sidecar location for a result file: "<file>.manifest.json".
std::filesystem::path manifest_path_for(const std::filesystem::path& result);

/// First line of every CSV file.
std::string csv_preamble(const std::filesystem::path& manifest);

}  // namespace prony::cli
