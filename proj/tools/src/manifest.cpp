#include "prony_cli/manifest.hpp"

#include <fstream>
#include <thread>

#include <prony/errors.hpp>
#include <prony/report_io.hpp>

namespace prony::cli {

nlohmann::json RunManifest::to_json() const {
  return {
      {"format", "prony-manifest v1"},
      {"command", command},
      {"parameters", parameters},
      {"environment",
       {{"workers", workers},
        {"hardware_threads", std::thread::hardware_concurrency()},
        {"build_id", build_id()}}},
      {"outputs", outputs},
  };
}

void RunManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << to_json().dump(2) << '\n';
}

std::filesystem::path manifest_path_for(const std::filesystem::path& result) {
  return std::filesystem::path(result.string() + ".manifest.json");
}

std::string csv_preamble(const std::filesystem::path& manifest) {
  return "# prony-csv v1 manifest=" + manifest.filename().string();
}

}  // namespace prony::cli
