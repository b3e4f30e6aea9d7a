#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "prony/signal_model.hpp"

namespace prony {

/// Signal definition: {"d", "m", "t": [[...], ...], "c": [[re, im], ...]}.
nlohmann::json signal_to_json(const ExponentialSum& sum);
ExponentialSum signal_from_json(const nlohmann::json& j);

void save_signal(const ExponentialSum& sum, const std::filesystem::path& path);
ExponentialSum load_signal(const std::filesystem::path& path);

// Grid dump layout (little endian):
//   char[8]  "PRNYGRID"
//   uint32   format version (1)
//   uint32   d
//   uint32   n
//   uint32   reserved (0)
//   double[2 * (2n+2)^d]  (re, im) pairs, box order of SampleGrid
void save_grid(const SampleGrid& grid, const std::filesystem::path& path);
SampleGrid load_grid(const std::filesystem::path& path);

}  // namespace prony
