#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "tvspec/pipeline.hpp"

namespace tvspec::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Everything needed to reproduce an `estimate` run.
struct RunConfig {
  std::string input;
  std::string output_dir = "tvspec_out";
  std::size_t m = 50;
  std::size_t thinning = 2;
  PriorConfig prior;
  SamplerConfig sampler;
  std::size_t time_grid = 201;
  std::size_t freq_grid = 101;
  /// Evaluate on the N x 100 grid (t / N, j / 99) instead of the uniform grids.
  bool ase_grid = false;
  bool save_draws = false;
  std::size_t chains = 1;
  /// DGP whose true tv-PSD is used for an ASE entry in the metadata.
  std::optional<std::string> truth;

  /// Pipeline configuration for a series of length `n`.
  [[nodiscard]] EstimateConfig to_estimate_config(std::size_t n) const;
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
void from_json(const nlohmann::json& j, RunConfig& cfg);

}  // namespace tvspec::cli
