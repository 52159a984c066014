#pragma once

#include <iosfwd>
#include <string>

#include "run_config.hpp"
#include "tvspec/pipeline.hpp"

namespace tvspec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// Entry point of the `tvspec` tool. Messages go to `out` / `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

/// Writes surface.csv, metadata.json and optionally draws.csv into `dir`.
void write_estimate_outputs(const std::string& dir, const RunConfig& cfg,
                            const EstimateResult& result);

}  // namespace tvspec::cli
