#pragma once

#include "splidar/sim.hpp"
#include "splidar/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace splidar {

/// Flat run configuration: scene, sweep, and path settings. Loadable from a
/// key=value text file ('#' comments); unknown keys are rejected. Values
/// from the file are overridden by CLI flags.
struct RunConfig {
  SceneConfig scene;
  SweepSpec sweep;
  std::string scenario = "static";
  std::string irf_kind = "gaussian";  // gaussian | emg | path to CSV
  double irf_fwhm = 28.0;
  std::uint64_t seed = 0;
  double msc = 50.0;
  double sbr = 1.0;
  int msl_bands = 0;  // 0 = single band
};

/// Applies `key=value` lines from `path` onto `config`. Throws on unknown
/// keys or unparsable values, naming the offending line.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

/// Validates cross-field invariants; throws with a message on failure.
void validate(const RunConfig& config);

}  // namespace splidar
