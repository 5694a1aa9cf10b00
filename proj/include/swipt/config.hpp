#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "swipt/calibrate.hpp"
#include "swipt/env.hpp"
#include "swipt/experiment.hpp"
#include "swipt/jointpa.hpp"

namespace swipt {

/// Tiny instance handed to the exhaustive oracle.
struct OracleConfig {
  std::int64_t n_slots = 3;
  int grid = 6;
  /// Add the dual solution's per-slot powers to the grid.
  bool inject = true;
};

/// Everything one CLI run needs.
struct RunConfig {
  SystemParams system;
  /// Explicit user distances; empty places users from the seed.
  std::vector<double> distances_m;
  CalibrationConfig calibration;
  PowerConfig power;
  SweepPlan sweep;
  OracleConfig oracle;
  std::string out_dir = "out";
  /// 0 uses every hardware thread.
  int threads = 0;

  /// Throws ConfigError (line 0) naming the first invalid value.
  void validate() const;
};

/// Parses the INI-style format:
///
///   [section]          env, calibrate, jointpa, experiment, cli
///   key = value        lists are comma separated
///   # comment
///
/// Unknown sections and keys, duplicate keys and malformed values throw
/// ConfigError with the 1-based line number. In [jointpa], a *_w key wins
/// over the matching *_dbm key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& file);

/// Canonical text of `cfg`; parse_config(render_config(cfg)) reproduces
/// every value exactly.
std::string render_config(const RunConfig& cfg);

UserGeometry make_geometry(const RunConfig& cfg);

}  // namespace swipt
