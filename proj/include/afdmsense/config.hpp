#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "afdmsense/scenario.hpp"

namespace afdmsense {

// Sweep axes. Empty vector means "use the scalar from the base scenario".
// Multi-valued keys in the config file land here; everything else stays
// scalar on the base ScenarioConfig.
struct GridAxes {
  std::vector<int> num_paths;
  std::vector<double> shape_m;
  std::vector<double> velocity_kmh;
  std::vector<int> est_num_paths;
  std::vector<double> snr_db;
};

struct SweepConfig {
  ScenarioConfig base;
  GridAxes axes;
};

// One expanded grid point. scenario_id enumerates the full grid in the
// canonical loop order num_paths > shape_m > velocity_kmh > est_num_paths >
// snr_db (last axis fastest). geom_key enumerates only the axes that change
// the channel draws (num_paths, shape_m, velocity_kmh), so points differing
// only in SNR or estimator path count reuse identical geometry and noise
// streams; that pairing gives clean comparisons across those axes.
struct GridPoint {
  ScenarioConfig scn;
  int scenario_id = 0;
  std::uint64_t geom_key = 0;
};

// Parse a flat "key = value" file. '#' starts a comment, blank lines are
// skipped, list values are comma-separated and only allowed on the five
// sweep axes. Unknown or duplicate keys are errors.
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

// Canonical serialization (every key, one per line, lists joined by ", ").
// parse(serialize(x)) reproduces x.
std::string serialize_config(const SweepConfig& cfg);

std::vector<GridPoint> expand_grid(const SweepConfig& cfg);

}  // namespace afdmsense
