#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decayreach/core.hpp"

namespace decayreach {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

/// Configuration of the random-waypoint workload generator. A fixed
/// fraction of objects stays stationary; the rest walk trips of uniform
/// random direction, speed and duration inside a square area, reflecting
/// off its walls.
struct GenConfig {
  std::uint32_t n_objects = 200;
  double area_side = 1414.0;      // meters
  std::uint32_t duration_ticks = 1201;
  double delta_t = 6.0;           // seconds per reporting tick
  std::uint32_t tau_per_tick = 6;
  double speed_min = 1.5;         // m/s
  double speed_max = 4.0;
  double moving_fraction = 0.9;
  double trip_min_s = 60.0;
  double trip_max_s = 600.0;
  std::uint64_t seed = 1;
};

/// A dense trajectory table: every object has one position per reporting
/// tick. d_max bounds the displacement of any object across one tick and
/// feeds the candidate-cell size during contact detection.
struct TrajectoryDataset {
  TimeGrid grid;
  std::uint32_t n_objects = 0;
  std::uint32_t n_ticks = 0;
  double d_max = 0.0;
  std::vector<Position> positions;  // tick-major: positions[tick * n_objects + object]

  const Position& at(std::uint32_t tick, ObjectId object) const {
    return positions[static_cast<std::size_t>(tick) * n_objects + object];
  }
  Position& at(std::uint32_t tick, ObjectId object) {
    return positions[static_cast<std::size_t>(tick) * n_objects + object];
  }
  /// Last valid tau index: the final reporting tick itself.
  TauIndex tau_end() const { return (n_ticks - 1) * grid.tau_per_tick; }
};

/// Generates a dataset. Deterministic: the same config yields the same
/// trajectories, bit for bit, independent of platform word order.
TrajectoryDataset generate(const GenConfig& config);

/// Binary trajectory file, magic "STRJ1". Little-endian header
/// (n_objects, delta_t, tau_per_tick, n_ticks, d_max) followed by one
/// (tick, object, x, y) record per position, ordered by tick then object.
void write_dataset(const TrajectoryDataset& ds, const std::string& path);
TrajectoryDataset read_dataset(const std::string& path);

/// Imports a CSV table with columns t,object_id,x,y (header row optional).
/// Every object must have a row for every tick. d_max is computed from
/// the observed displacements.
TrajectoryDataset import_csv(const std::string& path, double delta_t,
                             std::uint32_t tau_per_tick);

/// The first n_ticks reporting ticks of a dataset, with d_max recomputed
/// over the kept span. Used to tune build parameters on a short prefix.
TrajectoryDataset take_prefix(const TrajectoryDataset& ds, std::uint32_t n_ticks);

}  // namespace decayreach
