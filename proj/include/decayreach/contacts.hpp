#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "decayreach/core.hpp"
#include "decayreach/dataset.hpp"

namespace decayreach {

/// One time block: C consecutive reporting ticks (the final block may be
/// shorter). The block owns tau indices [tau_begin, tau_end]; consecutive
/// blocks own adjacent, non-overlapping tau ranges.
struct BlockSpec {
  std::uint32_t block_id = 0;
  std::uint32_t first_tick = 0;
  std::uint32_t last_tick = 0;
  TauIndex tau_begin = 0;
  TauIndex tau_end = 0;
};

/// Splits a dataset of n_ticks reporting ticks into blocks of c_ticks.
/// Block k owns tau [k*C*r, (k+1)*C*r - 1]; the final block ends at the
/// dataset's last instant.
std::vector<BlockSpec> plan_blocks(std::uint32_t n_ticks, std::uint32_t c_ticks,
                                   std::uint32_t tau_per_tick);

/// A maximal run of contact instants between two objects inside one
/// block. tau indices are global. boundary_start / boundary_end mark
/// runs touching the block's first or last instant; those may continue
/// in the neighboring block and are merged at query time.
struct Meeting {
  ObjectId a = 0;  // a < b
  ObjectId b = 0;
  TauIndex tau_start = 0;
  TauIndex tau_end = 0;
  bool boundary_start = false;
  bool boundary_end = false;

  /// Duration in tau units; a single instant has duration 0.
  TauIndex duration() const { return tau_end - tau_start; }
  bool operator==(const Meeting& o) const {
    return a == o.a && b == o.b && tau_start == o.tau_start && tau_end == o.tau_end &&
           boundary_start == o.boundary_start && boundary_end == o.boundary_end;
  }
};

/// One contact instant of a pair, used to feed build_meetings.
struct TauContact {
  ObjectId a = 0;  // a < b
  ObjectId b = 0;
  TauIndex tau = 0;
};

/// Pairs that could be within d_cont of each other at any instant of
/// [t_tick, t_tick+1): all pairs in the same or neighboring grid cells of
/// side d_cc = 2*d_max + d_cont whose distance at the tick is at most
/// d_cc. Pairs are returned with a < b, sorted.
std::vector<std::pair<ObjectId, ObjectId>> candidate_pairs(const TrajectoryDataset& ds,
                                                           std::uint32_t tick, double d_cont);

/// Exact contact instants of one pair during [t_tick, t_tick+1): both
/// positions move linearly between ticks and are sampled at each of the
/// tau_per_tick instants; a contact is distance <= d_cont, inclusive.
/// Returns global tau indices in [tick*r, (tick+1)*r).
std::vector<TauIndex> verify_contacts(const TrajectoryDataset& ds,
                                      std::pair<ObjectId, ObjectId> pair, std::uint32_t tick,
                                      double d_cont);

/// Assembles maximal per-pair contact runs within the block and prunes
/// interior runs shorter than mu. Runs touching the block boundary are
/// kept whatever their duration, since their continuation in the next
/// block may make them long enough. Sorted by (a, b, tau_start).
std::vector<Meeting> build_meetings(std::vector<TauContact> contacts, const BlockSpec& block,
                                    std::uint32_t mu);

/// Full per-block pipeline: candidate cells per tick, per-tau
/// verification, then run assembly.
std::vector<Meeting> detect_block_meetings(const TrajectoryDataset& ds, const BlockSpec& block,
                                           double d_cont, std::uint32_t mu);

}  // namespace decayreach
