#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "decayreach/core.hpp"
#include "decayreach/index.hpp"

namespace decayreach {

/// One traversal lane: an independent source with its own hop budget.
/// Several lanes share every page the traversal touches.
struct LaneSpec {
  ObjectId source = 0;
  int budget = 0;  // largest admissible transfer count, already clamped
};

/// Final reach state of one object within one lane. tau_first is the
/// earliest instant the object held the item, h_first the smallest hop
/// count among chains arriving at that instant, h_min the smallest hop
/// count over all chains completing within the query interval.
struct LaneObjectState {
  TauIndex tau_first = kNoTau;
  int h_first = kUnreachedHops;
  int h_min = kUnreachedHops;

  bool reached() const { return tau_first != kNoTau; }
};

struct SweepResult {
  std::vector<std::map<ObjectId, LaneObjectState>> lanes;
  bool stopped_early = false;
  /// Blocks whose meetings were opened (exact in-block sweep).
  std::uint32_t blocks_processed = 0;
  /// Blocks advanced from reach records alone, meetings untouched.
  std::uint32_t blocks_skipped = 0;
};

struct SweepOptions {
  /// Advance whole interior blocks from the precomputed reach records,
  /// opening a block's meetings only where the records cannot decide the
  /// outcome. Off means a plain meetings traversal of every block.
  bool use_reached = true;
  /// Stop as soon as this (lane, object) is first reached. Without it the
  /// sweep runs the whole interval.
  std::optional<std::pair<int, ObjectId>> stop_at;
  /// Observe the lane states after each overlapped block. Not invoked for
  /// the block that triggers stop_at.
  std::function<void(std::uint32_t block_id, bool processed, const SweepResult& partial)>
      on_block_end;
};

/// Exact earliest-arrival / minimum-hop traversal over the stored block
/// sequence, all lanes at once. A block fully inside the interval and
/// free of boundary carry-over is advanced directly from the reach
/// records of the objects holding the item at its start: each record
/// supplies the exact earliest in-block arrival with its hop count plus
/// the exact end-of-block minimum, and every in-block chain passes
/// through some carried member, so the fold reproduces what the meetings
/// sweep would compute. Meetings are opened only for the partial first
/// and last blocks, blocks entered with a live boundary crossing, and
/// blocks where a record straddles the budget or promises a crossing
/// that could matter; there a label-correcting sweep relaxes the block's
/// meetings exactly, carrying transfer windows over block edges and
/// merging them with their continuation fragments.
SweepResult sweep_blocks(QuerySession& session, const std::vector<LaneSpec>& lanes,
                         TauIndex tau_from, TauIndex tau_to, const SweepOptions& opts);

struct ComposeResult {
  /// Lower bound on the hop count of every object the source might reach
  /// (the source itself appears with 0). Values never exceed the budget.
  std::map<ObjectId, int> h_lb;
  bool target_admitted = false;
  std::uint32_t blocks_seen = 0;
};

/// Hop-composition over precomputed per-block reach sets: a superset of
/// everything reachable within the interval under the budget, touching
/// only reach pages, never meetings. With a target given, returns as soon
/// as the target is admitted.
ComposeResult compose_reached(QuerySession& session, ObjectId source, int budget,
                              TauIndex tau_from, TauIndex tau_to,
                              std::optional<ObjectId> stop_target);

/// Largest useful hop count for a budget: unbounded budgets clamp to
/// n_objects - 1 since a minimal chain never revisits an object.
int clamp_budget(const HopBudget& budget, std::uint32_t n_objects);

}  // namespace decayreach
