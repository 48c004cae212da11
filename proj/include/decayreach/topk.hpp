#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "decayreach/core.hpp"
#include "decayreach/index.hpp"

namespace decayreach {

/// One source of a top-k question: the object, its item's initial
/// weight, and its per-transfer decay. The threshold is shared.
struct TopkSource {
  ObjectId object = 0;
  double w = 1.0;
  double d = 0.0;
};

/// Source ids must be distinct.
struct TopkQuery {
  std::vector<TopkSource> sources;
  double nu = 0.0;
  std::uint32_t k = 1;
  TauIndex tau_from = 0;
  TauIndex tau_to = 0;
};

struct TopkEntry {
  ObjectId object = 0;
  double weight = 0.0;
};

/// Block id recorded when the refinement never shrank the candidate set
/// to k or fewer (or when no bound phase ran).
inline constexpr std::uint32_t kNoTerminationBlock = 0xffffffffu;

struct TopkAnswer {
  /// Objects with the largest aggregate weight at the interval's end,
  /// heaviest first, ties to the smaller id. At most k entries; objects
  /// with zero aggregate weight never appear.
  std::vector<TopkEntry> entries;
  IoStats io;
  std::uint32_t blocks_processed = 0;
  std::uint32_t blocks_skipped = 0;
  /// Optimistic aggregate weight per object, from hop lower bounds over
  /// the reach-set composition. Zero-bound objects are omitted; every
  /// exact weight is bounded above by its entry here.
  std::map<ObjectId, double> bound_weights;
  /// Objects whose weight bound cleared zero; the true result set is
  /// always contained in these.
  std::uint64_t candidates_after_bound = 0;
  /// Candidates still alive after the refinement's last block: those the
  /// running k-th exact weight never disqualified.
  std::uint64_t candidates_final = 0;
  /// First block after whose refinement at most k candidates survived.
  /// Later blocks can still tighten the survivors' weights, so the sweep
  /// continues, advancing them from reach records where it can; answers
  /// with and without this bookkeeping are identical.
  std::uint32_t termination_block = kNoTerminationBlock;
};

/// Bound aggregate weights through the precomputed reach sets, then
/// refine to exact values with the reach-driven multi-lane sweep.
TopkAnswer answer_topk(QuerySession& session, const TopkQuery& q);
TopkAnswer answer_topk(const StoredIndex& index, const TopkQuery& q);

/// Competitor: the same lanes swept through every overlapped block's
/// meetings with no reach pages and no skipping.
TopkAnswer answer_topk_meetings_only(QuerySession& session, const TopkQuery& q);
TopkAnswer answer_topk_meetings_only(const StoredIndex& index, const TopkQuery& q);

}  // namespace decayreach
