#pragma once

#include <cstdint>

#include "decayreach/core.hpp"
#include "decayreach/index.hpp"

namespace decayreach {

/// Single-pair reachability question over a stored index: is `target`
/// within reach of `source` during [tau_from, tau_to], given the decay
/// parameters, and if so, when was it first reached.
struct ReachQuery {
  ObjectId source = 0;
  ObjectId target = 0;
  TauIndex tau_from = 0;
  TauIndex tau_to = 0;
  DecayParams decay;
};

enum class ResolutionPhase {
  PrunedAtReachedHop,    // hop composition never admitted the target
  ConfirmedViaMeetings,  // the exact sweep reached the target
  ExhaustedBlocks,       // admitted by composition, refuted by the sweep
};

const char* to_string(ResolutionPhase phase);

struct ReachAnswer {
  bool reachable = false;
  TauIndex tau_reached = kNoTau;
  /// Fewest hops among chains arriving at tau_reached, never above the
  /// budget; kUnreachedHops when unreachable.
  int h_min = kUnreachedHops;
  /// assigned_weight at h_min; 0 when unreachable. The one asymmetry: a
  /// query for the source itself is answered reachable even when the
  /// threshold exceeds the initial weight, with delivered_weight 0.
  double delivered_weight = 0.0;
  ResolutionPhase phase = ResolutionPhase::ExhaustedBlocks;
  HopBudget budget;
  IoStats io;
  std::uint32_t blocks_processed = 0;
  std::uint32_t blocks_skipped = 0;
};

/// Rewrite the decay parameters into a hop budget, prune through the
/// precomputed reach sets, and confirm through meetings only when the
/// target was admitted. Queries pruned at the hop stage never read a
/// meetings page.
ReachAnswer answer_query(QuerySession& session, const ReachQuery& q);
ReachAnswer answer_query(const StoredIndex& index, const ReachQuery& q);

/// Competitor used in measurements: the same exact sweep pushed through
/// every overlapped block's meetings, with no reach pages and no block
/// skipping. Answers are identical; only the page traffic differs.
ReachAnswer answer_query_meetings_only(QuerySession& session, const ReachQuery& q);
ReachAnswer answer_query_meetings_only(const StoredIndex& index, const ReachQuery& q);

}  // namespace decayreach
