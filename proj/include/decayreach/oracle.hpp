#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "decayreach/contacts.hpp"
#include "decayreach/core.hpp"
#include "decayreach/dataset.hpp"

namespace decayreach {

/// Maximal contact runs over the whole timeline, every pair tested at
/// every instant with no candidate filtering, no blocking and no
/// duration pruning. Sorted by (a, b, tau_start); boundary flags unused.
std::vector<Meeting> oracle_meetings(const TrajectoryDataset& ds, double d_cont);

/// Brute-force reach table from one source: best[h][obj] is the earliest
/// instant at which obj holds the item after at most h transfers, or
/// kNoTau. Layer h is computed from layer h-1 alone, one relaxation per
/// meeting, so the result is independent of any sweep ordering. Transfers
/// follow the same rule as the engine: a transfer along meeting [s, e]
/// from a sender reached at tau_R completes at max(s, tau_R) + mu if the
/// meeting and the query interval still cover that instant. Meetings
/// shorter than mu carry nothing.
struct OracleReach {
  TauIndex tau_from = 0;
  TauIndex tau_to = 0;
  std::vector<std::vector<TauIndex>> best;  // best[h][obj], h = 0..layers

  bool reached(ObjectId obj) const { return best.back()[obj] != kNoTau; }
  /// Earliest arrival within the interval, over all admitted hop counts.
  TauIndex tau_reached(ObjectId obj) const { return best.back()[obj]; }
  /// Minimum hops over all chains completing by tau_to.
  int h_min_final(ObjectId obj) const;
  /// Minimum hops among chains arriving at the earliest instant.
  int h_at_first_arrival(ObjectId obj) const;
};

OracleReach oracle_reach(const std::vector<Meeting>& meetings, std::uint32_t n_objects,
                         ObjectId source, TauIndex tau_from, TauIndex tau_to, std::uint32_t mu,
                         std::optional<int> h_cap);

/// Reference answer for a single-source reachability question.
struct OracleAnswer {
  bool reachable = false;
  TauIndex tau_reached = kNoTau;
  int h_min = kUnreachedHops;
};

OracleAnswer oracle_answer(const std::vector<Meeting>& meetings, std::uint32_t n_objects,
                           ObjectId source, ObjectId target, TauIndex tau_from, TauIndex tau_to,
                           std::uint32_t mu, const DecayParams& decay);

/// Reference top-k: aggregate weights at tau_to from every source's reach
/// table, ranked by weight descending, object id ascending.
struct OracleTopkSource {
  ObjectId object = 0;
  DecayParams decay;
};
struct OracleTopkEntry {
  ObjectId object = 0;
  double weight = 0.0;
};
std::vector<OracleTopkEntry> oracle_topk(const std::vector<Meeting>& meetings,
                                         std::uint32_t n_objects,
                                         const std::vector<OracleTopkSource>& sources,
                                         std::uint32_t k, TauIndex tau_from, TauIndex tau_to,
                                         std::uint32_t mu);

}  // namespace decayreach
