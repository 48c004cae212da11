#include "decayreach/query.hpp"

#include <algorithm>
#include <stdexcept>

#include "decayreach/traversal.hpp"

namespace decayreach {

namespace {

void validate_query(const QuerySession& session, ReachQuery& q) {
  const IndexMeta& meta = session.meta();
  if (!q.decay.valid()) throw std::invalid_argument("query: invalid decay parameters");
  if (q.source >= meta.n_objects || q.target >= meta.n_objects)
    throw std::invalid_argument("query: object id out of range");
  const TauIndex last = (meta.n_ticks - 1) * meta.grid.tau_per_tick;
  if (q.tau_from > last) throw std::invalid_argument("query: interval starts past the data");
  if (q.tau_to < q.tau_from) throw std::invalid_argument("query: empty interval");
  q.tau_to = std::min(q.tau_to, last);
}

ReachAnswer resolve(QuerySession& session, const ReachQuery& query, bool use_reached) {
  ReachQuery q = query;
  validate_query(session, q);

  ReachAnswer ans;
  ans.budget = max_hops(q.decay);

  if (q.target == q.source) {
    // Confirmed without touching Meetings: the source holds the item at
    // tau_from. delivered_weight stays 0 if even the initial weight sits
    // below the threshold.
    ans.reachable = true;
    ans.tau_reached = q.tau_from;
    ans.h_min = 0;
    ans.delivered_weight = assigned_weight(q.decay, 0);
    ans.phase = ResolutionPhase::ConfirmedViaMeetings;
    ans.io = session.stats();
    return ans;
  }
  const int budget = clamp_budget(ans.budget, session.meta().n_objects);
  if (budget <= 0) {
    // No transfer clears the threshold, or none is admitted: only the
    // source can hold the item.
    ans.phase = ResolutionPhase::PrunedAtReachedHop;
    ans.io = session.stats();
    return ans;
  }

  if (use_reached) {
    const ComposeResult compose =
        compose_reached(session, q.source, budget, q.tau_from, q.tau_to, q.target);
    if (!compose.target_admitted) {
      ans.phase = ResolutionPhase::PrunedAtReachedHop;
      ans.io = session.stats();
      return ans;
    }
  }

  SweepOptions opts;
  opts.use_reached = use_reached;
  // The two-phase engine stops the moment the target is confirmed; the
  // plain traversal walks the interval to its end and reads the answer
  // off the final state.
  if (use_reached) opts.stop_at = {{0, q.target}};
  const SweepResult sweep =
      sweep_blocks(session, {{q.source, budget}}, q.tau_from, q.tau_to, opts);
  ans.blocks_processed = sweep.blocks_processed;
  ans.blocks_skipped = sweep.blocks_skipped;
  const auto st = sweep.lanes[0].find(q.target);
  if (st != sweep.lanes[0].end() && st->second.reached()) {
    ans.reachable = true;
    ans.tau_reached = st->second.tau_first;
    ans.h_min = st->second.h_first;
    ans.delivered_weight = assigned_weight(q.decay, st->second.h_first);
    ans.phase = ResolutionPhase::ConfirmedViaMeetings;
  } else {
    ans.phase = ResolutionPhase::ExhaustedBlocks;
  }
  ans.io = session.stats();
  return ans;
}

}  // namespace

const char* to_string(ResolutionPhase phase) {
  switch (phase) {
    case ResolutionPhase::PrunedAtReachedHop: return "PrunedAtReachedHop";
    case ResolutionPhase::ConfirmedViaMeetings: return "ConfirmedViaMeetings";
    case ResolutionPhase::ExhaustedBlocks: return "ExhaustedBlocks";
  }
  return "?";
}

ReachAnswer answer_query(QuerySession& session, const ReachQuery& query) {
  return resolve(session, query, true);
}

ReachAnswer answer_query_meetings_only(QuerySession& session, const ReachQuery& query) {
  return resolve(session, query, false);
}

ReachAnswer answer_query(const StoredIndex& index, const ReachQuery& q) {
  QuerySession session(index);
  return answer_query(session, q);
}

ReachAnswer answer_query_meetings_only(const StoredIndex& index, const ReachQuery& q) {
  QuerySession session(index);
  return answer_query_meetings_only(session, q);
}

}  // namespace decayreach
