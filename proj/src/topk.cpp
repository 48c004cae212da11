#include "decayreach/topk.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "decayreach/traversal.hpp"

namespace decayreach {

namespace {

struct Lane {
  DecayParams params;
  int budget = -1;  // negative: below threshold even at the source
};

std::vector<Lane> plan_lanes(const QuerySession& session, TopkQuery& q) {
  const IndexMeta& meta = session.meta();
  if (q.sources.empty()) throw std::invalid_argument("topk: no sources");
  if (q.k == 0) throw std::invalid_argument("topk: k must be positive");
  const TauIndex last = (meta.n_ticks - 1) * meta.grid.tau_per_tick;
  if (q.tau_from > last) throw std::invalid_argument("topk: interval starts past the data");
  if (q.tau_to < q.tau_from) throw std::invalid_argument("topk: empty interval");
  q.tau_to = std::min(q.tau_to, last);

  std::vector<Lane> lanes;
  lanes.reserve(q.sources.size());
  std::set<ObjectId> distinct;
  for (const TopkSource& s : q.sources) {
    if (s.object >= meta.n_objects) throw std::invalid_argument("topk: object id out of range");
    if (!distinct.insert(s.object).second)
      throw std::invalid_argument("topk: duplicate source id");
    Lane lane;
    lane.params = DecayParams{s.w, s.d, q.nu};
    if (!lane.params.valid()) throw std::invalid_argument("topk: invalid decay parameters");
    lane.budget = clamp_budget(max_hops(lane.params), meta.n_objects);
    lanes.push_back(lane);
  }
  return lanes;
}

/// Sum the per-source weights of one object, adding lanes in source
/// order so the arithmetic matches any other implementation that does
/// the same. hops[r] is kUnreachedHops where lane r never arrives.
double aggregate(const std::vector<Lane>& lanes, const std::vector<int>& hops) {
  double total = 0.0;
  for (std::size_t r = 0; r < lanes.size(); ++r)
    total += assigned_weight(lanes[r].params, hops[r]);
  return total;
}

TopkAnswer rank_and_finish(const std::vector<Lane>& lanes,
                           const std::vector<std::map<ObjectId, int>>& lane_hops,
                           TopkAnswer ans, std::uint32_t k, const QuerySession& session) {
  std::map<ObjectId, std::vector<int>> per_object;
  for (std::size_t r = 0; r < lanes.size(); ++r) {
    for (const auto& [obj, h] : lane_hops[r]) {
      auto [it, inserted] =
          per_object.try_emplace(obj, std::vector<int>(lanes.size(), kUnreachedHops));
      it->second[r] = h;
    }
  }
  for (const auto& [obj, hops] : per_object) {
    const double w = aggregate(lanes, hops);
    if (w > 0.0) ans.entries.push_back({obj, w});
  }
  std::sort(ans.entries.begin(), ans.entries.end(), [](const TopkEntry& a, const TopkEntry& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.object < b.object;
  });
  if (ans.entries.size() > k) ans.entries.resize(k);
  ans.io = session.stats();
  return ans;
}

TopkAnswer run_topk(QuerySession& session, const TopkQuery& query, bool use_reached,
                    bool bound_first) {
  TopkQuery q = query;
  const std::vector<Lane> lanes = plan_lanes(session, q);

  // Lanes whose budget admits no transfer still assign weight to their
  // own source (hop 0), so they join the aggregation but not the sweep.
  std::vector<LaneSpec> active;
  std::vector<std::size_t> active_of;  // sweep lane -> query lane
  for (std::size_t r = 0; r < lanes.size(); ++r) {
    if (lanes[r].budget < 0) continue;  // below threshold everywhere
    active.push_back({q.sources[r].object, lanes[r].budget});
    active_of.push_back(r);
  }

  TopkAnswer ans;
  std::vector<std::map<ObjectId, int>> lane_hops(lanes.size());

  if (active.empty()) return rank_and_finish(lanes, lane_hops, std::move(ans), q.k, session);

  std::set<ObjectId> candidates;
  if (bound_first) {
    // Weight bound per object from hop lower bounds; its support is a
    // superset of everything the refinement can produce.
    std::map<ObjectId, double> bound;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t r = active_of[a];
      const ComposeResult compose = compose_reached(session, active[a].source, active[a].budget,
                                                    q.tau_from, q.tau_to, std::nullopt);
      for (const auto& [obj, h_lb] : compose.h_lb)
        bound[obj] += assigned_weight(lanes[r].params, h_lb);
    }
    for (const auto& [obj, w] : bound) {
      if (w <= 0.0) continue;
      ans.bound_weights.emplace(obj, w);
      candidates.insert(obj);
    }
    ans.candidates_after_bound = candidates.size();
  }

  SweepOptions opts;
  opts.use_reached = use_reached;
  if (bound_first) {
    // After each block, compare every candidate's exact-so-far weight
    // with the running k-th best; a candidate whose optimistic bound
    // falls below that floor can never rank, and once at most k remain
    // the membership question is settled. The sweep keeps refining
    // weights either way, so this bookkeeping never changes the answer.
    opts.on_block_end = [&](std::uint32_t block_id, bool, const SweepResult& partial) {
      std::map<ObjectId, double> exact;
      for (ObjectId obj : candidates) {
        double w = 0.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
          const auto sit = partial.lanes[a].find(obj);
          if (sit != partial.lanes[a].end() && sit->second.reached())
            w += assigned_weight(lanes[active_of[a]].params, sit->second.h_min);
        }
        exact.emplace(obj, w);
      }
      std::vector<double> positive;
      for (const auto& [obj, w] : exact)
        if (w > 0.0) positive.push_back(w);
      double f_wmin = 0.0;
      if (positive.size() >= q.k) {
        std::nth_element(positive.begin(), positive.begin() + (q.k - 1), positive.end(),
                         std::greater<double>());
        f_wmin = positive[q.k - 1];
      }
      if (f_wmin > 0.0) {
        for (auto it = candidates.begin(); it != candidates.end();) {
          if (ans.bound_weights.at(*it) < f_wmin)
            it = candidates.erase(it);
          else
            ++it;
        }
      }
      if (ans.termination_block == kNoTerminationBlock && candidates.size() <= q.k)
        ans.termination_block = block_id;
    };
  }
  const SweepResult sweep = sweep_blocks(session, active, q.tau_from, q.tau_to, opts);
  ans.blocks_processed = sweep.blocks_processed;
  ans.blocks_skipped = sweep.blocks_skipped;
  ans.candidates_final = candidates.size();

  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t r = active_of[a];
    for (const auto& [obj, st] : sweep.lanes[a])
      if (st.reached()) lane_hops[r].emplace(obj, st.h_min);
  }
  return rank_and_finish(lanes, lane_hops, std::move(ans), q.k, session);
}

}  // namespace

TopkAnswer answer_topk(QuerySession& session, const TopkQuery& q) {
  return run_topk(session, q, /*use_reached=*/true, /*bound_first=*/true);
}

TopkAnswer answer_topk_meetings_only(QuerySession& session, const TopkQuery& q) {
  return run_topk(session, q, /*use_reached=*/false, /*bound_first=*/false);
}

TopkAnswer answer_topk(const StoredIndex& index, const TopkQuery& q) {
  QuerySession session(index);
  return answer_topk(session, q);
}

TopkAnswer answer_topk_meetings_only(const StoredIndex& index, const TopkQuery& q) {
  QuerySession session(index);
  return answer_topk_meetings_only(session, q);
}

}  // namespace decayreach
