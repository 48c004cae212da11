#include "decayreach/block_reach.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace decayreach {

namespace {

struct Label {
  TauIndex tau;
  int hops;
  ObjectId object;
  bool operator>(const Label& o) const {
    return std::tie(tau, hops, object) > std::tie(o.tau, o.hops, o.object);
  }
};

}  // namespace

BlockReachRecord reach_hop(ObjectId source, const std::vector<Meeting>& meetings,
                           const BlockSpec& block, std::uint32_t mu) {
  if (mu == 0) throw std::invalid_argument("mu must be at least one tau unit");

  // Adjacency: the meetings each object takes part in.
  std::map<ObjectId, std::vector<const Meeting*>> by_object;
  for (const Meeting& m : meetings) {
    if (m.a >= m.b) throw std::invalid_argument("meeting must satisfy a < b");
    if (m.tau_start < block.tau_begin || m.tau_end > block.tau_end || m.tau_start > m.tau_end)
      throw std::invalid_argument("meeting outside the block's tau range");
    by_object[m.a].push_back(&m);
    by_object[m.b].push_back(&m);
  }

  std::map<ObjectId, BlockReachRecord::Entry> state;
  std::priority_queue<Label, std::vector<Label>, std::greater<Label>> pq;
  pq.push({block.tau_begin, 0, source});

  auto relax = [&](ObjectId obj, TauIndex tau, int hops) {
    const auto it = by_object.find(obj);
    if (it == by_object.end()) return;
    for (const Meeting* m : it->second) {
      const TauIndex window_start = std::max(m->tau_start, tau);
      const TauIndex completes = window_start + mu;
      if (completes > m->tau_end) continue;  // meeting too short from here on
      pq.push({completes, hops + 1, obj == m->a ? m->b : m->a});
    }
  };

  while (!pq.empty()) {
    const Label label = pq.top();
    pq.pop();
    auto& entry = state[label.object];
    if (entry.tau_r == kNoTau) {
      entry.object = label.object;
      entry.tau_r = label.tau;
      entry.h_first = label.hops;
    } else if (label.hops >= entry.h_end) {
      continue;  // dominated: an arrival no later already had fewer hops
    }
    entry.h_end = label.hops;
    entry.steps.push_back({label.tau, label.hops});
    relax(label.object, label.tau, label.hops);
  }

  BlockReachRecord record;
  record.source = source;
  for (auto& [obj, entry] : state)
    if (obj != source) record.reached.push_back(std::move(entry));
  return record;
}

std::vector<BlockReachRecord> reach_all(const std::vector<ObjectId>& sources,
                                        const std::vector<Meeting>& meetings,
                                        const BlockSpec& block, std::uint32_t mu) {
  std::vector<BlockReachRecord> records;
  records.reserve(sources.size());
  for (ObjectId source : sources) records.push_back(reach_hop(source, meetings, block, mu));
  return records;
}

}  // namespace decayreach
