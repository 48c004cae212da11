#pragma once

#include <cstdint>
#include <vector>

#include "decayreach/contacts.hpp"
#include "decayreach/core.hpp"

namespace decayreach {

/// A hop improvement: from tau onward the object holds the item having
/// crossed `hops` transfers. Steps are strictly increasing in tau and
/// strictly decreasing in hops.
struct HopStep {
  TauIndex tau = 0;
  int hops = 0;
  bool operator==(const HopStep& o) const { return tau == o.tau && hops == o.hops; }
};

/// Per-source reach summary of one block. `reached` lists objects other
/// than the source; the source itself is implicitly reached at the block
/// start with zero hops. tau_r is the earliest arrival, h_first the hop
/// count of the chain arriving then, h_end the minimum hop count over all
/// chains completing by the block's last instant. Storing h_first next to
/// h_end lets a consumer answer hop questions at the arrival instant
/// without replaying the block's meetings.
struct BlockReachRecord {
  struct Entry {
    ObjectId object = 0;
    TauIndex tau_r = kNoTau;
    int h_first = kUnreachedHops;
    int h_end = kUnreachedHops;
    std::vector<HopStep> steps;  // in-memory only, not persisted

    bool operator==(const Entry& o) const {
      return object == o.object && tau_r == o.tau_r && h_first == o.h_first &&
             h_end == o.h_end;
    }
  };

  ObjectId source = 0;
  std::vector<Entry> reached;  // ascending object id
};

/// Earliest-arrival / minimum-hop sweep from one source over a block's
/// meetings. A transfer along meeting [s, e] from a sender holding the
/// item since tau_R completes at max(s, tau_R) + mu when the meeting
/// still covers that instant; the receiver's hop count is the sender's
/// smallest hop count at the transfer's start, plus one. Boundary
/// meetings too short for an in-block transfer carry nothing here; their
/// continuation is resolved at query time.
BlockReachRecord reach_hop(ObjectId source, const std::vector<Meeting>& meetings,
                           const BlockSpec& block, std::uint32_t mu);

/// reach_hop for every listed source, in order.
std::vector<BlockReachRecord> reach_all(const std::vector<ObjectId>& sources,
                                        const std::vector<Meeting>& meetings,
                                        const BlockSpec& block, std::uint32_t mu);

}  // namespace decayreach
