#include "decayreach/traversal.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

namespace decayreach {

namespace {

struct Label {
  TauIndex tau = 0;
  int hops = 0;
  int lane = 0;
  ObjectId object = 0;
  bool seed = false;
};

// Min-heap order: earliest instant first, then fewest hops, so the first
// accepted label of an object carries the smallest hop count among all
// chains arriving at its earliest instant.
struct LabelGreater {
  bool operator()(const Label& a, const Label& b) const {
    if (a.tau != b.tau) return a.tau > b.tau;
    if (a.hops != b.hops) return a.hops > b.hops;
    if (a.lane != b.lane) return a.lane > b.lane;
    if (a.object != b.object) return a.object > b.object;
    return a.seed && !b.seed;
  }
};

/// A transfer window that reached the end of its block with the meeting
/// flagged as possibly continuing: completion is decided in the next
/// block against the continuation fragment.
struct Crossing {
  int lane = 0;
  ObjectId sender = 0;
  ObjectId receiver = 0;
  TauIndex window = 0;
  int hops = 0;
};

/// An exact boundary arrival taken from a carry record during a folded
/// block: the receiver holds the item from `tau` on, at `hops` total
/// transfers, landing inside the block after the record's own.
struct Delivery {
  int lane = 0;
  ObjectId object = 0;
  TauIndex tau = 0;
  int hops = 0;
};

}  // namespace

int clamp_budget(const HopBudget& budget, std::uint32_t n_objects) {
  if (budget.kind == HopBudget::Kind::SourceOnly) return -1;
  const int cap =
      n_objects == 0 ? 0 : static_cast<int>(std::min<std::uint32_t>(n_objects - 1, 0x7fffu));
  if (budget.kind == HopBudget::Kind::Unbounded) return cap;
  return std::min(budget.h_max, cap);
}

SweepResult sweep_blocks(QuerySession& session, const std::vector<LaneSpec>& lanes,
                         TauIndex tau_from, TauIndex tau_to, const SweepOptions& opts) {
  if (tau_to < tau_from) throw std::invalid_argument("sweep: empty interval");
  if (lanes.empty()) throw std::invalid_argument("sweep: no lanes");
  const std::uint32_t mu = session.meta().params.mu;

  SweepResult result;
  result.lanes.resize(lanes.size());
  for (std::size_t r = 0; r < lanes.size(); ++r) {
    if (lanes[r].source >= session.meta().n_objects)
      throw std::invalid_argument("sweep: source out of range");
    LaneObjectState st;
    st.tau_first = tau_from;
    st.h_first = 0;
    st.h_min = 0;
    result.lanes[r].emplace(lanes[r].source, st);
    if (opts.stop_at && opts.stop_at->first == static_cast<int>(r) &&
        opts.stop_at->second == lanes[r].source) {
      result.stopped_early = true;
      return result;
    }
  }

  std::vector<Crossing> pending;
  std::vector<Delivery> deliveries;

  for (const BlockDirEntry& entry : session.directory()) {
    const BlockSpec& block = entry.spec;
    if (block.tau_end < tau_from) continue;
    if (block.tau_begin > tau_to) break;

    // A block the interval clips at the start cannot be advanced from
    // reach records: they assume presence from the block's first instant.
    // A block clipped at the end can, when the sweep has a stop target:
    // record arrivals at or before tau_to are real first arrivals, later
    // ones are censored, and only the target's first arrival is promised
    // to the caller, so the unknowable fields never surface.
    const bool leading_clip = block.tau_begin < tau_from;
    const bool trailing_clip = block.tau_end > tau_to;
    const bool tail_fold =
        trailing_clip && !leading_clip && opts.use_reached && opts.stop_at.has_value();
    bool meetings_mode = !opts.use_reached || leading_clip || (trailing_clip && !tail_fold);

    // While every lane still holds only its source, a block whose source
    // runs are empty cannot change anything: no in-block chain starts, no
    // carry leaves, and a crossing window out of it would find its
    // contact lapsed wherever the builder found no carry. This also
    // advances leading blocks the interval clips, where the fold proper
    // is off limits; the pages it checks are the same ones the reach
    // phase already walked.
    if (opts.use_reached && pending.empty() && deliveries.empty()) {
      bool sources_only = true;
      for (std::size_t r = 0; r < lanes.size() && sources_only; ++r)
        if (result.lanes[r].size() != 1) sources_only = false;
      if (sources_only) {
        std::set<ObjectId> src_set;
        for (std::size_t r = 0; r < lanes.size(); ++r)
          if (lanes[r].budget >= 1) src_set.insert(lanes[r].source);
        std::vector<ObjectId> srcs(src_set.begin(), src_set.end());
        if (session.prefer_scan(block.block_id, true, srcs.size()))
          session.scan_block(block.block_id, true);
        else if (!srcs.empty())
          session.order_by_run_position(block.block_id, true, srcs);
        bool all_empty = true;
        for (ObjectId s : srcs)
          if (!session.reached_for(block.block_id, s).empty()) {
            all_empty = false;
            break;
          }
        if (all_empty) {
          ++result.blocks_skipped;
          if (opts.on_block_end) opts.on_block_end(block.block_id, false, result);
          continue;
        }
      }
    }

    // A live crossing from a processed block resolves here against its
    // continuation fragment; each completion is an exact arrival, so the
    // block can still advance by fold. Consecutive blocks adjoin in the
    // meetings file, so these checks usually continue the previous
    // block's scan instead of seeking.
    if (!meetings_mode && !pending.empty()) {
      std::set<ObjectId> sender_set;
      for (const Crossing& c : pending) sender_set.insert(c.sender);
      std::vector<ObjectId> senders(sender_set.begin(), sender_set.end());
      if (session.prefer_scan(block.block_id, false, senders.size()))
        session.scan_block(block.block_id, false);
      else
        session.order_by_run_position(block.block_id, false, senders);
      for (const Crossing& c : pending) {
        if (c.hops > lanes[c.lane].budget) continue;
        const TauIndex completes = c.window + mu;
        if (completes > tau_to) continue;
        for (const MeetingRecord& m : session.meetings_for(block.block_id, c.sender)) {
          if (m.peer != c.receiver || m.tau_start != block.tau_begin || !m.boundary_start)
            continue;
          if (completes <= m.tau_end)
            deliveries.push_back({c.lane, c.receiver, completes, c.hops});
          break;  // fragments of one pair are disjoint; only one can start here
        }
      }
      pending.clear();
    }

    if (!meetings_mode) {
      // Reach-driven advance. Every chain delivering inside this block
      // starts from an object already holding the item at the block's
      // first instant, so folding the carried members' records over the
      // pre-block states reproduces the meetings sweep exactly: tau_r and
      // h_at_first give the earliest arrival, hops() the end-of-block
      // minimum. The fold works from a snapshot: improvements staged for
      // one object never feed another object's update within the block,
      // because the records already cover chains through intermediates.
      struct FirstCand {
        TauIndex tau;
        int hops;
      };
      std::vector<std::map<ObjectId, int>> staged_h(lanes.size());
      std::vector<std::map<ObjectId, FirstCand>> staged_first(lanes.size());
      // Deferred escalation suspects, judged against the folded state: a
      // carry whose intermediate deliveries are unrecorded, or a definite
      // record whose first arrival busts the budget while some later
      // in-block chain fits it (the record does not say when).
      struct CarrySuspect {
        std::size_t lane;
        ObjectId object;
        int hops;
      };
      struct StraddleSuspect {
        std::size_t lane;
        ObjectId object;
        TauIndex tau_limit;
        int hops_end;
      };
      std::vector<CarrySuspect> carry_suspects;
      std::vector<StraddleSuspect> straddle_suspects;
      std::vector<Delivery> staged_deliveries;

      std::set<ObjectId> member_set;
      for (std::size_t r = 0; r < lanes.size(); ++r)
        for (const auto& [obj, st] : result.lanes[r])
          if (st.h_min + 1 <= lanes[r].budget) member_set.insert(obj);
      std::vector<ObjectId> members(member_set.begin(), member_set.end());
      if (session.prefer_scan(block.block_id, true, members.size()))
        session.scan_block(block.block_id, true);
      else if (!members.empty())
        session.order_by_run_position(block.block_id, true, members);

      for (ObjectId m : members) {
        const std::vector<ReachedRecord>& recs = session.reached_for(block.block_id, m);
        if (recs.empty()) continue;
        for (std::size_t r = 0; r < lanes.size(); ++r) {
          const auto mit = result.lanes[r].find(m);
          if (mit == result.lanes[r].end()) continue;
          const int base = mit->second.h_min;
          if (base + 1 > lanes[r].budget) continue;
          for (const ReachedRecord& rec : recs) {
            if (rec.carry()) {
              // A builder-verified delivery into the next block: hops()
              // is the hop minimum over its windows, h_at_first() the
              // hops of the earliest. When they differ, windows between
              // them exist whose instants the record does not keep, so
              // the next block could need them; judge that after the
              // fold. A single-point carry defers as an exact arrival.
              const int he = base + rec.hops();
              if (he > lanes[r].budget) continue;
              if (rec.tau_r > tau_to) continue;  // lands beyond the interval
              if (rec.h_at_first() > rec.hops())
                carry_suspects.push_back({r, rec.object, he});
              else
                staged_deliveries.push_back(
                    {static_cast<int>(r), rec.object, rec.tau_r, he});
              continue;
            }
            const int hf = base + rec.h_at_first();
            const int he = base + rec.hops();
            if (he > lanes[r].budget) continue;  // nothing fits by block end
            if (rec.tau_r > tau_to) continue;    // every arrival censored
            const auto rit = result.lanes[r].find(rec.object);
            const bool unreached = rit == result.lanes[r].end();
            auto& sh = staged_h[r];
            const auto [hit, fresh] = sh.emplace(rec.object, he);
            if (!fresh && he < hit->second) hit->second = he;
            if (!unreached) continue;  // first arrival already fixed earlier
            if (hf <= lanes[r].budget) {
              auto& sf = staged_first[r];
              const auto [fit, inserted] = sf.emplace(rec.object, FirstCand{rec.tau_r, hf});
              if (!inserted && (rec.tau_r < fit->second.tau ||
                                (rec.tau_r == fit->second.tau && hf < fit->second.hops)))
                fit->second = {rec.tau_r, hf};
            } else {
              // A chain fits the budget by block end, yet the one arriving
              // first does not; when it lands is not recorded.
              straddle_suspects.push_back({r, rec.object, rec.tau_r, he});
            }
          }
        }
      }

      // Deliveries landing in this block are exact arrival points; merge
      // them with the staged record candidates.
      for (const Delivery& d : deliveries) {
        const auto lane = static_cast<std::size_t>(d.lane);
        auto& sh = staged_h[lane];
        const auto [hit, fresh] = sh.emplace(d.object, d.hops);
        if (!fresh && d.hops < hit->second) hit->second = d.hops;
        if (result.lanes[lane].count(d.object) > 0) continue;
        auto& sf = staged_first[lane];
        const auto [fit, inserted] = sf.emplace(d.object, FirstCand{d.tau, d.hops});
        if (!inserted && (d.tau < fit->second.tau ||
                          (d.tau == fit->second.tau && d.hops < fit->second.hops)))
          fit->second = {d.tau, d.hops};
      }

      bool escalate = false;
      for (const StraddleSuspect& s : straddle_suspects) {
        // Safe if some known arrival is no later than any hidden
        // admissible one; those all land strictly after the record's
        // tau_r. At a trailing clipped block, hidden arrivals past tau_to
        // are censored outright. Otherwise the object is reached within
        // budget at an unrecorded instant: when the sweep reports first
        // arrivals for a stop target elsewhere, pin the object's exact
        // hop floor and leave its arrival instant approximate.
        const auto fit = staged_first[s.lane].find(s.object);
        if (fit != staged_first[s.lane].end() && fit->second.tau <= s.tau_limit) continue;
        if (tail_fold && s.tau_limit >= tau_to) continue;
        if (opts.stop_at && (opts.stop_at->first != static_cast<int>(s.lane) ||
                             opts.stop_at->second != s.object)) {
          staged_first[s.lane].emplace(s.object,
                                       FirstCand{std::min(block.tau_end, tau_to), s.hops_end});
          continue;
        }
        escalate = true;
        break;
      }
      for (std::size_t i = 0; i < carry_suspects.size() && !escalate; ++i) {
        // The unrecorded intermediate deliveries are dominated exactly
        // when the receiver ends the block reached at their hop floor or
        // better; otherwise the next block needs the real windows.
        const CarrySuspect& s = carry_suspects[i];
        const auto rit = result.lanes[s.lane].find(s.object);
        int folded = rit != result.lanes[s.lane].end() ? rit->second.h_min : kUnreachedHops;
        const auto hit = staged_h[s.lane].find(s.object);
        if (hit != staged_h[s.lane].end()) folded = std::min(folded, hit->second);
        const bool folded_reached =
            rit != result.lanes[s.lane].end() || staged_first[s.lane].count(s.object) > 0;
        if (!folded_reached || s.hops < folded) escalate = true;
      }

      // An incoming delivery's receiver joined mid-block, so its own
      // records were not folded. Per receiver, from-begin records bound
      // the mid-block chains from below: any arrival lands no earlier
      // than the record's tau_r and costs at least the delivery hops plus
      // the record hops. The meetings are needed only where that bound
      // leaves room: a record that fits the budget and could create a new
      // reached object, lower a hop floor, beat a first arrival staged
      // this block, or cross into the next block.
      auto folded_h = [&](std::size_t lane, ObjectId obj) {
        int h = kUnreachedHops;
        const auto rit = result.lanes[lane].find(obj);
        if (rit != result.lanes[lane].end()) h = rit->second.h_min;
        const auto hit = staged_h[lane].find(obj);
        if (hit != staged_h[lane].end()) h = std::min(h, hit->second);
        const auto fit = staged_first[lane].find(obj);
        if (fit != staged_first[lane].end()) h = std::min(h, fit->second.hops);
        return h;
      };
      for (const Delivery& d : deliveries) {
        if (escalate) break;
        if (d.hops + 1 > lanes[d.lane].budget) continue;  // cannot relay
        const auto pre = result.lanes[d.lane].find(d.object);
        if (pre != result.lanes[d.lane].end() && pre->second.h_min <= d.hops)
          continue;  // folded as a member at these hops or better
        const auto lane = static_cast<std::size_t>(d.lane);
        for (const ReachedRecord& rec : session.reached_for(block.block_id, d.object)) {
          const int hb = d.hops + rec.hops();
          if (hb > lanes[lane].budget) continue;
          if (rec.carry()) {
            escalate = true;  // crossing windows no one verified from d.tau
            break;
          }
          if (rec.tau_r > tau_to) continue;  // even the earliest arrival is censored
          if (hb < folded_h(lane, rec.object)) {
            escalate = true;
            break;
          }
          const auto fit = staged_first[lane].find(rec.object);
          if (fit != staged_first[lane].end() && result.lanes[lane].count(rec.object) == 0 &&
              (rec.tau_r < fit->second.tau ||
               (rec.tau_r == fit->second.tau && hb < fit->second.hops))) {
            escalate = true;  // could still beat the staged first arrival
            break;
          }
        }
      }

      if (!escalate) {
        bool stopped = false;
        for (std::size_t r = 0; r < lanes.size(); ++r) {
          for (const auto& [obj, cand] : staged_first[r]) {
            LaneObjectState& st = result.lanes[r][obj];
            st.tau_first = cand.tau;
            st.h_first = cand.hops;
            st.h_min = cand.hops;
            if (opts.stop_at && opts.stop_at->first == static_cast<int>(r) &&
                opts.stop_at->second == obj)
              stopped = true;
          }
          for (const auto& [obj, he] : staged_h[r]) {
            const auto it = result.lanes[r].find(obj);
            if (it == result.lanes[r].end()) continue;  // budget-straddled, never escalated
            if (he < it->second.h_min) it->second.h_min = he;
          }
        }
        if (stopped) {
          result.stopped_early = true;
          return result;
        }
        deliveries = std::move(staged_deliveries);
        ++result.blocks_skipped;
        if (opts.on_block_end) opts.on_block_end(block.block_id, false, result);
        continue;
      }
      meetings_mode = true;
    }

    ++result.blocks_processed;

    // Every carried member that can still relax will have its meetings
    // read during the sweep. When they cover most of the block's region,
    // one sequential scan beats per-run seeks; otherwise batch the few
    // reads in file order so they walk the region forward.
    {
      std::set<ObjectId> carried;
      for (std::size_t r = 0; r < lanes.size(); ++r)
        for (const auto& [obj, st] : result.lanes[r])
          if (st.h_min + 1 <= lanes[r].budget) carried.insert(obj);
      std::vector<ObjectId> batch(carried.begin(), carried.end());
      if (session.prefer_scan(block.block_id, false, batch.size())) {
        session.scan_block(block.block_id, false);
      } else if (!batch.empty()) {
        session.order_by_run_position(block.block_id, false, batch);
        for (ObjectId o : batch) session.meetings_for(block.block_id, o);
      }
    }

    std::priority_queue<Label, std::vector<Label>, LabelGreater> pq;
    std::map<std::pair<int, ObjectId>, int> h_cur;

    const TauIndex entry_tau = std::max(block.tau_begin, tau_from);
    for (std::size_t r = 0; r < lanes.size(); ++r)
      for (const auto& [obj, st] : result.lanes[r])
        pq.push({entry_tau, st.h_min, static_cast<int>(r), obj, true});

    // Deliveries from the previous block's fold land here as exact,
    // already-censored arrivals.
    for (const Delivery& d : deliveries) pq.push({d.tau, d.hops, d.lane, d.object, false});
    deliveries.clear();

    for (const Crossing& c : pending) {
      if (c.hops > lanes[c.lane].budget) continue;
      const TauIndex completes = c.window + mu;
      if (completes > tau_to) continue;
      for (const MeetingRecord& m : session.meetings_for(block.block_id, c.sender)) {
        if (m.peer != c.receiver || m.tau_start != block.tau_begin || !m.boundary_start)
          continue;
        if (completes <= m.tau_end) pq.push({completes, c.hops, c.lane, c.receiver, false});
        break;  // fragments of one pair are disjoint; only one can start here
      }
    }
    pending.clear();

    while (!pq.empty()) {
      const Label label = pq.top();
      pq.pop();
      const auto key = std::make_pair(label.lane, label.object);
      const auto hit = h_cur.find(key);
      if (hit != h_cur.end() && label.hops >= hit->second) continue;
      h_cur[key] = label.hops;

      if (!label.seed) {
        LaneObjectState& st = result.lanes[label.lane][label.object];
        if (!st.reached()) {
          st.tau_first = label.tau;
          st.h_first = label.hops;
          st.h_min = label.hops;
          if (opts.stop_at && opts.stop_at->first == label.lane &&
              opts.stop_at->second == label.object) {
            result.stopped_early = true;
            return result;
          }
        } else if (label.hops < st.h_min) {
          st.h_min = label.hops;
        }
      }

      if (label.hops + 1 > lanes[label.lane].budget) continue;
      for (const MeetingRecord& m : session.meetings_for(block.block_id, label.object)) {
        const TauIndex window = std::max(m.tau_start, label.tau);
        if (window > m.tau_end) continue;
        const TauIndex completes = window + mu;
        if (completes <= m.tau_end) {
          if (completes <= tau_to)
            pq.push({completes, label.hops + 1, label.lane, m.peer, false});
        } else if (m.boundary_end) {
          pending.push_back({label.lane, label.object, m.peer, window, label.hops + 1});
        }
      }
    }

    if (opts.on_block_end) opts.on_block_end(block.block_id, true, result);
  }
  return result;
}

ComposeResult compose_reached(QuerySession& session, ObjectId source, int budget,
                              TauIndex tau_from, TauIndex tau_to,
                              std::optional<ObjectId> stop_target) {
  if (tau_to < tau_from) throw std::invalid_argument("compose: empty interval");
  if (source >= session.meta().n_objects)
    throw std::invalid_argument("compose: source out of range");

  ComposeResult res;
  res.h_lb.emplace(source, 0);
  if (stop_target && *stop_target == source) {
    res.target_admitted = true;
    return res;
  }
  if (budget <= 0) return res;

  for (const BlockDirEntry& entry : session.directory()) {
    const BlockSpec& block = entry.spec;
    if (block.tau_end < tau_from) continue;
    if (block.tau_begin > tau_to) break;
    ++res.blocks_seen;

    std::vector<ObjectId> members;
    for (const auto& [obj, h] : res.h_lb)
      if (h + 1 <= budget) members.push_back(obj);
    if (session.prefer_scan(block.block_id, true, members.size()))
      session.scan_block(block.block_id, true);
    else if (!members.empty())
      session.order_by_run_position(block.block_id, true, members);

    // Staged separately: objects admitted by this block start composing
    // from the next one, where they are genuinely carried members.
    std::map<ObjectId, int> staged;
    for (ObjectId m : members) {
      const int base = res.h_lb.at(m);
      for (const ReachedRecord& rec : session.reached_for(block.block_id, m)) {
        const int h = base + rec.hops();
        if (h > budget) continue;
        const auto cur = res.h_lb.find(rec.object);
        if (cur != res.h_lb.end() && cur->second <= h) continue;
        const auto [sit, inserted] = staged.emplace(rec.object, h);
        if (!inserted && h < sit->second) sit->second = h;
      }
    }
    for (const auto& [obj, h] : staged) {
      const auto [it, inserted] = res.h_lb.emplace(obj, h);
      if (!inserted && h < it->second) it->second = h;
    }
    if (stop_target && res.h_lb.count(*stop_target) > 0) {
      res.target_admitted = true;
      return res;
    }
  }
  return res;
}

}  // namespace decayreach
