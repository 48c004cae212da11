#include "decayreach/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decayreach {

namespace {

double dist2(const Position& p, const Position& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

// Contact at a single instant, by direct interpolation of both tracks.
bool in_contact(const TrajectoryDataset& ds, ObjectId a, ObjectId b, TauIndex tau,
                double d_cont) {
  const std::uint32_t r = ds.grid.tau_per_tick;
  const std::uint32_t tick = tau / r;
  const std::uint32_t s = tau % r;
  Position pa, pb;
  if (tick + 1 >= ds.n_ticks) {
    // Final instant: no successor sample to interpolate toward.
    pa = ds.at(ds.n_ticks - 1, a);
    pb = ds.at(ds.n_ticks - 1, b);
  } else {
    const double f = static_cast<double>(s) / static_cast<double>(r);
    const Position a0 = ds.at(tick, a), a1 = ds.at(tick + 1, a);
    const Position b0 = ds.at(tick, b), b1 = ds.at(tick + 1, b);
    pa = {a0.x + f * (a1.x - a0.x), a0.y + f * (a1.y - a0.y)};
    pb = {b0.x + f * (b1.x - b0.x), b0.y + f * (b1.y - b0.y)};
  }
  return dist2(pa, pb) <= d_cont * d_cont;
}

}  // namespace

std::vector<Meeting> oracle_meetings(const TrajectoryDataset& ds, double d_cont) {
  std::vector<Meeting> out;
  const TauIndex last = ds.tau_end();
  for (ObjectId a = 0; a < ds.n_objects; ++a) {
    for (ObjectId b = a + 1; b < ds.n_objects; ++b) {
      bool open = false;
      TauIndex start = 0;
      for (TauIndex tau = 0; tau <= last; ++tau) {
        const bool c = in_contact(ds, a, b, tau, d_cont);
        if (c && !open) {
          open = true;
          start = tau;
        } else if (!c && open) {
          open = false;
          out.push_back(Meeting{a, b, start, tau - 1, false, false});
        }
      }
      if (open) out.push_back(Meeting{a, b, start, last, false, false});
    }
  }
  return out;
}

OracleReach oracle_reach(const std::vector<Meeting>& meetings, std::uint32_t n_objects,
                         ObjectId source, TauIndex tau_from, TauIndex tau_to, std::uint32_t mu,
                         std::optional<int> h_cap) {
  if (source >= n_objects) throw std::invalid_argument("oracle_reach: source out of range");
  if (tau_to < tau_from) throw std::invalid_argument("oracle_reach: empty interval");
  if (mu == 0) throw std::invalid_argument("oracle_reach: mu must be positive");

  // A chain visiting a new object per transfer uses at most n-1 hops;
  // longer chains revisit and cannot arrive earlier.
  int layers = static_cast<int>(n_objects) - 1;
  if (h_cap.has_value()) layers = std::min(layers, std::max(*h_cap, 0));

  OracleReach r;
  r.tau_from = tau_from;
  r.tau_to = tau_to;
  r.best.assign(static_cast<std::size_t>(layers) + 1,
                std::vector<TauIndex>(n_objects, kNoTau));
  r.best[0][source] = tau_from;

  for (int h = 1; h <= layers; ++h) {
    r.best[h] = r.best[h - 1];
    bool changed = false;
    for (const Meeting& m : meetings) {
      if (m.duration() < mu) continue;
      auto relax = [&](ObjectId from, ObjectId to) {
        const TauIndex got = r.best[h - 1][from];
        if (got == kNoTau) return;
        const TauIndex window = std::max(m.tau_start, got);
        const TauIndex completes = window + mu;
        if (completes > m.tau_end || completes > tau_to) return;
        if (completes < r.best[h][to]) {
          r.best[h][to] = completes;
          changed = true;
        }
      };
      relax(m.a, m.b);
      relax(m.b, m.a);
    }
    if (!changed) {
      // Fixed point: remaining layers are identical.
      for (int rest = h + 1; rest <= layers; ++rest) r.best[rest] = r.best[h];
      break;
    }
  }
  return r;
}

int OracleReach::h_min_final(ObjectId obj) const {
  for (std::size_t h = 0; h < best.size(); ++h) {
    if (best[h][obj] != kNoTau) return static_cast<int>(h);
  }
  return kUnreachedHops;
}

int OracleReach::h_at_first_arrival(ObjectId obj) const {
  const TauIndex first = best.back()[obj];
  if (first == kNoTau) return kUnreachedHops;
  for (std::size_t h = 0; h < best.size(); ++h) {
    if (best[h][obj] == first) return static_cast<int>(h);
  }
  return kUnreachedHops;
}

OracleAnswer oracle_answer(const std::vector<Meeting>& meetings, std::uint32_t n_objects,
                           ObjectId source, ObjectId target, TauIndex tau_from, TauIndex tau_to,
                           std::uint32_t mu, const DecayParams& decay) {
  const HopBudget budget = max_hops(decay);
  OracleAnswer ans;
  if (budget.kind == HopBudget::Kind::SourceOnly) {
    ans.reachable = (source == target);
    if (ans.reachable) {
      ans.tau_reached = tau_from;
      ans.h_min = 0;
    }
    return ans;
  }
  std::optional<int> cap;
  if (budget.kind == HopBudget::Kind::Bounded) cap = budget.h_max;
  const OracleReach r = oracle_reach(meetings, n_objects, source, tau_from, tau_to, mu, cap);
  if (!r.reached(target)) return ans;
  ans.reachable = true;
  ans.tau_reached = r.tau_reached(target);
  // Minimal hops among the chains arriving at the earliest instant; a
  // later chain with fewer hops does not change the answer.
  ans.h_min = r.h_at_first_arrival(target);
  return ans;
}

std::vector<OracleTopkEntry> oracle_topk(const std::vector<Meeting>& meetings,
                                         std::uint32_t n_objects,
                                         const std::vector<OracleTopkSource>& sources,
                                         std::uint32_t k, TauIndex tau_from, TauIndex tau_to,
                                         std::uint32_t mu) {
  if (sources.empty()) throw std::invalid_argument("oracle_topk: no sources");
  std::vector<std::vector<std::pair<DecayParams, int>>> arrivals(n_objects);
  for (const OracleTopkSource& s : sources) {
    const HopBudget budget = max_hops(s.decay);
    if (budget.kind == HopBudget::Kind::SourceOnly) {
      arrivals[s.object].push_back({s.decay, 0});
      continue;
    }
    std::optional<int> cap;
    if (budget.kind == HopBudget::Kind::Bounded) cap = budget.h_max;
    const OracleReach r =
        oracle_reach(meetings, n_objects, s.object, tau_from, tau_to, mu, cap);
    for (ObjectId obj = 0; obj < n_objects; ++obj) {
      const int h = r.h_min_final(obj);
      if (h == kUnreachedHops) continue;
      arrivals[obj].push_back({s.decay, h});
    }
  }

  std::vector<OracleTopkEntry> scored;
  for (ObjectId obj = 0; obj < n_objects; ++obj) {
    if (arrivals[obj].empty()) continue;
    const double w = aggregate_weight(arrivals[obj]);
    if (w > 0.0) scored.push_back({obj, w});
  }
  std::sort(scored.begin(), scored.end(), [](const OracleTopkEntry& x, const OracleTopkEntry& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.object < y.object;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

}  // namespace decayreach
