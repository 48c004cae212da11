#include "decayreach/workload.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace decayreach {

namespace {

// Matches the generator: top 53 bits of the engine's output, so draws
// are identical on every platform.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

TauIndex draw_length_tau(std::mt19937_64& rng, const TimeGrid& grid, double len_min_s,
                         double len_max_s, TauIndex span) {
  const double tau_per_second = grid.tau_per_tick / grid.delta_t;
  const double len_s = len_min_s + (len_max_s - len_min_s) * unit_draw(rng);
  auto len = static_cast<TauIndex>(std::llround(len_s * tau_per_second));
  len = std::max<TauIndex>(len, 1);
  return std::min(len, span);
}

}  // namespace

std::vector<DecayParams> decay_ladder() {
  // 1 * (1-d)^h against 0.6: admitted transfers are 4, 3, 2, 1.
  return {
      DecayParams{1.0, 0.25, 0.6},
      DecayParams{1.0, 0.20, 0.6},
      DecayParams{1.0, 0.15, 0.6},
      DecayParams{1.0, 0.10, 0.6},
  };
}

DecayParams decay_for_budget(int h_max) {
  if (h_max < 1 || h_max > 4) throw std::invalid_argument("decay_for_budget: h_max not in 1..4");
  return decay_ladder()[static_cast<std::size_t>(h_max - 1)];
}

std::vector<ReachQuery> make_reach_workload(const TimeGrid& grid, std::uint32_t n_objects,
                                            std::uint32_t n_ticks,
                                            const ReachWorkloadOptions& opts) {
  if (n_objects < 2) throw std::invalid_argument("workload: need at least two objects");
  if (n_ticks < 2) throw std::invalid_argument("workload: need at least two ticks");
  if (opts.len_min_s <= 0.0 || opts.len_max_s < opts.len_min_s)
    throw std::invalid_argument("workload: bad length range");

  std::vector<DecayParams> decays = opts.decays.empty() ? decay_ladder() : opts.decays;
  for (const DecayParams& d : decays)
    if (!d.valid()) throw std::invalid_argument("workload: invalid decay parameters");

  const TauIndex span = (n_ticks - 1) * grid.tau_per_tick;
  std::mt19937_64 rng(opts.seed);
  std::vector<ReachQuery> queries;
  queries.reserve(opts.n_queries);
  for (std::uint32_t i = 0; i < opts.n_queries; ++i) {
    ReachQuery q;
    q.decay = decays[i % decays.size()];
    q.source = static_cast<ObjectId>(below(rng, n_objects));
    do {
      q.target = static_cast<ObjectId>(below(rng, n_objects));
    } while (q.target == q.source);
    const TauIndex len = draw_length_tau(rng, grid, opts.len_min_s, opts.len_max_s, span);
    q.tau_from = static_cast<TauIndex>(below(rng, span - len + 1));
    q.tau_to = q.tau_from + len;
    queries.push_back(q);
  }
  return queries;
}

std::vector<TopkQuery> make_topk_workload(const TrajectoryDataset& ds, double d_cont,
                                          const TopkWorkloadOptions& opts) {
  if (opts.n_sources < 1) throw std::invalid_argument("workload: need at least one source");
  if (ds.n_objects < opts.n_sources)
    throw std::invalid_argument("workload: more sources than objects");
  if (ds.n_ticks < 2) throw std::invalid_argument("workload: need at least two ticks");
  if (opts.k_min < 1 || opts.k_max < opts.k_min)
    throw std::invalid_argument("workload: bad k range");
  if (opts.len_min_s <= 0.0 || opts.len_max_s < opts.len_min_s)
    throw std::invalid_argument("workload: bad length range");

  const double d_cc = 2.0 * ds.d_max + d_cont;
  const TauIndex span = ds.tau_end();
  std::mt19937_64 rng(opts.seed);
  std::vector<TopkQuery> queries;
  queries.reserve(opts.n_queries);

  for (std::uint32_t i = 0; i < opts.n_queries; ++i) {
    TopkQuery q;
    q.nu = opts.nu;
    q.k = static_cast<std::uint32_t>(opts.k_min + below(rng, opts.k_max - opts.k_min + 1));
    const TauIndex len = draw_length_tau(rng, ds.grid, opts.len_min_s, opts.len_max_s, span);
    q.tau_from = static_cast<TauIndex>(below(rng, span - len + 1));
    q.tau_to = q.tau_from + len;

    // Group objects by candidate cell at the first reporting tick inside
    // the interval; any cell with enough members gives a co-located
    // source set.
    const auto tick = static_cast<std::uint32_t>(
        std::min<TauIndex>((q.tau_from + ds.grid.tau_per_tick - 1) / ds.grid.tau_per_tick,
                           ds.n_ticks - 1));
    std::map<std::pair<long long, long long>, std::vector<ObjectId>> cells;
    for (ObjectId o = 0; o < ds.n_objects; ++o) {
      const Position& p = ds.at(tick, o);
      cells[{static_cast<long long>(std::floor(p.x / d_cc)),
             static_cast<long long>(std::floor(p.y / d_cc))}]
          .push_back(o);
    }
    std::vector<const std::vector<ObjectId>*> eligible;
    for (const auto& [cell, members] : cells)
      if (members.size() >= opts.n_sources) eligible.push_back(&members);

    std::vector<ObjectId> chosen;
    if (!eligible.empty()) {
      const auto& members = *eligible[below(rng, eligible.size())];
      const std::uint64_t start = below(rng, members.size() - opts.n_sources + 1);
      chosen.assign(members.begin() + static_cast<std::ptrdiff_t>(start),
                    members.begin() + static_cast<std::ptrdiff_t>(start + opts.n_sources));
    } else {
      while (chosen.size() < opts.n_sources) {
        const auto o = static_cast<ObjectId>(below(rng, ds.n_objects));
        if (std::find(chosen.begin(), chosen.end(), o) == chosen.end()) chosen.push_back(o);
      }
    }
    for (std::uint32_t j = 0; j < opts.n_sources; ++j) {
      const DecayParams d = decay_for_budget(1 + static_cast<int>(j % 4));
      q.sources.push_back({chosen[j], d.w, d.d});
    }
    queries.push_back(q);
  }
  return queries;
}

}  // namespace decayreach
