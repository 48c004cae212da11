#pragma once

#include <cstdint>
#include <vector>

#include "decayreach/core.hpp"
#include "decayreach/dataset.hpp"
#include "decayreach/query.hpp"
#include "decayreach/topk.hpp"

namespace decayreach {

/// Decay rates that, with initial weight 1 and threshold 0.6, admit
/// exactly 1, 2, 3 and 4 transfers. Workloads cycle through them to
/// sweep the hop budget without naming budgets directly.
std::vector<DecayParams> decay_ladder();

/// The ladder entry admitting exactly h_max transfers, h_max in 1..4.
DecayParams decay_for_budget(int h_max);

struct ReachWorkloadOptions {
  std::uint32_t n_queries = 500;
  double len_min_s = 600.0;
  double len_max_s = 4200.0;
  /// Decay of query i is decays[i % decays.size()]; the ladder when
  /// empty.
  std::vector<DecayParams> decays;
  std::uint64_t seed = 11;
};

/// Seeded reachability workload: distinct source and target, interval of
/// uniform random length placed uniformly inside the data's span. The
/// same inputs yield the same queries, bit for bit.
std::vector<ReachQuery> make_reach_workload(const TimeGrid& grid, std::uint32_t n_objects,
                                            std::uint32_t n_ticks,
                                            const ReachWorkloadOptions& opts);

struct TopkWorkloadOptions {
  std::uint32_t n_queries = 100;
  std::uint32_t n_sources = 4;
  std::uint32_t k_min = 4;
  std::uint32_t k_max = 20;
  double nu = 0.6;
  double len_min_s = 600.0;
  double len_max_s = 4200.0;
  std::uint64_t seed = 13;
};

/// Seeded multi-source top-k workload. Each query's sources share one
/// candidate-grid cell (side 2*d_max + d_cont) at the first reporting
/// tick inside the interval when such a group exists, so the sources
/// plausibly interact; otherwise they are distinct random objects.
/// Weights are 1; source j decays by the ladder entry admitting j+1
/// transfers.
std::vector<TopkQuery> make_topk_workload(const TrajectoryDataset& ds, double d_cont,
                                          const TopkWorkloadOptions& opts);

}  // namespace decayreach
