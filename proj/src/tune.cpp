#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "decayreach/index.hpp"
#include "decayreach/query.hpp"
#include "decayreach/workload.hpp"

namespace decayreach {

namespace fs = std::filesystem;

TuneResult tune_parameters(const TrajectoryDataset& ds, const TuneOptions& opts) {
  if (opts.c_candidates.empty() || opts.h_candidates.empty())
    throw std::invalid_argument("tune: empty candidate grid");
  if (opts.n_queries == 0) throw std::invalid_argument("tune: workload of zero queries");
  if (!(opts.prefix_fraction > 0.0) || opts.prefix_fraction > 1.0)
    throw std::invalid_argument("tune: prefix fraction must be in (0, 1]");
  if (!opts.decay.valid()) throw std::invalid_argument("tune: invalid decay parameters");

  // Ascending scan order is what makes "ties fall to the smaller C, then
  // the smaller H" come out of a strict less-than comparison.
  std::vector<std::uint32_t> cs = opts.c_candidates;
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::vector<double> hs = opts.h_candidates;
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());

  const auto want =
      static_cast<std::uint32_t>(std::llround(ds.n_ticks * opts.prefix_fraction));
  const std::uint32_t prefix_len = std::min(ds.n_ticks, std::max<std::uint32_t>(2, want));
  const TrajectoryDataset prefix = take_prefix(ds, prefix_len);

  ReachWorkloadOptions wopts;
  wopts.n_queries = opts.n_queries;
  wopts.len_min_s = opts.query_len_s;
  wopts.len_max_s = opts.query_len_s;
  wopts.decays = {opts.decay};
  wopts.seed = opts.seed;
  const std::vector<ReachQuery> workload =
      make_reach_workload(prefix.grid, prefix.n_objects, prefix.n_ticks, wopts);

  const bool own_root = opts.work_dir.empty();
  const fs::path root =
      own_root ? fs::temp_directory_path() / "decayreach-tune" : fs::path(opts.work_dir);
  fs::create_directories(root);

  TuneResult result;
  result.prefix_ticks = prefix_len;
  double best_cost = 0.0;
  bool have_best = false;
  for (const std::uint32_t c : cs) {
    for (const double h : hs) {
      IndexParams params;
      params.c_ticks = c;
      params.grid_h = h;
      params.mu = opts.mu;
      params.d_cont = opts.d_cont;
      const fs::path dir =
          root / ("c" + std::to_string(c) + "-h" + std::to_string(std::llround(h)));
      fs::create_directories(dir);
      preprocess(prefix, params, dir);

      const StoredIndex index = StoredIndex::open(dir);
      double total = 0.0;
      for (const ReachQuery& q : workload) {
        const ReachAnswer ans = answer_query(index, q);
        total += static_cast<double>(ans.io.weighted_cost());
      }
      TuneCell cell;
      cell.c_ticks = c;
      cell.grid_h = h;
      cell.mean_weighted_cost = total / opts.n_queries;
      result.table.push_back(cell);

      // Strict comparison in C-major, H-minor order: ties fall to the
      // smaller C, then the smaller H.
      if (!have_best || cell.mean_weighted_cost < best_cost) {
        best_cost = cell.mean_weighted_cost;
        result.c_ticks = c;
        result.grid_h = h;
        have_best = true;
      }
      if (own_root) fs::remove_all(dir);
    }
  }
  if (own_root) fs::remove_all(root);
  return result;
}

}  // namespace decayreach
