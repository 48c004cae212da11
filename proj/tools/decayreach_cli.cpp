// Command line front end: generate datasets, build and inspect indexes,
// answer reachability and top-k questions, verify against the in-memory
// reference, tune build parameters and benchmark I/O cost.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "decayreach/dataset.hpp"
#include "decayreach/index.hpp"
#include "decayreach/oracle.hpp"
#include "decayreach/query.hpp"
#include "decayreach/topk.hpp"
#include "decayreach/workload.hpp"

namespace dr = decayreach;
using nlohmann::json;

namespace {

unsigned worker_count() {
  if (const char* env = std::getenv("DECAYREACH_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1 && n <= 64) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 8u);
}

/// Run fn(0..n-1) on a small pool. Work items must be independent;
/// callers collect results into preallocated slots so output order never
/// depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n == 0 ? 1 : n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

json io_json(const dr::IoStats& io) {
  return json{{"sequential_pages", io.sequential_pages},
              {"random_pages", io.random_pages},
              {"weighted_cost", io.weighted_cost()}};
}

json budget_json(const dr::HopBudget& b) {
  switch (b.kind) {
    case dr::HopBudget::Kind::Bounded: return json{{"kind", "bounded"}, {"h_max", b.h_max}};
    case dr::HopBudget::Kind::Unbounded: return json{{"kind", "unbounded"}};
    case dr::HopBudget::Kind::SourceOnly: return json{{"kind", "source_only"}};
  }
  return json{{"kind", "?"}};
}

json answer_json(const dr::ReachAnswer& ans) {
  json j;
  j["reachable"] = ans.reachable;
  if (ans.reachable) {
    j["tau_reached"] = ans.tau_reached;
    j["h_min"] = ans.h_min;
  } else {
    j["tau_reached"] = nullptr;
    j["h_min"] = nullptr;
  }
  j["delivered_weight"] = ans.delivered_weight;
  j["phase"] = dr::to_string(ans.phase);
  j["budget"] = budget_json(ans.budget);
  j["io"] = io_json(ans.io);
  j["blocks_processed"] = ans.blocks_processed;
  j["blocks_skipped"] = ans.blocks_skipped;
  return j;
}

dr::TrajectoryDataset load_dataset(const std::string& data_path, const std::string& csv_path,
                                   double delta_t, std::uint32_t tau_per_tick) {
  if (!data_path.empty() && !csv_path.empty())
    throw std::invalid_argument("pass either --data or --csv, not both");
  if (!data_path.empty()) return dr::read_dataset(data_path);
  if (!csv_path.empty()) return dr::import_csv(csv_path, delta_t, tau_per_tick);
  throw std::invalid_argument("a dataset is required (--data or --csv)");
}

dr::TopkSource parse_src(const std::string& text) {
  dr::TopkSource s;
  char trailing = 0;
  if (std::sscanf(text.c_str(), "%u:%lf:%lf%c", &s.object, &s.w, &s.d, &trailing) != 3)
    throw std::invalid_argument("--src expects id:w:d, got '" + text + "'");
  return s;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  dr::GenConfig config;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const dr::TrajectoryDataset ds = dr::generate(a.config);
  dr::write_dataset(ds, a.out);
  json j;
  j["path"] = a.out;
  j["n_objects"] = ds.n_objects;
  j["n_ticks"] = ds.n_ticks;
  j["delta_t"] = ds.grid.delta_t;
  j["tau_per_tick"] = ds.grid.tau_per_tick;
  j["d_max"] = ds.d_max;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// -------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string data, csv, out;
  double delta_t = 6.0;
  std::uint32_t tau_per_tick = 6;
  dr::IndexParams params;
};

int cmd_preprocess(const PreprocessArgs& a) {
  const dr::TrajectoryDataset ds = load_dataset(a.data, a.csv, a.delta_t, a.tau_per_tick);
  const dr::PreprocessResult res = dr::preprocess(ds, a.params, a.out);
  json j;
  j["index_dir"] = a.out;
  j["n_blocks"] = res.meta.n_blocks;
  j["n_objects"] = res.meta.n_objects;
  j["n_ticks"] = res.meta.n_ticks;
  j["c_ticks"] = res.meta.params.c_ticks;
  j["grid_h"] = res.meta.params.grid_h;
  j["mu"] = res.meta.params.mu;
  j["d_cont"] = res.meta.params.d_cont;
  j["page_size"] = res.meta.params.page_size;
  j["total_meetings"] = res.total_meetings;
  j["total_reach_entries"] = res.total_reach_entries;
  j["carry_entries"] = res.carry_entries;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------- query

struct QueryArgs {
  std::string index;
  dr::ReachQuery q;
  bool baseline = false;
};

int cmd_query(const QueryArgs& a) {
  const dr::StoredIndex index = dr::StoredIndex::open(a.index);
  const dr::ReachAnswer ans =
      a.baseline ? dr::answer_query_meetings_only(index, a.q) : dr::answer_query(index, a.q);
  json j = answer_json(ans);
  j["variant"] = a.baseline ? "baseline" : "indexed";
  std::cout << j.dump(2) << "\n";
  return 0;
}

// -------------------------------------------------------------------- topk

struct TopkArgs {
  std::string index;
  std::vector<std::string> src_texts;
  dr::TopkQuery q;
  bool baseline = false;
};

int cmd_topk(const TopkArgs& a) {
  dr::TopkQuery q = a.q;
  for (const std::string& t : a.src_texts) q.sources.push_back(parse_src(t));
  const dr::StoredIndex index = dr::StoredIndex::open(a.index);
  const dr::TopkAnswer ans =
      a.baseline ? dr::answer_topk_meetings_only(index, q) : dr::answer_topk(index, q);
  json j;
  j["entries"] = json::array();
  for (const dr::TopkEntry& e : ans.entries)
    j["entries"].push_back(json{{"object", e.object}, {"weight", e.weight}});
  j["k"] = q.k;
  j["candidates_after_bound"] = ans.candidates_after_bound;
  j["candidates_final"] = ans.candidates_final;
  if (ans.termination_block == dr::kNoTerminationBlock)
    j["termination_block"] = nullptr;
  else
    j["termination_block"] = ans.termination_block;
  j["io"] = io_json(ans.io);
  j["blocks_processed"] = ans.blocks_processed;
  j["blocks_skipped"] = ans.blocks_skipped;
  j["variant"] = a.baseline ? "baseline" : "indexed";
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string index, data;
  std::uint32_t n_queries = 100;
  std::uint32_t n_topk = 0;
  std::uint64_t seed = 11;
  double len_min_s = 600.0;
  double len_max_s = 4200.0;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.n_queries == 0 && a.n_topk == 0)
    throw std::invalid_argument("verify: nothing to verify (zero queries)");
  const dr::StoredIndex index = dr::StoredIndex::open(a.index);
  const dr::TrajectoryDataset ds = dr::read_dataset(a.data);
  if (ds.n_objects != index.meta().n_objects || ds.n_ticks != index.meta().n_ticks)
    throw std::runtime_error("verify: dataset does not match the index");
  const std::vector<dr::Meeting> truth = dr::oracle_meetings(ds, index.meta().params.d_cont);
  const std::uint32_t mu = index.meta().params.mu;

  dr::ReachWorkloadOptions wopts;
  wopts.n_queries = a.n_queries;
  wopts.len_min_s = a.len_min_s;
  wopts.len_max_s = a.len_max_s;
  wopts.seed = a.seed;
  const std::vector<dr::ReachQuery> queries =
      dr::make_reach_workload(ds.grid, ds.n_objects, ds.n_ticks, wopts);

  // Both variants face the oracle: the two-phase engine and the
  // meetings-only traversal it is benchmarked against.
  std::vector<std::string> faults(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    const dr::ReachQuery& q = queries[i];
    const dr::OracleAnswer want = dr::oracle_answer(truth, ds.n_objects, q.source, q.target,
                                                    q.tau_from, q.tau_to, mu, q.decay);
    const char* variants[2] = {"engine", "baseline"};
    for (int v = 0; v < 2; ++v) {
      const dr::ReachAnswer got =
          v == 0 ? dr::answer_query(index, q) : dr::answer_query_meetings_only(index, q);
      if (got.reachable != want.reachable ||
          (got.reachable && (got.tau_reached != want.tau_reached || got.h_min != want.h_min))) {
        json detail;
        detail["variant"] = variants[v];
        detail["query"] = {{"source", q.source}, {"target", q.target}, {"from", q.tau_from},
                           {"to", q.tau_to},     {"w", q.decay.w},     {"d", q.decay.d},
                           {"nu", q.decay.nu}};
        detail["engine"] = answer_json(got);
        detail["oracle"] = {{"reachable", want.reachable},
                            {"tau_reached", want.tau_reached},
                            {"h_min", want.h_min}};
        faults[i] = detail.dump();
        return;
      }
    }
  });

  dr::TopkWorkloadOptions topts;
  topts.n_queries = a.n_topk;
  topts.len_min_s = a.len_min_s;
  topts.len_max_s = a.len_max_s;
  topts.seed = a.seed + 1;
  const std::vector<dr::TopkQuery> topk_queries =
      a.n_topk > 0 ? dr::make_topk_workload(ds, index.meta().params.d_cont, topts)
                   : std::vector<dr::TopkQuery>{};
  std::vector<std::string> topk_faults(topk_queries.size());
  parallel_for(topk_queries.size(), [&](std::size_t i) {
    const dr::TopkQuery& q = topk_queries[i];
    std::vector<dr::OracleTopkSource> sources;
    for (const dr::TopkSource& s : q.sources)
      sources.push_back({s.object, dr::DecayParams{s.w, s.d, q.nu}});
    const std::vector<dr::OracleTopkEntry> want =
        dr::oracle_topk(truth, ds.n_objects, sources, q.k, q.tau_from, q.tau_to, mu);
    const char* variants[2] = {"engine", "baseline"};
    for (int v = 0; v < 2; ++v) {
      const dr::TopkAnswer got =
          v == 0 ? dr::answer_topk(index, q) : dr::answer_topk_meetings_only(index, q);
      bool same = got.entries.size() == want.size();
      for (std::size_t e = 0; same && e < want.size(); ++e)
        same = got.entries[e].object == want[e].object && got.entries[e].weight == want[e].weight;
      if (!same) {
        json detail;
        detail["variant"] = variants[v];
        detail["k"] = q.k;
        detail["from"] = q.tau_from;
        detail["to"] = q.tau_to;
        json ge = json::array(), we = json::array();
        for (const dr::TopkEntry& e : got.entries)
          ge.push_back(json{{"object", e.object}, {"weight", e.weight}});
        for (const dr::OracleTopkEntry& e : want)
          we.push_back(json{{"object", e.object}, {"weight", e.weight}});
        detail["engine"] = ge;
        detail["oracle"] = we;
        topk_faults[i] = detail.dump();
        return;
      }
    }
  });

  std::uint64_t mismatches = 0;
  for (const std::string& f : faults)
    if (!f.empty()) {
      if (++mismatches <= 5) std::cerr << "reach mismatch: " << f << "\n";
    }
  std::uint64_t topk_mismatches = 0;
  for (const std::string& f : topk_faults)
    if (!f.empty()) {
      if (++topk_mismatches <= 5) std::cerr << "topk mismatch: " << f << "\n";
    }

  json j;
  j["queries"] = a.n_queries;
  j["mismatches"] = mismatches;
  j["topk_queries"] = a.n_topk;
  j["topk_mismatches"] = topk_mismatches;
  j["ok"] = (mismatches == 0 && topk_mismatches == 0);
  std::cout << j.dump(2) << "\n";
  return (mismatches == 0 && topk_mismatches == 0) ? 0 : 3;
}

// -------------------------------------------------------------------- tune

struct TuneArgs {
  std::string data, csv;
  double delta_t = 6.0;
  std::uint32_t tau_per_tick = 6;
  dr::TuneOptions opts;
};

int cmd_tune(const TuneArgs& a) {
  const dr::TrajectoryDataset ds = load_dataset(a.data, a.csv, a.delta_t, a.tau_per_tick);
  const dr::TuneResult res = dr::tune_parameters(ds, a.opts);
  json j;
  j["c_ticks"] = res.c_ticks;
  j["grid_h"] = res.grid_h;
  j["prefix_ticks"] = res.prefix_ticks;
  j["table"] = json::array();
  for (const dr::TuneCell& c : res.table)
    j["table"].push_back(json{{"c_ticks", c.c_ticks},
                              {"grid_h", c.grid_h},
                              {"mean_weighted_cost", c.mean_weighted_cost}});
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string index;
  std::string sweep = "hmax";  // hmax | length
  std::uint32_t n_queries = 100;
  double len_s = 1800.0;
  std::uint64_t seed = 17;
  std::string out;  // CSV path; stdout when empty
};

struct BenchGroup {
  std::string sweep;
  double value = 0.0;
  std::vector<dr::ReachQuery> queries;
};

int cmd_bench(const BenchArgs& a) {
  const dr::StoredIndex index = dr::StoredIndex::open(a.index);

  std::vector<BenchGroup> groups;
  if (a.sweep == "hmax") {
    for (int h = 1; h <= 4; ++h) {
      dr::ReachWorkloadOptions w;
      w.n_queries = a.n_queries;
      w.len_min_s = a.len_s;
      w.len_max_s = a.len_s;
      w.decays = {dr::decay_for_budget(h)};
      w.seed = a.seed + static_cast<std::uint64_t>(h);
      BenchGroup g;
      g.sweep = "hmax";
      g.value = h;
      g.queries = dr::make_reach_workload(index.meta().grid, index.meta().n_objects,
                                          index.meta().n_ticks, w);
      groups.push_back(std::move(g));
    }
  } else if (a.sweep == "length") {
    for (const double len : {600.0, 1500.0, 2400.0, 3300.0, 4200.0}) {
      dr::ReachWorkloadOptions w;
      w.n_queries = a.n_queries;
      w.len_min_s = len;
      w.len_max_s = len;
      w.seed = a.seed + static_cast<std::uint64_t>(len);
      BenchGroup g;
      g.sweep = "length";
      g.value = len;
      g.queries = dr::make_reach_workload(index.meta().grid, index.meta().n_objects,
                                          index.meta().n_ticks, w);
      groups.push_back(std::move(g));
    }
  } else {
    throw std::invalid_argument("bench: --sweep must be hmax or length");
  }

  std::ostringstream csv;
  csv << "sweep,value,variant,queries,pruned,pruned_fraction,sequential_pages,random_pages,"
         "weighted_cost,mean_weighted_cost\n";
  for (const BenchGroup& g : groups) {
    for (const bool baseline : {false, true}) {
      std::vector<dr::ReachAnswer> answers(g.queries.size());
      parallel_for(g.queries.size(), [&](std::size_t i) {
        answers[i] = baseline ? dr::answer_query_meetings_only(index, g.queries[i])
                              : dr::answer_query(index, g.queries[i]);
      });
      dr::IoStats io;
      std::uint64_t pruned = 0;
      for (const dr::ReachAnswer& ans : answers) {
        io += ans.io;
        if (ans.phase == dr::ResolutionPhase::PrunedAtReachedHop) ++pruned;
      }
      const double nq = static_cast<double>(g.queries.size());
      csv << g.sweep << ',' << g.value << ',' << (baseline ? "baseline" : "indexed") << ','
          << g.queries.size() << ',' << pruned << ',' << (nq > 0 ? pruned / nq : 0.0) << ','
          << io.sequential_pages << ',' << io.random_pages << ',' << io.weighted_cost() << ','
          << (nq > 0 ? static_cast<double>(io.weighted_cost()) / nq : 0.0) << "\n";
    }
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(a.out, std::ios::trunc);
    if (!f) throw std::runtime_error(a.out + ": cannot open for writing");
    f << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disk-backed trajectory reachability: build, query, verify, benchmark"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* c_gen = app.add_subcommand("generate", "generate a synthetic trajectory dataset");
  c_gen->add_option("--out", gen.out, "output dataset path")->required();
  c_gen->add_option("--objects", gen.config.n_objects, "number of objects");
  c_gen->add_option("--area", gen.config.area_side, "square area side, meters");
  c_gen->add_option("--ticks", gen.config.duration_ticks, "number of reporting ticks");
  c_gen->add_option("--delta-t", gen.config.delta_t, "seconds between reporting ticks");
  c_gen->add_option("--tau-per-tick", gen.config.tau_per_tick, "fine instants per tick");
  c_gen->add_option("--speed-min", gen.config.speed_min, "minimum trip speed, m/s");
  c_gen->add_option("--speed-max", gen.config.speed_max, "maximum trip speed, m/s");
  c_gen->add_option("--moving-fraction", gen.config.moving_fraction, "fraction of moving objects");
  c_gen->add_option("--trip-min", gen.config.trip_min_s, "minimum trip duration, seconds");
  c_gen->add_option("--trip-max", gen.config.trip_max_s, "maximum trip duration, seconds");
  c_gen->add_option("--seed", gen.config.seed, "random seed");

  PreprocessArgs pre;
  CLI::App* c_pre = app.add_subcommand("preprocess", "build the block index for a dataset");
  c_pre->add_option("--data", pre.data, "binary dataset path");
  c_pre->add_option("--csv", pre.csv, "CSV dataset path (t,object_id,x,y)");
  c_pre->add_option("--delta-t", pre.delta_t, "CSV only: seconds between ticks");
  c_pre->add_option("--tau-per-tick", pre.tau_per_tick, "CSV only: fine instants per tick");
  c_pre->add_option("--out", pre.out, "index directory")->required();
  c_pre->add_option("--c-ticks", pre.params.c_ticks, "reporting ticks per block");
  c_pre->add_option("--grid-h", pre.params.grid_h, "layout grid cell side, meters");
  c_pre->add_option("--mu", pre.params.mu, "minimum meeting duration, fine instants");
  c_pre->add_option("--d-cont", pre.params.d_cont, "contact distance, meters");
  c_pre->add_option("--page-size", pre.params.page_size, "page size, bytes (power of two)");

  QueryArgs qa;
  CLI::App* c_query = app.add_subcommand("query", "answer one reachability question");
  c_query->add_option("--index", qa.index, "index directory")->required();
  c_query->add_option("--source", qa.q.source, "source object id")->required();
  c_query->add_option("--target", qa.q.target, "target object id")->required();
  c_query->add_option("--w", qa.q.decay.w, "initial weight");
  c_query->add_option("--d", qa.q.decay.d, "decay per transfer");
  c_query->add_option("--nu", qa.q.decay.nu, "acceptance threshold");
  c_query->add_option("--from", qa.q.tau_from, "interval start, fine instants")->required();
  c_query->add_option("--to", qa.q.tau_to, "interval end, fine instants")->required();
  c_query->add_flag("--baseline", qa.baseline, "sweep meetings only, no reach pages");

  TopkArgs ta;
  CLI::App* c_topk = app.add_subcommand("topk", "rank objects by aggregate delivered weight");
  c_topk->add_option("--index", ta.index, "index directory")->required();
  c_topk->add_option("--src", ta.src_texts, "source as id:w:d (repeat per source)")->required();
  c_topk->add_option("--nu", ta.q.nu, "shared acceptance threshold");
  c_topk->add_option("--k", ta.q.k, "result size")->required();
  c_topk->add_option("--from", ta.q.tau_from, "interval start, fine instants")->required();
  c_topk->add_option("--to", ta.q.tau_to, "interval end, fine instants")->required();
  c_topk->add_flag("--baseline", ta.baseline, "sweep meetings only, no reach pages");

  VerifyArgs va;
  CLI::App* c_verify = app.add_subcommand("verify", "replay random queries against the oracle");
  c_verify->add_option("--index", va.index, "index directory")->required();
  c_verify->add_option("--data", va.data, "binary dataset the index was built from")->required();
  c_verify->add_option("--queries", va.n_queries, "number of reachability queries");
  c_verify->add_option("--topk", va.n_topk, "number of top-k queries");
  c_verify->add_option("--seed", va.seed, "workload seed");
  c_verify->add_option("--len-min", va.len_min_s, "minimum interval length, seconds");
  c_verify->add_option("--len-max", va.len_max_s, "maximum interval length, seconds");

  TuneArgs tu;
  CLI::App* c_tune = app.add_subcommand("tune", "grid-search block length and cell size");
  c_tune->add_option("--data", tu.data, "binary dataset path");
  c_tune->add_option("--csv", tu.csv, "CSV dataset path");
  c_tune->add_option("--delta-t", tu.delta_t, "CSV only: seconds between ticks");
  c_tune->add_option("--tau-per-tick", tu.tau_per_tick, "CSV only: fine instants per tick");
  c_tune->add_option("--c-ticks", tu.opts.c_candidates, "candidate block lengths, ticks");
  c_tune->add_option("--grid-h", tu.opts.h_candidates, "candidate cell sides, meters");
  c_tune->add_option("--mu", tu.opts.mu, "minimum meeting duration, fine instants");
  c_tune->add_option("--d-cont", tu.opts.d_cont, "contact distance, meters");
  c_tune->add_option("--prefix", tu.opts.prefix_fraction, "prefix fraction of the time domain");
  c_tune->add_option("--queries", tu.opts.n_queries, "workload size");
  c_tune->add_option("--len", tu.opts.query_len_s, "workload query length, seconds");
  c_tune->add_option("--seed", tu.opts.seed, "workload seed");
  c_tune->add_option("--work-dir", tu.opts.work_dir, "keep per-candidate indexes here");

  BenchArgs ba;
  CLI::App* c_bench = app.add_subcommand("bench", "sweep workloads and report I/O cost as CSV");
  c_bench->add_option("--index", ba.index, "index directory")->required();
  c_bench->add_option("--sweep", ba.sweep, "hmax or length");
  c_bench->add_option("--queries", ba.n_queries, "queries per sweep value");
  c_bench->add_option("--len", ba.len_s, "interval length for the hmax sweep, seconds");
  c_bench->add_option("--seed", ba.seed, "workload seed");
  c_bench->add_option("--out", ba.out, "CSV output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (*c_gen) return cmd_generate(gen);
    if (*c_pre) return cmd_preprocess(pre);
    if (*c_query) return cmd_query(qa);
    if (*c_topk) return cmd_topk(ta);
    if (*c_verify) return cmd_verify(va);
    if (*c_tune) return cmd_tune(tu);
    if (*c_bench) return cmd_bench(ba);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
