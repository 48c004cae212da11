#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "decayreach/contacts.hpp"
#include "decayreach/core.hpp"
#include "decayreach/dataset.hpp"

namespace decayreach {

/// Thrown when an index directory fails validation (bad magic, truncated
/// region, inconsistent counts). Distinct from std::invalid_argument so
/// callers can map usage errors and data errors to different exit codes.
class corrupt_index_error : public std::runtime_error {
 public:
  explicit corrupt_index_error(const std::string& what) : std::runtime_error(what) {}
};

/// Build-time knobs of an index. c_ticks is the number of reporting ticks
/// per time block, grid_h the side of the layout grid in space units. mu
/// is the minimum meeting duration baked into the precomputed reach sets;
/// queries answered from this index use the same mu. mu must not exceed
/// one block of instants (c_ticks * tau_per_tick) so that a transfer
/// window never spans more than two consecutive blocks.
struct IndexParams {
  std::uint32_t c_ticks = 20;
  double grid_h = 500.0;
  std::uint32_t mu = 2;
  double d_cont = 10.0;
  std::uint32_t page_size = 4096;
};

struct IndexMeta {
  std::uint32_t n_objects = 0;
  std::uint32_t n_ticks = 0;
  TimeGrid grid;
  IndexParams params;
  std::uint32_t n_blocks = 0;
  double d_max = 0.0;
};

/// One meeting as stored in a per-owner run: the peer object, the global
/// instant range clipped to the block, and flags recording whether the
/// meeting continues past either block edge.
struct MeetingRecord {
  ObjectId peer = 0;
  TauIndex tau_start = 0;
  TauIndex tau_end = 0;
  bool boundary_start = false;
  bool boundary_end = false;
};

/// Precomputed reach entry of one source within one block. A plain entry
/// records an in-block arrival: tau_r is the earliest arrival instant,
/// h_at_first() the transfer count of the chain arriving then, hops() the
/// smallest transfer count over all chains by block end. Both hop values
/// are stored so the query engine can advance exact state across a whole
/// block from the record alone, without opening the block's meetings.
///
/// A carry() entry instead records a delivery that lands in the next
/// block: a transfer window opened near the block edge and the builder
/// verified the contact persists long enough past it. tau_r is then the
/// earliest completion instant (inside the next block), h_at_first() its
/// transfer count, and hops() the smallest count over all verified
/// deliveries. A source's run may hold both kinds for one object: the
/// in-block entry first, then a carry that improves on it.
struct ReachedRecord {
  ObjectId object = 0;
  TauIndex tau_r = kNoTau;
  std::uint16_t h_raw = 0;
  std::uint16_t h_first_raw = 0;

  static constexpr std::uint16_t kCarryBit = 0x8000;
  int hops() const { return static_cast<int>(h_raw & 0x7fffu); }
  int h_at_first() const { return static_cast<int>(h_first_raw); }
  bool carry() const { return (h_raw & kCarryBit) != 0; }
};

/// Placement of one block's four page regions. Pages are absolute page
/// numbers within the owning file; every region starts on a page boundary.
struct PageRegion {
  std::uint32_t first_page = 0;
  std::uint32_t n_pages = 0;
};

struct BlockDirEntry {
  BlockSpec spec;
  PageRegion meet_dat, meet_idx, reach_dat, reach_idx;
};

/// Page access counters under the 20:1 sequential to random cost model.
/// A page is sequential when it immediately follows the previously
/// fetched page of the same file; everything else is random. The
/// weighted cost expresses the total in units of one random access.
struct IoStats {
  std::uint64_t sequential_pages = 0;
  std::uint64_t random_pages = 0;

  std::uint64_t total_pages() const { return sequential_pages + random_pages; }
  std::uint64_t weighted_cost() const { return random_pages + (sequential_pages + 19) / 20; }
  IoStats& operator+=(const IoStats& o) {
    sequential_pages += o.sequential_pages;
    random_pages += o.random_pages;
    return *this;
  }
};

struct PreprocessResult {
  IndexMeta meta;
  std::uint64_t total_meetings = 0;
  std::uint64_t total_reach_entries = 0;
  std::uint64_t carry_entries = 0;
};

/// Build the full index for a dataset and write it to `dir` (created if
/// missing): meetings.dat/.idx, reached.dat/.idx, blocks.idx, meta.json.
PreprocessResult preprocess(const TrajectoryDataset& ds, const IndexParams& params,
                            const std::filesystem::path& dir);

/// Read-only handle to an index directory. Cheap to copy around by
/// reference; all page traffic happens through QuerySession.
class StoredIndex {
 public:
  static StoredIndex open(const std::filesystem::path& dir);

  const IndexMeta& meta() const { return meta_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  IndexMeta meta_;
};

/// One query's view of the index. Charges page accesses as they happen
/// and retains everything it has read for the session's lifetime, so a
/// page or a parsed run is paid for at most once per query. Sessions are
/// independent; concurrent sessions over one StoredIndex are safe.
class QuerySession {
 public:
  explicit QuerySession(const StoredIndex& index);
  ~QuerySession();
  QuerySession(const QuerySession&) = delete;
  QuerySession& operator=(const QuerySession&) = delete;

  const IndexMeta& meta() const;

  /// Time block directory; charged on first call only.
  const std::vector<BlockDirEntry>& directory();

  /// All meetings of `object` inside `block`, empty if it has none.
  const std::vector<MeetingRecord>& meetings_for(std::uint32_t block, ObjectId object);

  /// Precomputed reach set of `source` within `block`, empty if the
  /// source reaches nothing there. The source itself is implicit:
  /// tau_r = block start, hops = 0.
  const std::vector<ReachedRecord>& reached_for(std::uint32_t block, ObjectId source);

  /// Reorder objects by the physical position of their runs inside the
  /// block (reach or meetings file) so a batch of reads walks the region
  /// forward instead of seeking around. Objects without a run keep id
  /// order at the end. Loads the block's run directory if needed.
  void order_by_run_position(std::uint32_t block, bool reach_file,
                             std::vector<ObjectId>& objects);

  /// Number of data pages in the block's reach or meetings region. Only
  /// consults the directory, so calling it costs nothing beyond the
  /// directory's one-time charge.
  std::uint32_t region_pages(std::uint32_t block, bool reach_file);

  /// Whether reading `count` runs from the block is better served by one
  /// region scan than by per-run seeks. Selective access pays the run
  /// directory pages plus up to a page per run and can break the walk's
  /// sequential chain; the scan pays the whole data region but keeps it
  /// contiguous. Consults only the block directory.
  bool prefer_scan(std::uint32_t block, bool reach_file, std::size_t count);

  /// Read the block's whole reach or meetings data region in one pass
  /// (a single seek, then sequential pages) and cache every run in it.
  /// After a scan, lookups against the block are pure cache hits and an
  /// absent run costs nothing; the per-run directory is never touched.
  /// Worth it when a query needs runs on most pages of the region.
  void scan_block(std::uint32_t block, bool reach_file);

  const IoStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Grid search for block length and layout resolution over a prefix of
/// the dataset: builds a throwaway index per candidate pair, replays a
/// fixed random query workload, and keeps the pair with the smallest
/// mean weighted page cost. Ties prefer the smaller block length, then
/// the smaller resolution.
/// Grid search for the block length C and cell size H. Each candidate
/// pair indexes a short prefix of the dataset, replays one deterministic
/// query workload against it, and is scored by mean weighted I/O cost.
struct TuneOptions {
  std::vector<std::uint32_t> c_candidates = {10, 20, 40};
  std::vector<double> h_candidates = {250.0, 500.0, 1000.0};
  std::uint32_t mu = 2;
  double d_cont = 10.0;
  double prefix_fraction = 0.05;
  std::uint32_t n_queries = 50;
  double query_len_s = 1800.0;
  DecayParams decay{1.0, 0.2, 0.6};
  std::uint64_t seed = 7;
  /// Where per-candidate indexes are built; a temporary directory when
  /// empty.
  std::string work_dir;
};

struct TuneCell {
  std::uint32_t c_ticks = 0;
  double grid_h = 0.0;
  double mean_weighted_cost = 0.0;
};

struct TuneResult {
  std::uint32_t c_ticks = 0;  // winner; ties fall to the smaller C, then H
  double grid_h = 0.0;
  std::uint32_t prefix_ticks = 0;
  std::vector<TuneCell> table;  // every candidate pair, C-major order
};

TuneResult tune_parameters(const TrajectoryDataset& ds, const TuneOptions& opts);

}  // namespace decayreach
