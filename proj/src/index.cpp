#include "decayreach/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <tuple>
#include <utility>

#include "bytes.hpp"
#include "decayreach/block_reach.hpp"

namespace decayreach {

namespace {

constexpr std::size_t kMeetingRecordSize = 13;  // peer u32, start u32, end u32, flags u8
constexpr std::size_t kReachedRecordSize = 12;  // object u32, tau_r u32, h u16, h_first u16
constexpr std::size_t kIdxEntrySize = 18;       // object u32, page u32, offset u16, cell u64
constexpr std::size_t kRunHeaderSize = 8;       // owner u32, count u32
constexpr std::size_t kDirEntrySize = 48;
constexpr std::size_t kFileHeaderSize = 24;     // magic 8, page_size, version, n_blocks, n_objects
constexpr std::uint32_t kFormatVersion = 1;

enum FileKind : int { kMeetDat = 0, kMeetIdx, kReachDat, kReachIdx, kBlocksIdx, kFileKinds };

const char* file_name(int kind) {
  switch (kind) {
    case kMeetDat: return "meetings.dat";
    case kMeetIdx: return "meetings.idx";
    case kReachDat: return "reached.dat";
    case kReachIdx: return "reached.idx";
    case kBlocksIdx: return "blocks.idx";
  }
  return "?";
}

const char* file_magic(int kind) {
  switch (kind) {
    case kMeetDat: return "DRXMEET1";
    case kMeetIdx: return "DRXMIDX1";
    case kReachDat: return "DRXRCHD1";
    case kReachIdx: return "DRXRIDX1";
    case kBlocksIdx: return "DRXBLKS1";
  }
  return "????????";
}

void validate_params(const IndexParams& p, const TimeGrid& grid) {
  if (p.c_ticks == 0) throw std::invalid_argument("index: c_ticks must be positive");
  if (p.mu == 0) throw std::invalid_argument("index: mu must be positive");
  if (p.mu > p.c_ticks * grid.tau_per_tick)
    throw std::invalid_argument(
        "index: mu must fit within one block of instants, otherwise a transfer "
        "window could span more than two blocks");
  if (!(p.d_cont > 0.0)) throw std::invalid_argument("index: d_cont must be positive");
  if (!(p.grid_h > 0.0)) throw std::invalid_argument("index: grid_h must be positive");
  if (p.page_size < 512 || (p.page_size & (p.page_size - 1)) != 0)
    throw std::invalid_argument("index: page_size must be a power of two, at least 512");
}

/// Layout key: grid cell of a position at resolution h, packed so that an
/// ascending sort groups runs column-major by cell.
std::uint64_t cell_of(const Position& p, double h) {
  const auto cx = static_cast<std::int64_t>(std::floor(p.x / h));
  const auto cy = static_cast<std::int64_t>(std::floor(p.y / h));
  const std::uint64_t ux = static_cast<std::uint64_t>(cx + 0x80000000ll) & 0xffffffffull;
  const std::uint64_t uy = static_cast<std::uint64_t>(cy + 0x80000000ll) & 0xffffffffull;
  return (ux << 32) | uy;
}

struct FileBuf {
  std::vector<std::uint8_t> bytes;
  std::uint32_t page_size;

  FileBuf(std::uint32_t ps, const char* magic, std::uint32_t n_blocks, std::uint32_t n_objects)
      : page_size(ps) {
    bytes.reserve(ps * 4);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(magic[i]));
    detail::put_u32(bytes, ps);
    detail::put_u32(bytes, kFormatVersion);
    detail::put_u32(bytes, n_blocks);
    detail::put_u32(bytes, n_objects);
    bytes.resize(ps, 0);  // rest of the header page
  }

  void pad_to_page() {
    const std::size_t aligned = (bytes.size() + page_size - 1) / page_size * page_size;
    bytes.resize(aligned, 0);
  }
  std::uint32_t current_page() const {
    return static_cast<std::uint32_t>(bytes.size() / page_size);
  }
};

struct PendingIdxEntry {
  ObjectId object = 0;
  std::uint32_t page = 0;
  std::uint16_t offset = 0;
  std::uint64_t cell = 0;
};

/// Longest stretch of consecutive contact instants of `pair` starting at
/// tau_from, capped at `mu`. This is all the lookahead a carry entry ever
/// needs: a transfer window opened at the block edge completes at most mu
/// instants past it.
std::uint32_t contact_extension(const TrajectoryDataset& ds, std::pair<ObjectId, ObjectId> pair,
                                TauIndex tau_from, std::uint32_t mu, double d_cont) {
  const std::uint32_t r = ds.grid.tau_per_tick;
  const TauIndex last_tau = (ds.n_ticks - 1) * r;
  std::uint32_t ext = 0;
  std::uint32_t cached_tick = 0;
  bool have_cached = false;
  std::vector<TauIndex> cached;
  for (std::uint32_t k = 0; k < mu; ++k) {
    const TauIndex tau = tau_from + k;
    if (tau > last_tau) break;
    bool contact;
    if (tau == last_tau) {
      // The dataset's final instant has no following interval; test the
      // reported positions directly, mirroring the contact engine.
      const Position& p = ds.at(ds.n_ticks - 1, pair.first);
      const Position& q = ds.at(ds.n_ticks - 1, pair.second);
      const double dx = p.x - q.x, dy = p.y - q.y;
      contact = dx * dx + dy * dy <= d_cont * d_cont;
    } else {
      const std::uint32_t tick = tau / r;
      if (!have_cached || cached_tick != tick) {
        cached = verify_contacts(ds, pair, tick, d_cont);
        cached_tick = tick;
        have_cached = true;
      }
      contact = std::binary_search(cached.begin(), cached.end(), tau);
    }
    if (!contact) break;
    ++ext;
  }
  return ext;
}

/// Append an index region (count + fixed entries, page aligned) and
/// report its placement.
PageRegion write_idx_region(FileBuf& buf, std::vector<PendingIdxEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const PendingIdxEntry& a, const PendingIdxEntry& b) { return a.object < b.object; });
  buf.pad_to_page();
  PageRegion region;
  region.first_page = buf.current_page();
  if (entries.empty()) return region;  // a block nobody meets in: zero pages
  detail::put_u32(buf.bytes, static_cast<std::uint32_t>(entries.size()));
  for (const PendingIdxEntry& e : entries) {
    detail::put_u32(buf.bytes, e.object);
    detail::put_u32(buf.bytes, e.page);
    detail::put_u16(buf.bytes, e.offset);
    detail::put_u64(buf.bytes, e.cell);
  }
  buf.pad_to_page();
  region.n_pages = buf.current_page() - region.first_page;
  return region;
}

}  // namespace

PreprocessResult preprocess(const TrajectoryDataset& ds, const IndexParams& params,
                            const std::filesystem::path& dir) {
  validate_params(params, ds.grid);
  if (ds.n_objects == 0 || ds.n_ticks == 0)
    throw std::invalid_argument("preprocess: empty dataset");
  if (ds.n_objects > 0x8000u)
    throw std::invalid_argument("preprocess: at most 32768 objects (hop counts are 15-bit)");

  const std::vector<BlockSpec> blocks =
      plan_blocks(ds.n_ticks, params.c_ticks, ds.grid.tau_per_tick);
  const auto n_blocks = static_cast<std::uint32_t>(blocks.size());

  std::filesystem::create_directories(dir);

  FileBuf meet_dat(params.page_size, file_magic(kMeetDat), n_blocks, ds.n_objects);
  FileBuf meet_idx(params.page_size, file_magic(kMeetIdx), n_blocks, ds.n_objects);
  FileBuf reach_dat(params.page_size, file_magic(kReachDat), n_blocks, ds.n_objects);
  FileBuf reach_idx(params.page_size, file_magic(kReachIdx), n_blocks, ds.n_objects);
  FileBuf blocks_buf(params.page_size, file_magic(kBlocksIdx), n_blocks, ds.n_objects);

  std::vector<ObjectId> all_sources(ds.n_objects);
  for (ObjectId i = 0; i < ds.n_objects; ++i) all_sources[i] = i;

  PreprocessResult result;
  std::vector<BlockDirEntry> dir_entries;
  dir_entries.reserve(n_blocks);

  for (const BlockSpec& block : blocks) {
    const std::vector<Meeting> meetings =
        detect_block_meetings(ds, block, params.d_cont, params.mu);
    result.total_meetings += meetings.size();

    auto owner_cell = [&](ObjectId o) { return cell_of(ds.at(block.first_tick, o), params.grid_h); };
    auto layout_less = [&](ObjectId a, ObjectId b) {
      const std::uint64_t ca = owner_cell(a), cb = owner_cell(b);
      if (ca != cb) return ca < cb;
      return a < b;
    };

    // Meetings region: one run per participating object, both endpoints
    // owning a copy so a single lookup yields everything the object is
    // part of within the block.
    std::map<ObjectId, std::vector<MeetingRecord>> by_owner;
    for (const Meeting& m : meetings) {
      by_owner[m.a].push_back({m.b, m.tau_start, m.tau_end, m.boundary_start, m.boundary_end});
      by_owner[m.b].push_back({m.a, m.tau_start, m.tau_end, m.boundary_start, m.boundary_end});
    }
    std::vector<ObjectId> owners;
    owners.reserve(by_owner.size());
    for (auto& [owner, records] : by_owner) {
      owners.push_back(owner);
      std::sort(records.begin(), records.end(),
                [](const MeetingRecord& x, const MeetingRecord& y) {
                  if (x.tau_start != y.tau_start) return x.tau_start < y.tau_start;
                  if (x.tau_end != y.tau_end) return x.tau_end < y.tau_end;
                  return x.peer < y.peer;
                });
    }
    std::sort(owners.begin(), owners.end(), layout_less);

    BlockDirEntry dir_entry;
    dir_entry.spec = block;

    meet_dat.pad_to_page();
    dir_entry.meet_dat.first_page = meet_dat.current_page();
    std::vector<PendingIdxEntry> meet_entries;
    for (ObjectId owner : owners) {
      const auto& records = by_owner[owner];
      const std::size_t pos = meet_dat.bytes.size();
      meet_entries.push_back({owner, static_cast<std::uint32_t>(pos / params.page_size),
                              static_cast<std::uint16_t>(pos % params.page_size),
                              owner_cell(owner)});
      detail::put_u32(meet_dat.bytes, owner);
      detail::put_u32(meet_dat.bytes, static_cast<std::uint32_t>(records.size()));
      for (const MeetingRecord& r : records) {
        detail::put_u32(meet_dat.bytes, r.peer);
        detail::put_u32(meet_dat.bytes, r.tau_start);
        detail::put_u32(meet_dat.bytes, r.tau_end);
        std::uint8_t flags = 0;
        if (r.boundary_start) flags |= 1;
        if (r.boundary_end) flags |= 2;
        meet_dat.bytes.push_back(flags);
      }
    }
    meet_dat.pad_to_page();
    dir_entry.meet_dat.n_pages = meet_dat.current_page() - dir_entry.meet_dat.first_page;
    dir_entry.meet_idx = write_idx_region(meet_idx, std::move(meet_entries));

    // Reach region: the per-source sweep results, plus carry entries for
    // deliveries that verifiably land in the next block. A transfer window
    // opened along a block-edge meeting completes at most mu instants past
    // the edge, so checking that the contact persists that far certifies
    // the delivery at build time; the query engine can then treat it as an
    // exact arrival instead of re-deriving it from the meetings.
    const std::vector<BlockReachRecord> reach =
        reach_all(all_sources, meetings, block, params.mu);

    std::vector<std::pair<const Meeting*, std::uint32_t>> bend;
    for (const Meeting& m : meetings) {
      if (!m.boundary_end) continue;
      const std::uint32_t ext =
          contact_extension(ds, {m.a, m.b}, block.tau_end + 1, params.mu, params.d_cont);
      if (ext > 0) bend.emplace_back(&m, ext);
    }

    std::vector<ObjectId> run_sources;
    std::map<ObjectId, std::vector<ReachedRecord>> runs;
    for (const BlockReachRecord& rec : reach) {
      // In-block entries, and improvement profiles for relay senders: the
      // source holds the item from the block's first instant, every other
      // holder follows its recorded steps.
      std::map<ObjectId, ReachedRecord> inblock;
      std::map<ObjectId, const std::vector<HopStep>*> profiles;
      for (const BlockReachRecord::Entry& e : rec.reached) {
        inblock.emplace(e.object,
                        ReachedRecord{e.object, e.tau_r, static_cast<std::uint16_t>(e.h_end),
                                      static_cast<std::uint16_t>(e.h_first)});
        profiles.emplace(e.object, &e.steps);
      }
      const std::vector<HopStep> source_profile{{block.tau_begin, 0}};

      // Verified deliveries into the next block, aggregated per receiver:
      // the lexicographically earliest (completion, hops) pair plus the
      // hop minimum over every window that completes.
      struct CarryCand {
        TauIndex tau_c = kNoTau;
        int hf = 0;
        int he = 0;
      };
      std::map<ObjectId, CarryCand> carries;
      for (const auto& [m, ext] : bend) {
        const std::pair<ObjectId, ObjectId> dirs[2] = {{m->a, m->b}, {m->b, m->a}};
        for (const auto& [x, y] : dirs) {
          if (y == rec.source) continue;
          const std::vector<HopStep>* profile;
          if (x == rec.source) {
            profile = &source_profile;
          } else {
            const auto pit = profiles.find(x);
            if (pit == profiles.end()) continue;
            profile = pit->second;
          }
          for (const HopStep& s : *profile) {
            const TauIndex window = std::max(m->tau_start, s.tau);
            const TauIndex completes = window + params.mu;
            if (completes <= block.tau_end) continue;  // in-block; the sweep has it
            if (completes > block.tau_end + ext) break;  // lapses first; later windows only later
            const int h = s.hops + 1;
            auto [cit, fresh] = carries.try_emplace(y, CarryCand{completes, h, h});
            if (!fresh) {
              CarryCand& c = cit->second;
              if (completes < c.tau_c || (completes == c.tau_c && h < c.hf)) {
                c.tau_c = completes;
                c.hf = h;
              }
              c.he = std::min(c.he, h);
            }
          }
        }
      }

      // Merge, object-ascending, the in-block entry ahead of its carry. A
      // carry next to an in-block entry earns its bytes only by beating
      // the end-of-block hop minimum; a lone carry always stands.
      std::vector<ReachedRecord> run;
      run.reserve(inblock.size() + carries.size());
      auto emit_carry = [&](ObjectId object, const CarryCand& c) {
        const auto he16 = static_cast<std::uint16_t>(c.he);
        run.push_back(ReachedRecord{object, c.tau_c,
                                    static_cast<std::uint16_t>(he16 | ReachedRecord::kCarryBit),
                                    static_cast<std::uint16_t>(c.hf)});
        ++result.carry_entries;
      };
      auto cit = carries.begin();
      for (const auto& [object, record] : inblock) {
        while (cit != carries.end() && cit->first < object) {
          emit_carry(cit->first, cit->second);
          ++cit;
        }
        run.push_back(record);
        if (cit != carries.end() && cit->first == object) {
          if (cit->second.he < record.hops()) emit_carry(object, cit->second);
          ++cit;
        }
      }
      for (; cit != carries.end(); ++cit) emit_carry(cit->first, cit->second);
      if (!run.empty()) {
        run_sources.push_back(rec.source);
        runs.emplace(rec.source, std::move(run));
      }
    }
    std::sort(run_sources.begin(), run_sources.end(), layout_less);

    reach_dat.pad_to_page();
    dir_entry.reach_dat.first_page = reach_dat.current_page();
    std::vector<PendingIdxEntry> reach_entries;
    for (ObjectId source : run_sources) {
      const auto& run = runs[source];
      const std::size_t pos = reach_dat.bytes.size();
      reach_entries.push_back({source, static_cast<std::uint32_t>(pos / params.page_size),
                               static_cast<std::uint16_t>(pos % params.page_size),
                               owner_cell(source)});
      detail::put_u32(reach_dat.bytes, source);
      detail::put_u32(reach_dat.bytes, static_cast<std::uint32_t>(run.size()));
      for (const ReachedRecord& record : run) {
        detail::put_u32(reach_dat.bytes, record.object);
        detail::put_u32(reach_dat.bytes, record.tau_r);
        detail::put_u16(reach_dat.bytes, record.h_raw);
        detail::put_u16(reach_dat.bytes, record.h_first_raw);
        ++result.total_reach_entries;
      }
    }
    reach_dat.pad_to_page();
    dir_entry.reach_dat.n_pages = reach_dat.current_page() - dir_entry.reach_dat.first_page;
    dir_entry.reach_idx = write_idx_region(reach_idx, std::move(reach_entries));

    dir_entries.push_back(dir_entry);
  }

  for (const BlockDirEntry& e : dir_entries) {
    detail::put_u32(blocks_buf.bytes, e.spec.block_id);
    detail::put_u32(blocks_buf.bytes, e.spec.first_tick);
    detail::put_u32(blocks_buf.bytes, e.spec.tau_begin);
    detail::put_u32(blocks_buf.bytes, e.spec.tau_end);
    detail::put_u32(blocks_buf.bytes, e.meet_dat.first_page);
    detail::put_u32(blocks_buf.bytes, e.meet_dat.n_pages);
    detail::put_u32(blocks_buf.bytes, e.meet_idx.first_page);
    detail::put_u32(blocks_buf.bytes, e.meet_idx.n_pages);
    detail::put_u32(blocks_buf.bytes, e.reach_dat.first_page);
    detail::put_u32(blocks_buf.bytes, e.reach_dat.n_pages);
    detail::put_u32(blocks_buf.bytes, e.reach_idx.first_page);
    detail::put_u32(blocks_buf.bytes, e.reach_idx.n_pages);
  }
  blocks_buf.pad_to_page();

  detail::write_file_bytes((dir / file_name(kMeetDat)).string(), meet_dat.bytes);
  detail::write_file_bytes((dir / file_name(kMeetIdx)).string(), meet_idx.bytes);
  detail::write_file_bytes((dir / file_name(kReachDat)).string(), reach_dat.bytes);
  detail::write_file_bytes((dir / file_name(kReachIdx)).string(), reach_idx.bytes);
  detail::write_file_bytes((dir / file_name(kBlocksIdx)).string(), blocks_buf.bytes);

  IndexMeta meta;
  meta.n_objects = ds.n_objects;
  meta.n_ticks = ds.n_ticks;
  meta.grid = ds.grid;
  meta.params = params;
  meta.n_blocks = n_blocks;
  meta.d_max = ds.d_max;

  nlohmann::json j;
  j["format"] = "decayreach-index";
  j["version"] = kFormatVersion;
  j["n_objects"] = meta.n_objects;
  j["n_ticks"] = meta.n_ticks;
  j["delta_t"] = meta.grid.delta_t;
  j["tau_per_tick"] = meta.grid.tau_per_tick;
  j["origin"] = meta.grid.origin;
  j["c_ticks"] = params.c_ticks;
  j["grid_h"] = params.grid_h;
  j["mu"] = params.mu;
  j["d_cont"] = params.d_cont;
  j["page_size"] = params.page_size;
  j["n_blocks"] = meta.n_blocks;
  j["d_max"] = meta.d_max;
  std::ofstream mf(dir / "meta.json");
  if (!mf) throw std::runtime_error("preprocess: cannot write meta.json");
  mf << j.dump(2) << "\n";

  result.meta = meta;
  return result;
}

StoredIndex StoredIndex::open(const std::filesystem::path& dir) {
  StoredIndex idx;
  idx.dir_ = dir;

  std::ifstream mf(dir / "meta.json");
  if (!mf) throw corrupt_index_error("index: missing meta.json in " + dir.string());
  nlohmann::json j;
  try {
    mf >> j;
    if (j.at("format").get<std::string>() != "decayreach-index")
      throw corrupt_index_error("index: unrecognized meta format");
    if (j.at("version").get<std::uint32_t>() != kFormatVersion)
      throw corrupt_index_error("index: unsupported format version");
    idx.meta_.n_objects = j.at("n_objects").get<std::uint32_t>();
    idx.meta_.n_ticks = j.at("n_ticks").get<std::uint32_t>();
    idx.meta_.grid.delta_t = j.at("delta_t").get<double>();
    idx.meta_.grid.tau_per_tick = j.at("tau_per_tick").get<std::uint32_t>();
    idx.meta_.grid.origin = j.at("origin").get<double>();
    idx.meta_.params.c_ticks = j.at("c_ticks").get<std::uint32_t>();
    idx.meta_.params.grid_h = j.at("grid_h").get<double>();
    idx.meta_.params.mu = j.at("mu").get<std::uint32_t>();
    idx.meta_.params.d_cont = j.at("d_cont").get<double>();
    idx.meta_.params.page_size = j.at("page_size").get<std::uint32_t>();
    idx.meta_.n_blocks = j.at("n_blocks").get<std::uint32_t>();
    idx.meta_.d_max = j.at("d_max").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw corrupt_index_error(std::string("index: bad meta.json: ") + e.what());
  }
  validate_params(idx.meta_.params, idx.meta_.grid);
  const auto planned =
      plan_blocks(idx.meta_.n_ticks, idx.meta_.params.c_ticks, idx.meta_.grid.tau_per_tick);
  if (planned.size() != idx.meta_.n_blocks)
    throw corrupt_index_error("index: block count does not match the tick range");

  for (int kind = 0; kind < kFileKinds; ++kind) {
    std::ifstream f(dir / file_name(kind), std::ios::binary);
    if (!f) throw corrupt_index_error(std::string("index: missing ") + file_name(kind));
    std::uint8_t header[kFileHeaderSize];
    f.read(reinterpret_cast<char*>(header), kFileHeaderSize);
    if (f.gcount() != static_cast<std::streamsize>(kFileHeaderSize))
      throw corrupt_index_error(std::string("index: truncated header in ") + file_name(kind));
    if (std::memcmp(header, file_magic(kind), 8) != 0)
      throw corrupt_index_error(std::string("index: bad magic in ") + file_name(kind));
    detail::ByteReader r(header + 8, kFileHeaderSize - 8);
    const std::uint32_t page_size = r.u32();
    const std::uint32_t version = r.u32();
    const std::uint32_t n_blocks = r.u32();
    const std::uint32_t n_objects = r.u32();
    if (page_size != idx.meta_.params.page_size || version != kFormatVersion ||
        n_blocks != idx.meta_.n_blocks || n_objects != idx.meta_.n_objects)
      throw corrupt_index_error(std::string("index: header mismatch in ") + file_name(kind));
  }
  return idx;
}

namespace {

struct IdxEntry {
  std::uint32_t page = 0;
  std::uint16_t offset = 0;
  std::uint64_t cell = 0;
};

}  // namespace

struct QuerySession::Impl {
  const StoredIndex* index;
  std::ifstream files[kFileKinds];
  std::unordered_set<std::uint32_t> pages_read[kFileKinds];
  std::uint32_t last_disk_page[kFileKinds];
  bool has_last[kFileKinds] = {};
  IoStats stats;

  bool dir_loaded = false;
  std::vector<BlockDirEntry> dir;
  std::map<std::pair<std::uint32_t, int>, std::unordered_map<ObjectId, IdxEntry>> idx_dirs;
  std::map<std::pair<std::uint32_t, ObjectId>, std::vector<MeetingRecord>> meet_runs;
  std::map<std::pair<std::uint32_t, ObjectId>, std::vector<ReachedRecord>> reach_runs;
  // Blocks whose whole data region has been scanned: lookups there are
  // pure cache hits and an absent run is answered for free.
  std::set<std::pair<std::uint32_t, int>> scanned;

  std::uint32_t page_size() const { return index->meta().params.page_size; }

  /// Fetch a byte range, charging each not-yet-seen page. Pages already
  /// read by this session live in its buffer and cost nothing again.
  std::vector<std::uint8_t> fetch_range(int kind, std::uint64_t start, std::uint64_t len) {
    std::vector<std::uint8_t> out(len);
    if (len == 0) return out;
    const std::uint32_t ps = page_size();
    const auto first = static_cast<std::uint32_t>(start / ps);
    const auto last = static_cast<std::uint32_t>((start + len - 1) / ps);
    static const bool trace = std::getenv("DECAYREACH_IO_TRACE") != nullptr;
    for (std::uint32_t p = first; p <= last; ++p) {
      if (!pages_read[kind].insert(p).second) continue;
      const bool seq = has_last[kind] && p == last_disk_page[kind] + 1;
      if (seq)
        ++stats.sequential_pages;
      else
        ++stats.random_pages;
      if (trace)
        std::cerr << "io " << file_name(kind) << " page " << p << (seq ? " seq" : " rand") << "\n";
      last_disk_page[kind] = p;
      has_last[kind] = true;
    }
    std::ifstream& f = files[kind];
    f.clear();
    f.seekg(static_cast<std::streamoff>(start));
    f.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(len));
    if (f.gcount() != static_cast<std::streamsize>(len))
      throw corrupt_index_error(std::string("index: truncated read in ") + file_name(kind));
    return out;
  }

  const std::vector<BlockDirEntry>& directory() {
    if (dir_loaded) return dir;
    const IndexMeta& meta = index->meta();
    const std::uint64_t bytes = static_cast<std::uint64_t>(meta.n_blocks) * kDirEntrySize;
    const std::vector<std::uint8_t> raw = fetch_range(kBlocksIdx, page_size(), bytes);
    detail::ByteReader r(raw.data(), raw.size());
    dir.resize(meta.n_blocks);
    for (std::uint32_t i = 0; i < meta.n_blocks; ++i) {
      BlockDirEntry& e = dir[i];
      e.spec.block_id = r.u32();
      e.spec.first_tick = r.u32();
      e.spec.tau_begin = r.u32();
      e.spec.tau_end = r.u32();
      e.spec.last_tick = std::min(e.spec.first_tick + meta.params.c_ticks - 1, meta.n_ticks - 1);
      e.meet_dat = {r.u32(), r.u32()};
      e.meet_idx = {r.u32(), r.u32()};
      e.reach_dat = {r.u32(), r.u32()};
      e.reach_idx = {r.u32(), r.u32()};
      if (e.spec.block_id != i)
        throw corrupt_index_error("index: block directory out of order");
    }
    dir_loaded = true;
    return dir;
  }

  const std::unordered_map<ObjectId, IdxEntry>& idx_dir(std::uint32_t block, int idx_kind) {
    const auto key = std::make_pair(block, idx_kind);
    auto it = idx_dirs.find(key);
    if (it != idx_dirs.end()) return it->second;

    const std::vector<BlockDirEntry>& d = directory();
    if (block >= d.size()) throw std::invalid_argument("index: block out of range");
    const PageRegion region = idx_kind == kMeetIdx ? d[block].meet_idx : d[block].reach_idx;
    std::unordered_map<ObjectId, IdxEntry> parsed;
    if (region.n_pages > 0) {
      const std::uint64_t base = static_cast<std::uint64_t>(region.first_page) * page_size();
      const std::vector<std::uint8_t> head = fetch_range(idx_kind, base, 4);
      detail::ByteReader hr(head.data(), head.size());
      const std::uint32_t count = hr.u32();
      const std::uint64_t body_len = static_cast<std::uint64_t>(count) * kIdxEntrySize;
      if (4 + body_len > static_cast<std::uint64_t>(region.n_pages) * page_size())
        throw corrupt_index_error("index: directory region overflows its pages");
      const std::vector<std::uint8_t> raw = fetch_range(idx_kind, base + 4, body_len);
      detail::ByteReader r(raw.data(), raw.size());
      parsed.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        const ObjectId object = r.u32();
        IdxEntry e;
        e.page = r.u32();
        e.offset = r.u16();
        e.cell = r.u64();
        parsed.emplace(object, e);
      }
    }
    return idx_dirs.emplace(key, std::move(parsed)).first->second;
  }

  /// Read one run (header plus payload) from a data file.
  std::vector<std::uint8_t> read_run(int dat_kind, const PageRegion& region, const IdxEntry& e,
                                     ObjectId expected_owner, std::size_t record_size,
                                     std::uint32_t& count_out) {
    if (e.page < region.first_page || e.page >= region.first_page + region.n_pages)
      throw corrupt_index_error("index: run pointer outside its block region");
    const std::uint64_t start = static_cast<std::uint64_t>(e.page) * page_size() + e.offset;
    const std::vector<std::uint8_t> head = fetch_range(dat_kind, start, kRunHeaderSize);
    detail::ByteReader hr(head.data(), head.size());
    const ObjectId owner = hr.u32();
    const std::uint32_t count = hr.u32();
    if (owner != expected_owner) throw corrupt_index_error("index: run owner mismatch");
    const std::uint64_t body = static_cast<std::uint64_t>(count) * record_size;
    const std::uint64_t region_end =
        static_cast<std::uint64_t>(region.first_page + region.n_pages) * page_size();
    if (start + kRunHeaderSize + body > region_end)
      throw corrupt_index_error("index: run overflows its block region");
    count_out = count;
    return fetch_range(dat_kind, start + kRunHeaderSize, body);
  }

  /// One-pass read of a block's whole data region: a single seek, then
  /// sequential pages. Every run inside is parsed into the cache, so
  /// later lookups against the block cost nothing, present or absent.
  void scan_block(std::uint32_t block, bool reach_file) {
    const int dat_kind = reach_file ? kReachDat : kMeetDat;
    if (!scanned.insert(std::make_pair(block, dat_kind)).second) return;
    const std::vector<BlockDirEntry>& d = directory();
    if (block >= d.size()) throw std::invalid_argument("index: block out of range");
    const PageRegion region = reach_file ? d[block].reach_dat : d[block].meet_dat;
    if (region.n_pages == 0) return;
    const std::uint64_t base = static_cast<std::uint64_t>(region.first_page) * page_size();
    const std::uint64_t len = static_cast<std::uint64_t>(region.n_pages) * page_size();
    const std::vector<std::uint8_t> raw = fetch_range(dat_kind, base, len);
    const std::size_t record_size = reach_file ? kReachedRecordSize : kMeetingRecordSize;
    std::size_t off = 0;
    while (off + kRunHeaderSize <= raw.size()) {
      detail::ByteReader hr(raw.data() + off, kRunHeaderSize);
      const ObjectId owner = hr.u32();
      const std::uint32_t count = hr.u32();
      if (owner == 0 && count == 0) break;  // page padding; a real run is never empty
      off += kRunHeaderSize;
      const std::uint64_t body = static_cast<std::uint64_t>(count) * record_size;
      if (off + body > raw.size())
        throw corrupt_index_error("index: run overflows its block region");
      detail::ByteReader r(raw.data() + off, body);
      if (reach_file) {
        std::vector<ReachedRecord> records;
        records.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
          ReachedRecord rec;
          rec.object = r.u32();
          rec.tau_r = r.u32();
          rec.h_raw = r.u16();
          rec.h_first_raw = r.u16();
          records.push_back(rec);
        }
        reach_runs.emplace(std::make_pair(block, owner), std::move(records));
      } else {
        std::vector<MeetingRecord> records;
        records.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
          MeetingRecord m;
          m.peer = r.u32();
          m.tau_start = r.u32();
          m.tau_end = r.u32();
          const std::uint8_t flags = r.u8();
          m.boundary_start = (flags & 1) != 0;
          m.boundary_end = (flags & 2) != 0;
          records.push_back(m);
        }
        meet_runs.emplace(std::make_pair(block, owner), std::move(records));
      }
      off += body;
    }
  }

  const std::vector<MeetingRecord>& meetings_for(std::uint32_t block, ObjectId object) {
    const auto key = std::make_pair(block, object);
    auto it = meet_runs.find(key);
    if (it != meet_runs.end()) return it->second;
    if (scanned.count(std::make_pair(block, kMeetDat)) > 0)
      return meet_runs.emplace(key, std::vector<MeetingRecord>{}).first->second;

    std::vector<MeetingRecord> records;
    const auto& dirmap = idx_dir(block, kMeetIdx);
    const auto entry = dirmap.find(object);
    if (entry != dirmap.end()) {
      std::uint32_t count = 0;
      const std::vector<std::uint8_t> raw = read_run(
          kMeetDat, directory()[block].meet_dat, entry->second, object, kMeetingRecordSize, count);
      detail::ByteReader r(raw.data(), raw.size());
      records.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        MeetingRecord m;
        m.peer = r.u32();
        m.tau_start = r.u32();
        m.tau_end = r.u32();
        const std::uint8_t flags = r.u8();
        m.boundary_start = (flags & 1) != 0;
        m.boundary_end = (flags & 2) != 0;
        records.push_back(m);
      }
    }
    return meet_runs.emplace(key, std::move(records)).first->second;
  }

  const std::vector<ReachedRecord>& reached_for(std::uint32_t block, ObjectId source) {
    const auto key = std::make_pair(block, source);
    auto it = reach_runs.find(key);
    if (it != reach_runs.end()) return it->second;
    if (scanned.count(std::make_pair(block, kReachDat)) > 0)
      return reach_runs.emplace(key, std::vector<ReachedRecord>{}).first->second;

    std::vector<ReachedRecord> records;
    const auto& dirmap = idx_dir(block, kReachIdx);
    const auto entry = dirmap.find(source);
    if (entry != dirmap.end()) {
      std::uint32_t count = 0;
      const std::vector<std::uint8_t> raw = read_run(
          kReachDat, directory()[block].reach_dat, entry->second, source, kReachedRecordSize, count);
      detail::ByteReader r(raw.data(), raw.size());
      records.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        ReachedRecord rec;
        rec.object = r.u32();
        rec.tau_r = r.u32();
        rec.h_raw = r.u16();
        rec.h_first_raw = r.u16();
        records.push_back(rec);
      }
    }
    return reach_runs.emplace(key, std::move(records)).first->second;
  }
};

QuerySession::QuerySession(const StoredIndex& index) : impl_(std::make_unique<Impl>()) {
  impl_->index = &index;
  for (int kind = 0; kind < kFileKinds; ++kind) {
    impl_->files[kind].open(index.dir() / file_name(kind), std::ios::binary);
    if (!impl_->files[kind])
      throw corrupt_index_error(std::string("index: cannot open ") + file_name(kind));
    impl_->last_disk_page[kind] = 0;
  }
}

QuerySession::~QuerySession() = default;

const IndexMeta& QuerySession::meta() const { return impl_->index->meta(); }

const std::vector<BlockDirEntry>& QuerySession::directory() { return impl_->directory(); }

const std::vector<MeetingRecord>& QuerySession::meetings_for(std::uint32_t block,
                                                             ObjectId object) {
  return impl_->meetings_for(block, object);
}

const std::vector<ReachedRecord>& QuerySession::reached_for(std::uint32_t block,
                                                            ObjectId source) {
  return impl_->reached_for(block, source);
}

std::uint32_t QuerySession::region_pages(std::uint32_t block, bool reach_file) {
  const std::vector<BlockDirEntry>& d = impl_->directory();
  if (block >= d.size()) throw std::invalid_argument("index: block out of range");
  return reach_file ? d[block].reach_dat.n_pages : d[block].meet_dat.n_pages;
}

bool QuerySession::prefer_scan(std::uint32_t block, bool reach_file, std::size_t count) {
  const std::vector<BlockDirEntry>& d = impl_->directory();
  if (block >= d.size()) throw std::invalid_argument("index: block out of range");
  const PageRegion& dat = reach_file ? d[block].reach_dat : d[block].meet_dat;
  const PageRegion& idx = reach_file ? d[block].reach_idx : d[block].meet_idx;
  const std::uint64_t selective =
      idx.n_pages + std::min<std::uint64_t>(count, dat.n_pages);
  return dat.n_pages <= selective;
}

void QuerySession::scan_block(std::uint32_t block, bool reach_file) {
  impl_->scan_block(block, reach_file);
}

void QuerySession::order_by_run_position(std::uint32_t block, bool reach_file,
                                         std::vector<ObjectId>& objects) {
  const auto& dirmap = impl_->idx_dir(block, reach_file ? kReachIdx : kMeetIdx);
  auto key = [&](ObjectId o) {
    const auto it = dirmap.find(o);
    if (it == dirmap.end())
      return std::tuple<int, std::uint32_t, std::uint16_t, ObjectId>{1, 0, 0, o};
    return std::tuple<int, std::uint32_t, std::uint16_t, ObjectId>{0, it->second.page,
                                                                   it->second.offset, o};
  };
  std::sort(objects.begin(), objects.end(),
            [&](ObjectId a, ObjectId b) { return key(a) < key(b); });
}

const IoStats& QuerySession::stats() const { return impl_->stats; }

}  // namespace decayreach
