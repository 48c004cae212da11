#include "decayreach/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bytes.hpp"

namespace decayreach {

namespace {

constexpr char kMagic[5] = {'S', 'T', 'R', 'J', '1'};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
/// std::uniform_real_distribution is implementation-defined; this keeps
/// generated datasets identical across standard libraries.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double range_draw(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_draw(rng);
}

/// Folds an unbounded coordinate into [0, side] by reflecting at the walls.
double reflect(double x, double side) {
  const double period = 2.0 * side;
  double m = std::fmod(x, period);
  if (m < 0.0) m += period;
  return m <= side ? m : period - m;
}

void validate(const GenConfig& c) {
  if (c.n_objects == 0) throw std::invalid_argument("n_objects must be positive");
  if (c.duration_ticks < 2) throw std::invalid_argument("need at least two reporting ticks");
  if (c.area_side <= 0.0) throw std::invalid_argument("area_side must be positive");
  if (c.delta_t <= 0.0) throw std::invalid_argument("delta_t must be positive");
  if (c.tau_per_tick == 0) throw std::invalid_argument("tau_per_tick must be positive");
  if (c.speed_min <= 0.0 || c.speed_max < c.speed_min)
    throw std::invalid_argument("speed range must satisfy 0 < speed_min <= speed_max");
  if (c.moving_fraction < 0.0 || c.moving_fraction > 1.0)
    throw std::invalid_argument("moving_fraction must lie in [0, 1]");
  if (c.trip_min_s <= 0.0 || c.trip_max_s < c.trip_min_s)
    throw std::invalid_argument("trip duration range must satisfy 0 < min <= max");
}

}  // namespace

TrajectoryDataset generate(const GenConfig& config) {
  validate(config);

  TrajectoryDataset ds;
  ds.grid.delta_t = config.delta_t;
  ds.grid.tau_per_tick = config.tau_per_tick;
  ds.n_objects = config.n_objects;
  ds.n_ticks = config.duration_ticks;
  ds.positions.resize(static_cast<std::size_t>(ds.n_ticks) * ds.n_objects);

  // Exact moving/stationary split: round(n * fraction) objects move.
  const auto n_moving =
      static_cast<std::uint32_t>(std::lround(config.moving_fraction * config.n_objects));
  std::vector<ObjectId> order(config.n_objects);
  for (ObjectId i = 0; i < config.n_objects; ++i) order[i] = i;
  std::mt19937_64 pick_rng(config.seed);
  for (std::uint32_t i = config.n_objects - 1; i > 0; --i) {
    const auto j = static_cast<std::uint32_t>(pick_rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> moving(config.n_objects, false);
  for (std::uint32_t i = 0; i < n_moving; ++i) moving[order[i]] = true;

  for (ObjectId obj = 0; obj < config.n_objects; ++obj) {
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(obj) + 1};
    std::mt19937_64 rng(seq);
    double x = range_draw(rng, 0.0, config.area_side);
    double y = range_draw(rng, 0.0, config.area_side);

    if (!moving[obj]) {
      for (std::uint32_t tick = 0; tick < ds.n_ticks; ++tick) ds.at(tick, obj) = {x, y};
      continue;
    }

    // Walk trips of constant velocity; positions between walls follow by
    // reflecting the unfolded straight-line coordinates.
    double trip_left = 0.0;  // seconds remaining in the current trip
    double vx = 0.0, vy = 0.0;
    for (std::uint32_t tick = 0; tick < ds.n_ticks; ++tick) {
      ds.at(tick, obj) = {reflect(x, config.area_side), reflect(y, config.area_side)};
      double step = config.delta_t;
      while (step > 0.0) {
        if (trip_left <= 0.0) {
          const double angle = range_draw(rng, 0.0, 2.0 * M_PI);
          const double speed = range_draw(rng, config.speed_min, config.speed_max);
          vx = speed * std::cos(angle);
          vy = speed * std::sin(angle);
          trip_left = range_draw(rng, config.trip_min_s, config.trip_max_s);
        }
        const double dt = std::min(step, trip_left);
        x += vx * dt;
        y += vy * dt;
        trip_left -= dt;
        step -= dt;
      }
    }
  }

  double d2_max = 0.0;
  for (std::uint32_t tick = 0; tick + 1 < ds.n_ticks; ++tick) {
    for (ObjectId obj = 0; obj < ds.n_objects; ++obj) {
      const Position& a = ds.at(tick, obj);
      const Position& b = ds.at(tick + 1, obj);
      const double dx = b.x - a.x, dy = b.y - a.y;
      d2_max = std::max(d2_max, dx * dx + dy * dy);
    }
  }
  ds.d_max = std::sqrt(d2_max);
  return ds;
}

void write_dataset(const TrajectoryDataset& ds, const std::string& path) {
  std::vector<std::uint8_t> out;
  out.reserve(29 + ds.positions.size() * 24);
  out.insert(out.end(), kMagic, kMagic + 5);
  detail::put_u32(out, ds.n_objects);
  detail::put_f64(out, ds.grid.delta_t);
  detail::put_u32(out, ds.grid.tau_per_tick);
  detail::put_u32(out, ds.n_ticks);
  detail::put_f64(out, ds.d_max);
  for (std::uint32_t tick = 0; tick < ds.n_ticks; ++tick) {
    for (ObjectId obj = 0; obj < ds.n_objects; ++obj) {
      const Position& p = ds.at(tick, obj);
      detail::put_u32(out, tick);
      detail::put_u32(out, obj);
      detail::put_f64(out, p.x);
      detail::put_f64(out, p.y);
    }
  }
  detail::write_file_bytes(path, out);
}

namespace {

void check_observed_dmax(TrajectoryDataset& ds, bool trust_header) {
  double d2_max = 0.0;
  for (std::uint32_t tick = 0; tick + 1 < ds.n_ticks; ++tick) {
    for (ObjectId obj = 0; obj < ds.n_objects; ++obj) {
      const Position& a = ds.at(tick, obj);
      const Position& b = ds.at(tick + 1, obj);
      const double dx = b.x - a.x, dy = b.y - a.y;
      d2_max = std::max(d2_max, dx * dx + dy * dy);
    }
  }
  const double observed = std::sqrt(d2_max);
  if (trust_header) {
    if (ds.d_max < observed)
      throw std::runtime_error("dataset header d_max smaller than observed displacement");
  } else {
    ds.d_max = observed;
  }
}

}  // namespace

TrajectoryDataset read_dataset(const std::string& path) {
  const std::vector<std::uint8_t> bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes.data(), bytes.size());
  if (bytes.size() < 29) throw std::runtime_error(path + ": malformed trajectory header");
  char magic[5];
  in.bytes(magic, 5);
  if (!std::equal(magic, magic + 5, kMagic))
    throw std::runtime_error(path + ": malformed trajectory header");

  TrajectoryDataset ds;
  ds.n_objects = in.u32();
  ds.grid.delta_t = in.f64();
  ds.grid.tau_per_tick = in.u32();
  ds.n_ticks = in.u32();
  ds.d_max = in.f64();
  if (ds.n_objects == 0 || ds.n_ticks < 2 || ds.grid.tau_per_tick == 0 ||
      !(ds.grid.delta_t > 0.0))
    throw std::runtime_error(path + ": malformed trajectory header");

  const std::size_t n_records = static_cast<std::size_t>(ds.n_objects) * ds.n_ticks;
  if (in.remaining() != n_records * 24)
    throw std::runtime_error(path + ": truncated trajectory records");
  ds.positions.resize(n_records);
  for (std::size_t i = 0; i < n_records; ++i) {
    const std::uint32_t tick = in.u32();
    const ObjectId obj = in.u32();
    const std::uint32_t want_tick = static_cast<std::uint32_t>(i / ds.n_objects);
    const ObjectId want_obj = static_cast<ObjectId>(i % ds.n_objects);
    if (tick != want_tick || obj != want_obj)
      throw std::runtime_error(path + ": records out of order (tick-major, object-minor)");
    const double x = in.f64();
    const double y = in.f64();
    ds.at(tick, obj) = {x, y};
  }
  check_observed_dmax(ds, /*trust_header=*/true);
  return ds;
}

TrajectoryDataset import_csv(const std::string& path, double delta_t,
                             std::uint32_t tau_per_tick) {
  if (!(delta_t > 0.0) || tau_per_tick == 0)
    throw std::invalid_argument("delta_t and tau_per_tick must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");

  struct Row {
    std::uint32_t tick;
    ObjectId obj;
    double x, y;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::uint32_t tick;
    std::uint32_t obj;
    double x, y;
    if (std::sscanf(line.c_str(), "%u,%u,%lf,%lf", &tick, &obj, &x, &y) != 4) {
      if (line_no == 1) continue;  // header row
      throw std::runtime_error(path + ": bad CSV row at line " + std::to_string(line_no));
    }
    rows.push_back({tick, obj, x, y});
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  std::uint32_t max_tick = 0;
  ObjectId max_obj = 0;
  for (const Row& r : rows) {
    max_tick = std::max(max_tick, r.tick);
    max_obj = std::max(max_obj, r.obj);
  }
  TrajectoryDataset ds;
  ds.grid.delta_t = delta_t;
  ds.grid.tau_per_tick = tau_per_tick;
  ds.n_ticks = max_tick + 1;
  ds.n_objects = max_obj + 1;
  if (ds.n_ticks < 2) throw std::runtime_error(path + ": need at least two ticks");
  const std::size_t n_records = static_cast<std::size_t>(ds.n_objects) * ds.n_ticks;
  if (rows.size() != n_records)
    throw std::runtime_error(path + ": incomplete table, every object needs a row per tick");
  ds.positions.resize(n_records);
  std::vector<bool> seen(n_records, false);
  for (const Row& r : rows) {
    const std::size_t slot = static_cast<std::size_t>(r.tick) * ds.n_objects + r.obj;
    if (seen[slot]) throw std::runtime_error(path + ": duplicate (t, object) row");
    seen[slot] = true;
    ds.at(r.tick, r.obj) = {r.x, r.y};
  }
  check_observed_dmax(ds, /*trust_header=*/false);
  return ds;
}

TrajectoryDataset take_prefix(const TrajectoryDataset& ds, std::uint32_t n_ticks) {
  if (n_ticks < 2) throw std::invalid_argument("take_prefix: need at least two ticks");
  if (n_ticks > ds.n_ticks) throw std::invalid_argument("take_prefix: prefix longer than data");
  TrajectoryDataset out;
  out.grid = ds.grid;
  out.n_objects = ds.n_objects;
  out.n_ticks = n_ticks;
  out.positions.assign(ds.positions.begin(),
                       ds.positions.begin() + static_cast<std::ptrdiff_t>(n_ticks) * ds.n_objects);
  check_observed_dmax(out, /*trust_header=*/false);
  return out;
}

namespace detail {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error(path + ": cannot open");
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size))
    throw std::runtime_error(path + ": read failed");
  return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace detail

}  // namespace decayreach
