#include "decayreach/contacts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace decayreach {

std::vector<BlockSpec> plan_blocks(std::uint32_t n_ticks, std::uint32_t c_ticks,
                                   std::uint32_t tau_per_tick) {
  if (n_ticks < 2) throw std::invalid_argument("need at least two reporting ticks");
  if (c_ticks == 0) throw std::invalid_argument("block size must be positive");
  if (tau_per_tick == 0) throw std::invalid_argument("tau_per_tick must be positive");

  const TauIndex last_tau = (n_ticks - 1) * tau_per_tick;
  std::vector<BlockSpec> blocks;
  for (std::uint32_t first = 0; first < n_ticks; first += c_ticks) {
    BlockSpec b;
    b.block_id = static_cast<std::uint32_t>(blocks.size());
    b.first_tick = first;
    b.last_tick = std::min(first + c_ticks - 1, n_ticks - 1);
    b.tau_begin = first * tau_per_tick;
    b.tau_end = std::min<TauIndex>((first + c_ticks) * tau_per_tick - 1, last_tau);
    blocks.push_back(b);
  }
  return blocks;
}

namespace {

struct Cell {
  std::int64_t cx;
  std::int64_t cy;
  bool operator<(const Cell& o) const { return cx != o.cx ? cx < o.cx : cy < o.cy; }
};

double dist2(const Position& p, const Position& q) {
  const double dx = p.x - q.x, dy = p.y - q.y;
  return dx * dx + dy * dy;
}

}  // namespace

std::vector<std::pair<ObjectId, ObjectId>> candidate_pairs(const TrajectoryDataset& ds,
                                                           std::uint32_t tick, double d_cont) {
  if (tick >= ds.n_ticks) throw std::invalid_argument("tick out of range");
  if (d_cont < 0.0) throw std::invalid_argument("d_cont must be nonnegative");
  const double d_cc = 2.0 * ds.d_max + d_cont;
  const double side = d_cc > 0.0 ? d_cc : 1.0;

  std::map<Cell, std::vector<ObjectId>> cells;
  for (ObjectId obj = 0; obj < ds.n_objects; ++obj) {
    const Position& p = ds.at(tick, obj);
    cells[{static_cast<std::int64_t>(std::floor(p.x / side)),
           static_cast<std::int64_t>(std::floor(p.y / side))}]
        .push_back(obj);
  }

  const double limit2 = d_cc * d_cc;
  std::vector<std::pair<ObjectId, ObjectId>> out;
  for (const auto& [cell, members] : cells) {
    // within the cell
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        if (dist2(ds.at(tick, members[i]), ds.at(tick, members[j])) <= limit2)
          out.emplace_back(members[i], members[j]);
    // against the four lexicographically larger neighbor cells, so each
    // unordered cell pair is visited once
    static constexpr std::pair<int, int> kHalf[4] = {{0, 1}, {1, -1}, {1, 0}, {1, 1}};
    for (const auto& [dx, dy] : kHalf) {
      const auto it = cells.find({cell.cx + dx, cell.cy + dy});
      if (it == cells.end()) continue;
      for (ObjectId u : members)
        for (ObjectId v : it->second)
          if (dist2(ds.at(tick, u), ds.at(tick, v)) <= limit2)
            out.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TauIndex> verify_contacts(const TrajectoryDataset& ds,
                                      std::pair<ObjectId, ObjectId> pair, std::uint32_t tick,
                                      double d_cont) {
  if (tick + 1 >= ds.n_ticks) throw std::invalid_argument("tick has no following interval");
  const std::uint32_t r = ds.grid.tau_per_tick;
  const Position& a0 = ds.at(tick, pair.first);
  const Position& a1 = ds.at(tick + 1, pair.first);
  const Position& b0 = ds.at(tick, pair.second);
  const Position& b1 = ds.at(tick + 1, pair.second);

  // Relative motion is linear too: gap(f) = g0 + f * (g1 - g0).
  const double gx0 = b0.x - a0.x, gy0 = b0.y - a0.y;
  const double gx1 = b1.x - a1.x, gy1 = b1.y - a1.y;
  const double limit2 = d_cont * d_cont;

  std::vector<TauIndex> out;
  for (std::uint32_t s = 0; s < r; ++s) {
    const double f = static_cast<double>(s) / r;
    const double gx = gx0 + f * (gx1 - gx0);
    const double gy = gy0 + f * (gy1 - gy0);
    if (gx * gx + gy * gy <= limit2) out.push_back(tick * r + s);
  }
  return out;
}

std::vector<Meeting> build_meetings(std::vector<TauContact> contacts, const BlockSpec& block,
                                    std::uint32_t mu) {
  for (const TauContact& c : contacts) {
    if (c.a >= c.b) throw std::invalid_argument("contact pair must satisfy a < b");
    if (c.tau < block.tau_begin || c.tau > block.tau_end)
      throw std::invalid_argument("contact instant outside the block's tau range");
  }
  std::sort(contacts.begin(), contacts.end(), [](const TauContact& l, const TauContact& r) {
    if (l.a != r.a) return l.a < r.a;
    if (l.b != r.b) return l.b < r.b;
    return l.tau < r.tau;
  });

  std::vector<Meeting> out;
  auto flush = [&](const Meeting& m) {
    Meeting run = m;
    run.boundary_start = run.tau_start == block.tau_begin;
    run.boundary_end = run.tau_end == block.tau_end;
    if (run.duration() >= mu || run.boundary_start || run.boundary_end) out.push_back(run);
  };

  for (std::size_t i = 0; i < contacts.size();) {
    Meeting run{contacts[i].a, contacts[i].b, contacts[i].tau, contacts[i].tau, false, false};
    std::size_t j = i + 1;
    for (; j < contacts.size(); ++j) {
      const TauContact& c = contacts[j];
      if (c.a != run.a || c.b != run.b || c.tau > run.tau_end + 1) break;
      if (c.tau == run.tau_end) throw std::invalid_argument("duplicate contact instant");
      run.tau_end = c.tau;
    }
    flush(run);
    i = j;
  }
  return out;
}

std::vector<Meeting> detect_block_meetings(const TrajectoryDataset& ds, const BlockSpec& block,
                                           double d_cont, std::uint32_t mu) {
  std::vector<TauContact> contacts;
  for (std::uint32_t tick = block.first_tick; tick <= block.last_tick; ++tick) {
    if (tick + 1 < ds.n_ticks) {
      for (const auto& pair : candidate_pairs(ds, tick, d_cont))
        for (TauIndex tau : verify_contacts(ds, pair, tick, d_cont))
          contacts.push_back({pair.first, pair.second, tau});
    } else {
      // Final reporting tick: the dataset's last instant has no following
      // interval, so test the reported positions directly.
      const double limit2 = d_cont * d_cont;
      for (const auto& pair : candidate_pairs(ds, tick, d_cont))
        if (dist2(ds.at(tick, pair.first), ds.at(tick, pair.second)) <= limit2)
          contacts.push_back({pair.first, pair.second, tick * ds.grid.tau_per_tick});
    }
  }
  return build_meetings(std::move(contacts), block, mu);
}

}  // namespace decayreach
