#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace decayreach {

using ObjectId = std::uint32_t;

/// Index into the fine time grid. Each reporting interval [t_k, t_{k+1})
/// is split into tau_per_tick subintervals; tau indices count those
/// subintervals from the start of the dataset.
using TauIndex = std::uint32_t;

inline constexpr TauIndex kNoTau = std::numeric_limits<TauIndex>::max();

/// Sentinel hop count for "never reached".
inline constexpr int kUnreachedHops = std::numeric_limits<int>::max();

/// Discretization of time: positions are reported every delta_t seconds,
/// and each reporting interval is subdivided into tau_per_tick instants.
/// A dataset with n ticks covers tau indices 0 .. (n - 1) * tau_per_tick.
struct TimeGrid {
  double delta_t = 6.0;          // seconds between reporting ticks
  std::uint32_t tau_per_tick = 6;
  double origin = 0.0;           // timestamp of tick 0, informational only

  double tau_seconds() const { return delta_t / tau_per_tick; }
  TauIndex tick_to_tau(std::uint32_t tick) const { return tick * tau_per_tick; }
  std::uint32_t tau_to_tick(TauIndex tau) const { return tau / tau_per_tick; }
};

/// Parameters of a transfer-decay query: initial weight w > 0, decay
/// factor d in [0, 1), and acceptance threshold nu >= 0. The weight
/// retained after h transfers is w * (1 - d)^h.
struct DecayParams {
  double w = 1.0;
  double d = 0.0;
  double nu = 0.0;

  double retention() const { return 1.0 - d; }
  bool valid() const { return w > 0.0 && d >= 0.0 && d < 1.0 && nu >= 0.0; }
};

/// Hop budget obtained by rewriting a decay query: the largest hop count
/// whose decayed weight still clears the threshold.
struct HopBudget {
  enum class Kind { Bounded, Unbounded, SourceOnly };

  Kind kind = Kind::Unbounded;
  int h_max = 0;  // meaningful only when kind == Bounded

  static HopBudget bounded(int h) { return {Kind::Bounded, h}; }
  static HopBudget unbounded() { return {Kind::Unbounded, 0}; }
  static HopBudget source_only() { return {Kind::SourceOnly, 0}; }

  /// True when a chain of h transfers still clears the threshold.
  /// h == 0 means the source itself; SourceOnly admits no weight at all.
  bool allows(int h) const {
    switch (kind) {
      case Kind::Bounded: return h <= h_max;
      case Kind::Unbounded: return true;
      case Kind::SourceOnly: return false;
    }
    return false;
  }
  bool operator==(const HopBudget& o) const {
    return kind == o.kind && (kind != Kind::Bounded || h_max == o.h_max);
  }
};

/// Reach progress of one object: earliest time it held the item and the
/// smallest hop count seen so far. h_min only decreases over a sweep.
struct ReachState {
  ObjectId object = 0;
  TauIndex tau_r = kNoTau;
  int h_min = kUnreachedHops;

  bool reached() const { return tau_r != kNoTau; }
};

/// Weight that survives h transfers: w * (1 - d)^h, evaluated by repeated
/// multiplication so it agrees bit for bit with max_hops.
double actual_weight(const DecayParams& params, int hops);

/// Largest admissible hop count for the given parameters. Uses repeated
/// multiplication rather than a floating log so that chains sitting
/// exactly on the threshold are classified consistently with
/// actual_weight. nu > w yields SourceOnly; nu == 0 or d == 0 yields
/// Unbounded.
HopBudget max_hops(const DecayParams& params);

/// Weight assigned to an object reached in `hops` transfers: the actual
/// weight when the budget admits it, otherwise 0. Pass kUnreachedHops
/// for objects never reached.
double assigned_weight(const DecayParams& params, int hops);

/// Aggregate weight collected from several sources: the sum of per-source
/// assigned weights. `terms` must not be empty.
double aggregate_weight(const std::vector<std::pair<DecayParams, int>>& terms);

}  // namespace decayreach
