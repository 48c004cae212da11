#include "decayreach/core.hpp"

#include <stdexcept>

namespace decayreach {

namespace {

void require_valid(const DecayParams& params) {
  if (!params.valid()) {
    throw std::invalid_argument("decay parameters must satisfy w > 0, 0 <= d < 1, nu >= 0");
  }
}

}  // namespace

double actual_weight(const DecayParams& params, int hops) {
  require_valid(params);
  if (hops < 0) throw std::invalid_argument("hop count must be nonnegative");
  const double p = params.retention();
  double value = params.w;
  for (int i = 0; i < hops; ++i) value *= p;
  return value;
}

HopBudget max_hops(const DecayParams& params) {
  require_valid(params);
  if (params.nu > params.w) return HopBudget::source_only();
  const double p = params.retention();
  if (p >= 1.0 || params.nu <= 0.0) return HopBudget::unbounded();

  // Walk w, w*p, w*p^2, ... until the threshold is crossed. The loop uses
  // the same rounding sequence as actual_weight, so the budget boundary
  // and the weights reported for admitted hops can never disagree.
  int h = 0;
  double value = params.w;
  constexpr int kIterationCeiling = 1 << 22;
  while (h < kIterationCeiling) {
    const double next = value * p;
    if (next < params.nu) return HopBudget::bounded(h);
    value = next;
    ++h;
  }
  // d this close to zero admits more hops than any finite dataset can
  // produce; treat the budget as unbounded.
  return HopBudget::unbounded();
}

double assigned_weight(const DecayParams& params, int hops) {
  require_valid(params);
  if (hops == kUnreachedHops) return 0.0;
  if (!max_hops(params).allows(hops)) return 0.0;
  return actual_weight(params, hops);
}

double aggregate_weight(const std::vector<std::pair<DecayParams, int>>& terms) {
  if (terms.empty()) throw std::invalid_argument("aggregate_weight needs at least one source");
  double total = 0.0;
  for (const auto& [params, hops] : terms) total += assigned_weight(params, hops);
  return total;
}

}  // namespace decayreach
