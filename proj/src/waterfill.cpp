#include "istn/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace istn {

WaterfillResult waterfill(const std::vector<double>& effective_noise, double budget) {
  if (effective_noise.empty()) throw std::invalid_argument("waterfill: no subchannels");
  if (!(budget > 0.0)) throw std::invalid_argument("waterfill: budget must be positive");

  const std::size_t n = effective_noise.size();
  std::vector<double> sorted = effective_noise;
  std::sort(sorted.begin(), sorted.end());

  // The level with k active entries is (budget + sum of the k lowest) / k;
  // the right k is the largest one whose level clears its k-th noise.
  double prefix = 0.0;
  double level = sorted[0] + budget;
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += sorted[k - 1];
    const double mu = (budget + prefix) / static_cast<double>(k);
    if (mu <= sorted[k - 1]) break;
    level = mu;
  }

  WaterfillResult r;
  r.level = level;
  r.power.resize(n);
  for (std::size_t c = 0; c < n; ++c) r.power[c] = std::max(0.0, level - effective_noise[c]);
  return r;
}

WaterfillResult waterfill_capped(const std::vector<double>& effective_noise, const std::vector<double>& cap,
                                 double budget) {
  if (effective_noise.empty()) throw std::invalid_argument("waterfill: no subchannels");
  if (cap.size() != effective_noise.size()) throw std::invalid_argument("waterfill: cap size mismatch");
  if (!(budget > 0.0)) throw std::invalid_argument("waterfill: budget must be positive");

  // f(mu) = sum of clamped powers is piecewise linear; walk its breakpoints
  // (slope +1 at n_c, -1 at n_c + cap_c) until it reaches the budget.
  std::vector<std::pair<double, int>> events;
  for (std::size_t c = 0; c < cap.size(); ++c) {
    if (!(cap[c] >= 0.0)) throw std::invalid_argument("waterfill: negative cap");
    if (cap[c] == 0.0) continue;
    events.emplace_back(effective_noise[c], +1);
    if (std::isfinite(cap[c])) events.emplace_back(effective_noise[c] + cap[c], -1);
  }
  std::sort(events.begin(), events.end());

  const double inf = std::numeric_limits<double>::infinity();
  double level = inf;
  double filled = 0.0;
  int slope = 0;
  double at = events.empty() ? 0.0 : events.front().first;
  for (const auto& [x, d] : events) {
    const double next = filled + slope * (x - at);
    if (slope > 0 && next >= budget) {
      level = at + (budget - filled) / slope;
      break;
    }
    filled = next;
    at = x;
    slope += d;
  }
  if (level == inf && slope > 0) level = at + (budget - filled) / slope;

  WaterfillResult r;
  r.level = level;
  r.power.resize(cap.size());
  for (std::size_t c = 0; c < cap.size(); ++c) {
    r.power[c] = std::min(cap[c], std::max(0.0, level - effective_noise[c]));
  }
  return r;
}

double waterfill_objective(const std::vector<double>& effective_noise, const std::vector<double>& power) {
  double s = 0.0;
  for (std::size_t c = 0; c < power.size(); ++c) s += std::log2(1.0 + power[c] / effective_noise[c]);
  return s;
}

} // namespace istn
