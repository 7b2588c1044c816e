#pragma once

#include <vector>

namespace istn {

struct WaterfillResult {
  std::vector<double> power; // per input entry
  double level = 0.0;        // water level mu
};

/// Maximises sum log2(1 + p_c / n_c) subject to sum p_c = budget, where
/// n_c = (interference + noise) / gain is the effective noise of entry c.
/// p_c = max(0, mu - n_c) with the level mu solved exactly from the sorted
/// effective noises.
WaterfillResult waterfill(const std::vector<double>& effective_noise, double budget);

/// sum_c log2(1 + p_c / n_c)
double waterfill_objective(const std::vector<double>& effective_noise, const std::vector<double>& power);

} // namespace istn

namespace istn {

/// Water-filling with a per-entry power ceiling: p_c = min(max(0, mu - n_c), cap_c).
/// An infinite cap leaves the entry uncapped, so all-infinite caps give the
/// same allocation as waterfill(). When every entry saturates below the
/// budget the surplus stays unspent and `level` is +inf.
WaterfillResult waterfill_capped(const std::vector<double>& effective_noise, const std::vector<double>& cap,
                                 double budget);

} // namespace istn
