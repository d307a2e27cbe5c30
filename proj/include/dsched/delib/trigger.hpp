#pragma once

#include <vector>

#include "dsched/core/types.hpp"

namespace dsched {

struct TriggerConfig {
  long long trigger_period = 50;  // K: decision-step period
  std::size_t window_len = 10;    // L: sliding-window length for m*
  double epsilon = 0.05;          // relative-drop threshold
  void validate() const;          // K >= 1, L >= 1, epsilon > 0
};

struct TriggerResult {
  bool periodic = false;  // t mod K = 0
  bool perf = false;      // (m* - m_t)/|m*| >= epsilon, m* = max of last L samples
  bool any() const { return periodic || perf; }
};

// `t` is the 1-based decision epoch; metric_history holds m samples oldest
// first with m_t last, and must be non-empty. When |m*| <= 1e-9 the relative
// drop divides by 1.0 instead.
TriggerResult check_trigger(long long t, const std::vector<double>& metric_history,
                            const TriggerConfig& config);

}  // namespace dsched
