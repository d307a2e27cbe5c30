#include "dsched/delib/trigger.hpp"

#include <algorithm>
#include <cmath>

namespace dsched {

void TriggerConfig::validate() const {
  if (trigger_period < 1) throw DomainError("trigger period K must be >= 1");
  if (window_len < 1) throw DomainError("trigger window L must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw DomainError("trigger epsilon must be positive and finite");
}

TriggerResult check_trigger(long long t, const std::vector<double>& metric_history,
                            const TriggerConfig& config) {
  config.validate();
  if (metric_history.empty()) throw DomainError("metric history must hold at least one sample");

  TriggerResult result;
  result.periodic = (t % config.trigger_period) == 0;

  std::size_t span = std::min(metric_history.size(), config.window_len);
  double m_t = metric_history.back();
  double m_star = m_t;
  for (std::size_t i = metric_history.size() - span; i < metric_history.size(); ++i)
    m_star = std::max(m_star, metric_history[i]);
  double denom = std::abs(m_star) > 1e-9 ? std::abs(m_star) : 1.0;
  result.perf = (m_star - m_t) / denom >= config.epsilon;
  return result;
}

}  // namespace dsched
