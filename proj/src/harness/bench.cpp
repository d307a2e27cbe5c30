#include "dsched/harness/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "dsched/core/generator.hpp"
#include "dsched/rules/engine.hpp"
#include "json.hpp"

namespace dsched {

namespace {

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Builtin names map to their rule text; anything else is rule text already.
std::string resolve_rule_source(const std::string& name_or_text) {
  RuleValidator v;
  auto builtins = builtin_rules(v);
  auto it = builtins.find(name_or_text);
  return it != builtins.end() ? it->second.source : name_or_text;
}

const DisturbanceScript& script_for(const BenchConfig& config, std::size_t index) {
  static const DisturbanceScript empty;
  return config.scripts.empty() ? empty : config.scripts[index];
}

std::unique_ptr<ProposerBackend> make_backend(const BenchConfig& config, std::uint64_t seed) {
  return config.backend_factory ? config.backend_factory(seed) : mock_proposer(seed);
}

// Mean makespan over the episodes of one (instance, policy) cell.
double run_cell(const Instance& instance, const DisturbanceScript& script,
                const PolicySpec& spec, const BenchConfig& config, std::uint64_t cell_seed) {
  RuleValidator validator;
  std::string source = resolve_rule_source(spec.rule);
  double sum = 0.0;

  if (!spec.is_adaptive) {
    CompiledRule rule = validator.validate(source);
    for (int e = 0; e < config.episodes; ++e)
      sum += run_static_episode(instance, script, rule).schedule.makespan;
    return sum / config.episodes;
  }

  auto backend = make_backend(config, cell_seed);
  AdaptiveConfig acfg = spec.adaptive;
  acfg.initial_rule = source;
  if (config.serialized) acfg.serialized = true;
  RuleRepository repository;
  for (int e = 0; e < config.episodes; ++e) {
    if (spec.cold_start_each_episode) repository = RuleRepository();
    acfg.pool_seed = spec.adaptive.pool_seed + cell_seed * 1000 +
                     static_cast<std::uint64_t>(e);
    sum +=
        run_adaptive_episode(instance, script, *backend, repository, validator, acfg)
            .schedule.makespan;
  }
  return sum / config.episodes;
}

LatencyStats stats_of(std::vector<double> samples) {
  LatencyStats s;
  s.samples = static_cast<long long>(samples.size());
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  s.median_us = samples[samples.size() / 2];
  std::size_t p99 = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(samples.size())));
  s.p99_us = samples[std::min(samples.size() - 1, p99 > 0 ? p99 - 1 : 0)];
  return s;
}

}  // namespace

double rpd(double value, double best) {
  if (!(best > 0.0)) throw DomainError("RPD reference must be positive");
  return 100.0 * (value - best) / best;
}

std::vector<double> midranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(values.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of positions i..j, 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

void BenchConfig::validate() const {
  if (instances.empty()) throw DomainError("benchmark needs at least one instance");
  if (policies.empty()) throw DomainError("benchmark needs at least one policy");
  if (episodes < 1) throw DomainError("benchmark needs at least one episode per cell");
  if (!scripts.empty() && scripts.size() != instances.size())
    throw DomainError("scripts must be absent or parallel to instances");
}

BenchReport run_benchmark(const BenchConfig& config) {
  config.validate();

  BenchReport report;
  for (const PolicySpec& p : config.policies) report.policies.push_back(p.name);

  for (std::size_t i = 0; i < config.instances.size(); ++i) {
    const auto& [id, instance] = config.instances[i];
    const DisturbanceScript& script = script_for(config, i);
    std::uint64_t cell_seed = config.seed + static_cast<std::uint64_t>(i);

    MetricsRow row;
    row.instance_id = id;
    try {
      for (const PolicySpec& spec : config.policies)
        row.makespan.push_back(run_cell(instance, script, spec, config, cell_seed));

      row.best = *std::min_element(row.makespan.begin(), row.makespan.end());
      if (config.use_oracle) {
        try {
          row.best = brute_force_best(instance, script, config.oracle);
          row.oracle_best = true;
        } catch (const DomainError&) {
          // over the enumeration cap: the row minimum stands in
        }
      }
      for (double v : row.makespan) row.rpd.push_back(rpd(v, row.best));
      row.rank = midranks(row.makespan);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.makespan.assign(config.policies.size(), nan());
      row.rpd.assign(config.policies.size(), nan());
      row.rank.assign(config.policies.size(), nan());
    }
    report.rows.push_back(std::move(row));
  }

  report.mean_rpd.assign(config.policies.size(), 0.0);
  report.mean_rank.assign(config.policies.size(), 0.0);
  int ok_rows = 0;
  for (const MetricsRow& row : report.rows) {
    if (!row.error.empty()) continue;
    ++ok_rows;
    for (std::size_t p = 0; p < row.rpd.size(); ++p) {
      report.mean_rpd[p] += row.rpd[p];
      report.mean_rank[p] += row.rank[p];
    }
  }
  for (std::size_t p = 0; p < report.mean_rpd.size(); ++p) {
    if (ok_rows > 0) {
      report.mean_rpd[p] /= ok_rows;
      report.mean_rank[p] /= ok_rows;
    } else {
      report.mean_rpd[p] = nan();
      report.mean_rank[p] = nan();
    }
  }
  return report;
}

BenchReport run_ablation(const BenchConfig& config, const AdaptiveConfig& base) {
  auto variant = [&](const std::string& name, bool loop, bool repo) {
    PolicySpec s;
    s.name = name;
    s.rule = base.initial_rule;
    s.is_adaptive = true;
    s.adaptive = base;
    if (!loop) s.adaptive.limits.max_iters = 1;  // one candidate per trigger
    if (!repo) {
      s.adaptive.retrieval_enabled = false;
      s.cold_start_each_episode = true;
    }
    return s;
  };

  BenchConfig c = config;
  c.policies = {variant("Full", true, true), variant("w/o Loop", false, true),
                variant("w/o Repo", true, false), variant("w/o Both", false, false)};
  return run_benchmark(c);
}

void StressScenario::validate() const {
  instance.validate();
  if (t_fail < 0.0) throw DomainError("failure time must be >= 0");
  if (!(failure_duration > 0.0)) throw DomainError("failure duration must be positive");
  if (failed_machine < 0 || failed_machine >= instance.machine_count)
    throw DomainError("failed machine out of range");
}

DisturbanceScript StressScenario::script() const {
  Disturbance d;
  d.kind = Disturbance::Kind::machine_failure;
  d.time = t_fail;
  d.machine = failed_machine;
  d.duration = failure_duration;
  DisturbanceScript s;
  s.events.push_back(d);
  return s;
}

StressScenario default_stress_scenario(std::uint64_t seed) {
  GeneratorParams params;
  params.n_jobs = 10;
  params.n_machines = 5;
  params.min_ops = 2;
  params.max_ops = 4;
  params.min_flex = 1;
  params.max_flex = 3;
  params.min_time = 2;
  params.max_time = 9;

  StressScenario scenario;
  scenario.instance = generate_instance(params, seed);
  scenario.instance.name = "stress-" + std::to_string(seed);

  // Undisturbed baseline decides the strike: the busiest machine, mid-run.
  RuleValidator v;
  auto baseline = run_static_episode(scenario.instance, {},
                                     builtin_rules(v).at("FIFO"));
  std::vector<Time> busy(static_cast<std::size_t>(scenario.instance.machine_count), 0.0);
  for (const GanttSegment& g : baseline.schedule.gantt)
    busy[static_cast<std::size_t>(g.machine)] += g.duration();
  scenario.failed_machine = static_cast<int>(
      std::max_element(busy.begin(), busy.end()) - busy.begin());
  scenario.t_fail = std::floor(baseline.schedule.makespan * 0.4);
  scenario.failure_duration = std::max(4.0, std::floor(baseline.schedule.makespan * 0.2));
  return scenario;
}

StressReport run_stress(const StressScenario& scenario, const BenchConfig& config) {
  scenario.validate();
  if (config.policies.empty()) throw DomainError("stress run needs at least one policy");
  DisturbanceScript script = scenario.script();

  StressReport report;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const PolicySpec& spec = config.policies[p];
    std::string source = resolve_rule_source(spec.rule);
    RuleValidator validator;

    StressSeries series;
    series.policy = spec.name;
    if (spec.is_adaptive) {
      auto backend = make_backend(config, config.seed);
      RuleRepository repository;
      AdaptiveConfig acfg = spec.adaptive;
      acfg.initial_rule = source;
      acfg.window_capacity = scenario.window_capacity;
      if (config.serialized) acfg.serialized = true;
      AdaptiveResult res =
          run_adaptive_episode(scenario.instance, script, *backend, repository, validator, acfg);
      series.throughput = std::move(res.throughput_series);
      series.final_makespan = res.schedule.makespan;
      series.final_rule = res.final_rule;
      series.accepted_cycles = res.accepted;
    } else {
      CompiledRule rule = validator.validate(source);
      AdaptiveResult res =
          run_static_episode(scenario.instance, script, rule, scenario.window_capacity);
      series.throughput = std::move(res.throughput_series);
      series.final_makespan = res.schedule.makespan;
      series.final_rule = source;
    }
    report.runs.push_back(std::move(series));
  }
  return report;
}

LatencyReport run_latency(const BenchConfig& config) {
  if (config.instances.empty()) throw DomainError("latency run needs at least one instance");
  if (config.episodes < 1) throw DomainError("latency run needs at least one episode");

  PolicySpec spec;
  spec.name = "adaptive";
  spec.is_adaptive = true;
  for (const PolicySpec& p : config.policies)
    if (p.is_adaptive) {
      spec = p;
      break;
    }

  std::vector<double> async_lat, serial_lat, cycle_lat;
  for (std::size_t i = 0; i < config.instances.size(); ++i) {
    const Instance& instance = config.instances[i].second;
    const DisturbanceScript& script = script_for(config, i);
    for (int mode = 0; mode < 2; ++mode) {
      bool serialized = mode == 1;
      RuleValidator validator;
      RuleRepository repository;
      auto backend = make_backend(config, config.seed + i);
      AdaptiveConfig acfg = spec.adaptive;
      acfg.initial_rule = resolve_rule_source(spec.rule);
      acfg.serialized = serialized;
      acfg.log_decisions = true;
      for (int e = 0; e < config.episodes; ++e) {
        AdaptiveResult res =
            run_adaptive_episode(instance, script, *backend, repository, validator, acfg);
        auto& sink = serialized ? serial_lat : async_lat;
        for (const DecisionRecord& r : res.decisions) sink.push_back(r.latency_us);
        for (double c : res.cycle_latencies_us) cycle_lat.push_back(c);
      }
    }
  }

  LatencyReport report;
  report.dispatch = stats_of(std::move(async_lat));
  report.dispatch_serialized = stats_of(std::move(serial_lat));
  report.cycle = stats_of(std::move(cycle_lat));
  if (report.dispatch.median_us > 0.0)
    report.ratio = report.cycle.median_us / report.dispatch.median_us;
  return report;
}

std::string format_metrics_table(const BenchReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "instance";
  for (const std::string& p : report.policies) os << std::setw(26) << p;
  os << "best\n";
  os << std::fixed << std::setprecision(2);
  for (const MetricsRow& row : report.rows) {
    os << std::setw(18) << row.instance_id;
    if (!row.error.empty()) {
      os << "FAILED: " << row.error << '\n';
      continue;
    }
    for (std::size_t p = 0; p < report.policies.size(); ++p) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << row.makespan[p] << " (" << row.rpd[p]
           << "%, r" << row.rank[p] << ")";
      os << std::setw(26) << cell.str();
    }
    os << row.best << (row.oracle_best ? " *" : "") << '\n';
  }
  os << std::setw(18) << "mean RPD %";
  for (double v : report.mean_rpd) os << std::setw(26) << v;
  os << '\n' << std::setw(18) << "mean rank";
  for (double v : report.mean_rank) os << std::setw(26) << v;
  os << '\n';
  return os.str();
}

std::string metrics_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "instance,policy,makespan,rpd,rank,best,oracle_best\n";
  for (const MetricsRow& row : report.rows) {
    if (!row.error.empty()) continue;
    for (std::size_t p = 0; p < report.policies.size(); ++p)
      os << row.instance_id << ',' << report.policies[p] << ',' << row.makespan[p] << ','
         << row.rpd[p] << ',' << row.rank[p] << ',' << row.best << ','
         << (row.oracle_best ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string stress_csv(const StressReport& report) {
  std::ostringstream os;
  os << "time,throughput,policy\n";
  for (const StressSeries& run : report.runs)
    for (const auto& [time, m] : run.throughput)
      os << time << ',' << m << ',' << run.policy << '\n';
  return os.str();
}

std::string format_latency_report(const LatencyReport& report) {
  std::ostringstream os;
  auto line = [&](const char* name, const LatencyStats& s) {
    os << name << ": median " << s.median_us << " us, p99 " << s.p99_us << " us ("
       << s.samples << " samples)\n";
  };
  line("dispatch (async)", report.dispatch);
  line("dispatch (serialized)", report.dispatch_serialized);
  line("deliberation cycle", report.cycle);
  os << "cycle/dispatch median ratio: " << report.ratio << "\n";
  return os.str();
}

std::string latency_csv(const LatencyReport& report) {
  std::ostringstream os;
  os << "stream,median_us,p99_us,samples\n";
  os << "dispatch_async," << report.dispatch.median_us << ',' << report.dispatch.p99_us << ','
     << report.dispatch.samples << '\n';
  os << "dispatch_serialized," << report.dispatch_serialized.median_us << ','
     << report.dispatch_serialized.p99_us << ',' << report.dispatch_serialized.samples << '\n';
  os << "cycle," << report.cycle.median_us << ',' << report.cycle.p99_us << ','
     << report.cycle.samples << '\n';
  return os.str();
}

std::string adaptive_config_json(const AdaptiveConfig& config) {
  nlohmann::json j;
  j["initial_rule"] = config.initial_rule;
  j["trigger"] = {{"period", config.trigger.trigger_period},
                  {"window", config.trigger.window_len},
                  {"epsilon", config.trigger.epsilon}};
  j["thresholds"] = {{"epsilon_rel", config.thresholds.epsilon_rel},
                     {"d_min", config.thresholds.d_min},
                     {"t_alpha", config.thresholds.t_alpha},
                     {"n", config.thresholds.n}};
  j["retrieval"] = {{"lambda1", config.retrieval.lambda1},
                    {"lambda2", config.retrieval.lambda2},
                    {"delta_match", config.retrieval.delta_match},
                    {"k", config.retrieval.k}};
  j["max_iters"] = config.limits.max_iters;
  j["serialized"] = config.serialized;
  j["retrieval_enabled"] = config.retrieval_enabled;
  j["parallel_validation"] = config.parallel_validation;
  j["window_capacity"] = config.window_capacity;
  j["pool_seed"] = config.pool_seed;
  j["benchmark"] = config.benchmark;
  return j.dump(2);
}

AdaptiveConfig adaptive_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config is not valid JSON: ") + e.what());
  }
  AdaptiveConfig config;
  try {
    config.initial_rule = j.at("initial_rule").get<std::string>();
    config.trigger.trigger_period = j.at("trigger").at("period").get<long long>();
    config.trigger.window_len = j.at("trigger").at("window").get<std::size_t>();
    config.trigger.epsilon = j.at("trigger").at("epsilon").get<double>();
    config.thresholds.epsilon_rel = j.at("thresholds").at("epsilon_rel").get<double>();
    config.thresholds.d_min = j.at("thresholds").at("d_min").get<double>();
    config.thresholds.t_alpha = j.at("thresholds").at("t_alpha").get<double>();
    config.thresholds.n = j.at("thresholds").at("n").get<int>();
    config.retrieval.lambda1 = j.at("retrieval").at("lambda1").get<double>();
    config.retrieval.lambda2 = j.at("retrieval").at("lambda2").get<double>();
    config.retrieval.delta_match = j.at("retrieval").at("delta_match").get<double>();
    config.retrieval.k = j.at("retrieval").at("k").get<int>();
    config.limits.max_iters = j.at("max_iters").get<int>();
    config.serialized = j.at("serialized").get<bool>();
    config.retrieval_enabled = j.at("retrieval_enabled").get<bool>();
    config.parallel_validation = j.at("parallel_validation").get<bool>();
    config.window_capacity = j.at("window_capacity").get<std::size_t>();
    config.pool_seed = j.at("pool_seed").get<std::uint64_t>();
    config.benchmark = j.at("benchmark").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config field missing or mistyped: ") + e.what());
  }
  return config;
}

}  // namespace dsched
