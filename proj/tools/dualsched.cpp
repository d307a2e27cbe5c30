#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsched/core/fjs_io.hpp"
#include "dsched/core/generator.hpp"
#include "dsched/harness/adaptive.hpp"
#include "dsched/harness/bench.hpp"
#include "dsched/rules/engine.hpp"

namespace {

using namespace dsched;

struct EngineFlags {
  std::string config_path;
  long long trigger_k = -1;
  long long trigger_l = -1;
  double epsilon = -1.0;
  std::string thresholds;  // "eps_rel,d_min,t_alpha,n"
  bool serialized = false;
  std::string backend = "mock";
  std::uint64_t seed = 1;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& flags) {
  cmd->add_option("--config", flags.config_path, "adaptive engine config JSON file");
  cmd->add_option("--trigger-k", flags.trigger_k, "periodic trigger interval K (decision epochs)");
  cmd->add_option("--trigger-l", flags.trigger_l, "throughput window length L for the drop trigger");
  cmd->add_option("--epsilon", flags.epsilon, "relative throughput drop threshold");
  cmd->add_option("--thresholds", flags.thresholds,
                  "validation thresholds as eps_rel,d_min,t_alpha,n");
  cmd->add_flag("--serialized", flags.serialized,
                "run deliberation inline at the trigger epoch (bit-reproducible)");
  cmd->add_option("--backend", flags.backend, "proposer backend")
      ->check(CLI::IsMember({"mock", "remote"}));
  cmd->add_option("--seed", flags.seed, "base seed");
}

ValidationThresholds parse_thresholds(const std::string& text) {
  ValidationThresholds t;
  char c1, c2, c3;
  std::istringstream is(text);
  if (!(is >> t.epsilon_rel >> c1 >> t.d_min >> c2 >> t.t_alpha >> c3 >> t.n) || c1 != ',' ||
      c2 != ',' || c3 != ',')
    throw DomainError("--thresholds expects eps_rel,d_min,t_alpha,n");
  t.validate();
  return t;
}

AdaptiveConfig engine_config(const EngineFlags& flags) {
  AdaptiveConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw DomainError("cannot read config file: " + flags.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    config = adaptive_config_from_json(buf.str());
  }
  if (flags.trigger_k >= 0) config.trigger.trigger_period = flags.trigger_k;
  if (flags.trigger_l >= 0) config.trigger.window_len = static_cast<std::size_t>(flags.trigger_l);
  if (flags.epsilon >= 0.0) config.trigger.epsilon = flags.epsilon;
  if (!flags.thresholds.empty()) config.thresholds = parse_thresholds(flags.thresholds);
  if (flags.serialized) config.serialized = true;
  config.pool_seed = flags.seed;
  return config;
}

std::unique_ptr<ProposerBackend> make_backend(const EngineFlags& flags, std::uint64_t seed) {
  if (flags.backend == "remote") {
    RemoteProposerConfig config = remote_config_from_env();
    if (config.url.empty())
      throw DomainError("--backend remote needs DSCHED_PROPOSER_URL in the environment");
    return remote_proposer(config);
  }
  return mock_proposer(seed);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read instance file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Instance ins = parse_fjs(buf.str());
  ins.name = std::filesystem::path(path).stem().string();
  return ins;
}

DisturbanceScript load_script(const std::string& path, int machine_count) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read disturbance script: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_disturbances(buf.str(), machine_count);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write output file: " + path);
  out << content;
}

// Instance sources shared by bench/ablate: explicit files, a directory, or a
// generated suite. Unreadable files become report lines, not fatal errors.
struct SuiteFlags {
  std::vector<std::string> instance_paths;
  std::string suite_dir;
  int generated = 0;
};

void add_suite_flags(CLI::App* cmd, SuiteFlags& flags) {
  cmd->add_option("--instance", flags.instance_paths, "instance file (repeatable)");
  cmd->add_option("--suite", flags.suite_dir, "directory of .fjs instance files");
  cmd->add_option("--generated", flags.generated, "generate this many random instances instead");
}

std::vector<std::pair<std::string, Instance>> load_suite(const SuiteFlags& flags,
                                                         std::uint64_t seed,
                                                         std::vector<std::string>& failures) {
  std::vector<std::string> paths = flags.instance_paths;
  if (!flags.suite_dir.empty()) {
    if (!std::filesystem::is_directory(flags.suite_dir))
      throw DomainError("--suite is not a directory: " + flags.suite_dir);
    for (const auto& entry : std::filesystem::directory_iterator(flags.suite_dir))
      if (entry.path().extension() == ".fjs") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
  }

  std::vector<std::pair<std::string, Instance>> instances;
  for (const std::string& path : paths) {
    try {
      instances.emplace_back(path, load_instance(path));
    } catch (const std::exception& e) {
      failures.push_back(path + ": " + e.what());
    }
  }

  int generated = flags.generated;
  if (paths.empty() && generated == 0) generated = 5;  // default suite
  for (int i = 0; i < generated; ++i) {
    std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    instances.emplace_back("gen-" + std::to_string(s), generate_instance({}, s));
  }
  return instances;
}

PolicySpec make_policy(const std::string& name, const AdaptiveConfig& base) {
  PolicySpec spec;
  spec.name = name;
  if (name == "adaptive") {
    spec.is_adaptive = true;
    spec.rule = base.initial_rule;
    spec.adaptive = base;
  } else {
    spec.rule = name;  // builtin name or raw rule text
  }
  return spec;
}

int cmd_run(const std::string& instance_path, const std::string& script_path,
            const std::string& policy, const std::string& repo_path, const std::string& out,
            const EngineFlags& flags) {
  Instance ins = load_instance(instance_path);
  DisturbanceScript script = load_script(script_path, ins.machine_count);
  AdaptiveConfig config = engine_config(flags);
  config.log_decisions = !out.empty();

  AdaptiveResult res;
  if (policy == "adaptive") {
    RuleValidator validator;
    RuleRepository repo;
    if (!repo_path.empty()) {
      RepoLoadResult loaded = RuleRepository::load(repo_path);
      if (loaded.dropped > 0)
        std::cerr << "repository: dropped " << loaded.dropped << " invalid record(s)\n";
      repo = loaded.repo;
    }
    auto backend = make_backend(flags, flags.seed);
    res = run_adaptive_episode(ins, script, *backend, repo, validator, config);
    if (!repo_path.empty()) repo.persist(repo_path);
  } else {
    RuleValidator validator;
    auto builtins = builtin_rules(validator);
    auto it = builtins.find(policy);
    CompiledRule rule = it != builtins.end() ? it->second : validator.validate(policy);
    res = run_static_episode(ins, script, rule, config.window_capacity, config.log_decisions);
  }

  std::cout << "instance:    " << ins.name << " (" << ins.jobs.size() << " jobs, "
            << ins.machine_count << " machines)\n"
            << "makespan:    " << res.schedule.makespan << '\n'
            << "epochs:      " << res.epochs << '\n'
            << "triggers:    " << res.triggers << " (" << res.coalesced << " coalesced)\n"
            << "cycles:      " << res.cycles << " (" << res.accepted << " accepted, "
            << res.rejected << " rejected, " << res.backend_errors << " backend errors)\n"
            << "deployments: " << res.deployments << '\n'
            << "final rule:  " << res.final_rule << '\n';

  if (!out.empty()) {
    std::string log;
    for (const DecisionRecord& r : res.decisions) log += format_decision_line(r) + "\n";
    write_file(out, log);
  }
  return 0;
}

int emit_benchmark(const BenchReport& report, const std::vector<std::string>& failures,
                   const std::string& out) {
  std::cout << format_metrics_table(report);
  for (const std::string& f : failures) std::cout << "load failed: " << f << '\n';
  if (!out.empty()) write_file(out, metrics_csv(report));
  return 0;
}

int cmd_bench(const SuiteFlags& suite, const std::vector<std::string>& policy_names,
              int episodes, const std::string& out, const EngineFlags& flags) {
  std::vector<std::string> failures;
  BenchConfig config;
  config.instances = load_suite(suite, flags.seed, failures);
  if (config.instances.empty()) throw DomainError("no loadable instances");

  AdaptiveConfig base = engine_config(flags);
  std::vector<std::string> names =
      policy_names.empty() ? std::vector<std::string>{"FIFO", "SPT", "adaptive"} : policy_names;
  for (const std::string& name : names) config.policies.push_back(make_policy(name, base));
  config.episodes = episodes;
  config.seed = flags.seed;
  config.serialized = flags.serialized;
  EngineFlags backend_flags = flags;
  config.backend_factory = [backend_flags](std::uint64_t seed) {
    return make_backend(backend_flags, seed);
  };
  return emit_benchmark(run_benchmark(config), failures, out);
}

int cmd_ablate(const SuiteFlags& suite, int episodes, const std::string& out,
               const std::string& dump_config, const EngineFlags& flags) {
  AdaptiveConfig base = engine_config(flags);
  if (!dump_config.empty()) write_file(dump_config, adaptive_config_json(base));

  std::vector<std::string> failures;
  BenchConfig config;
  config.instances = load_suite(suite, flags.seed, failures);
  if (config.instances.empty()) throw DomainError("no loadable instances");
  config.policies.push_back(make_policy("adaptive", base));  // replaced by the variants
  config.episodes = episodes;
  config.seed = flags.seed;
  config.serialized = flags.serialized;
  EngineFlags backend_flags = flags;
  config.backend_factory = [backend_flags](std::uint64_t seed) {
    return make_backend(backend_flags, seed);
  };
  return emit_benchmark(run_ablation(config, base), failures, out);
}

int cmd_stress(const std::string& instance_path, const std::string& policy_static,
               double t_fail, int machine, double duration, const std::string& out,
               const EngineFlags& flags) {
  StressScenario scenario;
  if (instance_path.empty()) {
    scenario = default_stress_scenario(flags.seed);
  } else {
    scenario.instance = load_instance(instance_path);
    StressScenario defaults = default_stress_scenario(flags.seed);
    scenario.t_fail = defaults.t_fail;
    scenario.failure_duration = defaults.failure_duration;
  }
  if (t_fail >= 0.0) scenario.t_fail = t_fail;
  if (machine >= 0) scenario.failed_machine = machine;
  if (duration > 0.0) scenario.failure_duration = duration;
  scenario.validate();

  AdaptiveConfig base = engine_config(flags);
  BenchConfig config;
  config.seed = flags.seed;
  config.serialized = flags.serialized;
  EngineFlags backend_flags = flags;
  config.backend_factory = [backend_flags](std::uint64_t seed) {
    return make_backend(backend_flags, seed);
  };
  config.policies.push_back(make_policy(policy_static, base));
  config.policies.push_back(make_policy("adaptive", base));

  StressReport report = run_stress(scenario, config);
  std::cout << "failure: machine " << scenario.failed_machine << " at t=" << scenario.t_fail
            << " for " << scenario.failure_duration << '\n';
  for (const StressSeries& run : report.runs)
    std::cout << run.policy << ": final makespan " << run.final_makespan << ", accepted cycles "
              << run.accepted_cycles << ", final rule " << run.final_rule << '\n';
  if (!out.empty()) write_file(out, stress_csv(report));
  return 0;
}

int cmd_latency(const SuiteFlags& suite, int episodes, const std::string& out,
                const EngineFlags& flags) {
  std::vector<std::string> failures;
  BenchConfig config;
  SuiteFlags sources = suite;
  if (sources.instance_paths.empty() && sources.suite_dir.empty() && sources.generated == 0) {
    GeneratorParams params;
    params.n_jobs = 10;
    params.n_machines = 5;
    config.instances.emplace_back("latency-10x5", generate_instance(params, flags.seed));
  } else {
    config.instances = load_suite(sources, flags.seed, failures);
  }
  if (config.instances.empty()) throw DomainError("no loadable instances");

  AdaptiveConfig base = engine_config(flags);
  config.policies.push_back(make_policy("adaptive", base));
  config.episodes = episodes;
  config.seed = flags.seed;
  EngineFlags backend_flags = flags;
  config.backend_factory = [backend_flags](std::uint64_t seed) {
    return make_backend(backend_flags, seed);
  };

  LatencyReport report = run_latency(config);
  std::cout << format_latency_report(report);
  for (const std::string& f : failures) std::cout << "load failed: " << f << '\n';
  if (!out.empty()) write_file(out, latency_csv(report));
  return 0;
}

int cmd_repo(const std::string& repo_path, int query_jobs, int query_machines, int k,
             const std::string& persist_path) {
  RepoLoadResult loaded = RuleRepository::load(repo_path);
  if (loaded.dropped > 0)
    std::cerr << "dropped " << loaded.dropped << " invalid record(s)\n";

  std::vector<RepoEntry> entries = loaded.repo.entries();
  if (query_jobs > 0 && query_machines > 0) {
    RetrievalConfig config;
    config.k = k;
    MetaFeatures meta{query_jobs, query_machines};
    entries = loaded.repo.retrieve(meta, config);
    for (const RepoEntry& e : entries)
      std::cout << "S=" << retrieval_score(e, meta, config) << "  v=" << e.value
                << "  C=" << e.complexity << "  meta=" << e.meta.n_jobs << 'x' << e.meta.n_machines
                << "  " << e.rule_source << '\n';
  } else {
    for (const RepoEntry& e : entries)
      std::cout << e.meta.n_jobs << 'x' << e.meta.n_machines << "  v=" << e.value
                << "  C=" << e.complexity << "  version=" << e.version << "  [" << e.benchmark
                << " " << e.timestamp << "]  " << e.rule_source << '\n';
  }
  std::cout << loaded.repo.size() << " entr" << (loaded.repo.size() == 1 ? "y" : "ies") << '\n';
  if (!persist_path.empty()) loaded.repo.persist(persist_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-stream adaptive scheduler for dynamic flexible job shops"};
  app.require_subcommand(1);

  EngineFlags run_flags, bench_flags, ablate_flags, stress_flags, latency_flags;
  SuiteFlags bench_suite, ablate_suite, latency_suite;

  auto* run = app.add_subcommand("run", "run one episode and print the outcome");
  std::string run_instance, run_script, run_policy = "adaptive", run_repo, run_out;
  run->add_option("--instance", run_instance, "instance file")->required();
  run->add_option("--script", run_script, "disturbance script file");
  run->add_option("--policy", run_policy, "builtin name, rule text, or 'adaptive'");
  run->add_option("--repo-path", run_repo, "rule repository file (loaded and persisted)");
  run->add_option("--out", run_out, "write the per-decision log here");
  add_engine_flags(run, run_flags);

  auto* bench = app.add_subcommand("bench", "makespan/RPD/rank table over a suite");
  std::vector<std::string> bench_policies;
  int bench_episodes = 1;
  std::string bench_out;
  add_suite_flags(bench, bench_suite);
  bench->add_option("--policy", bench_policies, "policy column (repeatable)");
  bench->add_option("--episodes", bench_episodes, "episodes per cell (mean makespan)");
  bench->add_option("--out", bench_out, "write CSV here");
  add_engine_flags(bench, bench_flags);

  auto* ablate = app.add_subcommand("ablate", "four-variant component ablation");
  int ablate_episodes = 1;
  std::string ablate_out, ablate_dump;
  add_suite_flags(ablate, ablate_suite);
  ablate->add_option("--episodes", ablate_episodes, "episodes per cell");
  ablate->add_option("--out", ablate_out, "write CSV here");
  ablate->add_option("--dump-config", ablate_dump, "write the base engine config JSON here");
  add_engine_flags(ablate, ablate_flags);

  auto* stress = app.add_subcommand("stress", "machine-failure throughput comparison");
  std::string stress_instance, stress_policy = "FIFO", stress_out;
  double stress_t_fail = -1.0, stress_duration = -1.0;
  int stress_machine = -1;
  stress->add_option("--instance", stress_instance, "instance file (default: seeded scenario)");
  stress->add_option("--policy", stress_policy, "static policy to compare against");
  stress->add_option("--t-fail", stress_t_fail, "failure time");
  stress->add_option("--machine", stress_machine, "failed machine id (0-based)");
  stress->add_option("--duration", stress_duration, "failure duration");
  stress->add_option("--out", stress_out, "write long-format CSV here");
  add_engine_flags(stress, stress_flags);

  auto* latency = app.add_subcommand("latency", "dispatch and deliberation latency profile");
  int latency_episodes = 30;
  std::string latency_out;
  add_suite_flags(latency, latency_suite);
  latency->add_option("--episodes", latency_episodes, "episodes per instance and mode");
  latency->add_option("--out", latency_out, "write CSV here");
  add_engine_flags(latency, latency_flags);

  auto* repo = app.add_subcommand("repo", "inspect or rewrite a rule repository file");
  std::string repo_path, repo_persist;
  int repo_jobs = 0, repo_machines = 0, repo_k = 3;
  repo->add_option("--repo-path", repo_path, "repository file")->required();
  repo->add_option("--query-jobs", repo_jobs, "retrieval query: job count");
  repo->add_option("--query-machines", repo_machines, "retrieval query: machine count");
  repo->add_option("--k", repo_k, "retrieval depth");
  repo->add_option("--persist", repo_persist, "rewrite the validated repository here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(run_instance, run_script, run_policy, run_repo, run_out, run_flags);
    if (bench->parsed())
      return cmd_bench(bench_suite, bench_policies, bench_episodes, bench_out, bench_flags);
    if (ablate->parsed())
      return cmd_ablate(ablate_suite, ablate_episodes, ablate_out, ablate_dump, ablate_flags);
    if (stress->parsed())
      return cmd_stress(stress_instance, stress_policy, stress_t_fail, stress_machine,
                        stress_duration, stress_out, stress_flags);
    if (latency->parsed())
      return cmd_latency(latency_suite, latency_episodes, latency_out, latency_flags);
    if (repo->parsed())
      return cmd_repo(repo_path, repo_jobs, repo_machines, repo_k, repo_persist);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
