#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "dsched/delib/proposer.hpp"

namespace dsched {

namespace {

using nlohmann::json;

json profile_to_json(const SummaryProfile& p) {
  json feats = json::array();
  for (double m : p.metric_history) feats.push_back(m);
  return json{{"window_len", p.window_len},
              {"mean_utilization", p.mean_utilization},
              {"max_utilization", p.max_utilization},
              {"queue_lengths", p.queue_lengths},
              {"bottleneck_machine", p.bottleneck_machine},
              {"mean_job_wait", p.mean_job_wait},
              {"throughput", p.throughput},
              {"metric_history", feats},
              {"current_rule", p.current_rule},
              {"active_failures", p.active_failures},
              {"objective", p.objective}};
}

json report_to_json(const ValidationReport& r) {
  return json{{"mean_old", r.mean_old},
              {"mean_cand", r.mean_cand},
              {"var_old", r.var_old},
              {"var_cand", r.var_cand},
              {"r_t", r.r_t},
              {"pooled_var", r.pooled_var},
              {"d_eff", std::isfinite(r.d_eff) ? r.d_eff : 1e9},
              {"t_stat", std::isfinite(r.t_stat) ? r.t_stat : 1e9},
              {"episodes", r.episodes},
              {"accepted", r.accepted},
              {"feasibility_failures", r.feasibility_failures}};
}

json directive_to_json(const Directive& d) {
  json feats = json::array();
  for (Feature f : d.target_features) feats.push_back(std::string(feature_name(f)));
  return json{{"strategy", d.strategy}, {"target_features", feats}, {"bottleneck", d.bottleneck}};
}

class RemoteProposer final : public ProposerBackend {
 public:
  explicit RemoteProposer(RemoteProposerConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw BackendError("remote proposer requires an endpoint URL");
    auto scheme_end = config_.url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = config_.url.find('/', host_start);
    if (path_start == std::string::npos) {
      base_ = config_.url;
      path_ = "/";
    } else {
      base_ = config_.url.substr(0, path_start);
      path_ = config_.url.substr(path_start);
    }
  }

  Directive plan(const SummaryProfile& profile) override {
    last_profile_ = profile_to_json(profile);
    json req{{"phase", "plan"}, {"profile", last_profile_}, {"objective", profile.objective}};
    json res = post(req);
    if (!res.contains("directive") || !res["directive"].is_string())
      throw BackendError("protocol violation: response missing 'directive'");
    Directive d;
    d.strategy = res["directive"].get<std::string>();
    if (d.strategy.empty()) throw BackendError("protocol violation: empty directive");
    if (res.contains("bottleneck") && res["bottleneck"].is_number_integer())
      d.bottleneck = res["bottleneck"].get<int>();
    if (res.contains("target_features") && res["target_features"].is_array())
      for (const auto& name : res["target_features"])
        if (name.is_string())
          if (auto f = feature_from_name(name.get<std::string>())) d.target_features.push_back(*f);
    return d;
  }

  std::string synthesize(const Directive& directive, const std::string& current_rule,
                         const std::vector<RepoEntry>& retrieved) override {
    json rules = json::array();
    for (const RepoEntry& e : retrieved)
      rules.push_back(json{{"rule", e.rule_source},
                           {"value", e.value},
                           {"meta", {{"n_jobs", e.meta.n_jobs}, {"n_machines", e.meta.n_machines}}}});
    json req{{"phase", "synthesize"},
             {"profile", last_profile_},
             {"directive", directive_to_json(directive)},
             {"current_rule", current_rule},
             {"retrieved_rules", rules}};
    json res = post(req);
    if (!res.contains("rule") || !res["rule"].is_string())
      throw BackendError("protocol violation: response missing 'rule'");
    return res["rule"].get<std::string>();
  }

  ReflectorNote reflect(const ValidationReport& report, const std::string& candidate) override {
    json req{{"phase", "reflect"},
             {"profile", last_profile_},
             {"report", report_to_json(report)},
             {"candidate_rule", candidate}};
    json res = post(req);
    if (!res.contains("continue") || !res["continue"].is_boolean())
      throw BackendError("protocol violation: response missing 'continue'");
    ReflectorNote note;
    note.keep_going = res["continue"].get<bool>();
    if (res.contains("note") && res["note"].is_string()) note.text = res["note"].get<std::string>();
    return note;
  }

 private:
  json post(const json& body) {
    httplib::Client client(base_);
    time_t sec = static_cast<time_t>(config_.timeout_seconds);
    long usec = static_cast<long>((config_.timeout_seconds - static_cast<double>(sec)) * 1e6);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    httplib::Headers headers;
    if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw BackendError("proposer unreachable or timed out: " + to_string(res.error()));
    if (res->status != 200)
      throw BackendError("proposer returned status " + std::to_string(res->status));
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError(std::string("protocol violation: invalid JSON response: ") + e.what());
    }
  }

  RemoteProposerConfig config_;
  std::string base_;
  std::string path_;
  json last_profile_;
};

}  // namespace

RemoteProposerConfig remote_config_from_env() {
  RemoteProposerConfig config;
  if (const char* url = std::getenv("DSCHED_PROPOSER_URL")) config.url = url;
  if (const char* token = std::getenv("DSCHED_PROPOSER_TOKEN")) config.token = token;
  if (const char* timeout = std::getenv("DSCHED_PROPOSER_TIMEOUT")) {
    char* end = nullptr;
    double t = std::strtod(timeout, &end);
    if (end != timeout && std::isfinite(t) && t > 0.0) config.timeout_seconds = t;
  }
  return config;
}

std::unique_ptr<ProposerBackend> remote_proposer(const RemoteProposerConfig& config) {
  return std::make_unique<RemoteProposer>(config);
}

}  // namespace dsched
