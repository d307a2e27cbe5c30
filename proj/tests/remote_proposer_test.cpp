#include <doctest.h>

#include <cstdlib>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "dsched/delib/proposer.hpp"

using namespace dsched;
using nlohmann::json;

namespace {

// Loopback proposer endpoint. Each request is parsed, recorded, and answered
// from a per-phase response table; tests assert on the captured requests.
class FakeProposerServer {
 public:
  FakeProposerServer() {
    server_.Post("/propose", [this](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body, nullptr, false);
      {
        std::lock_guard<std::mutex> lock(mu_);
        requests_.push_back(body);
        auth_headers_.push_back(req.get_header_value("Authorization"));
      }
      if (raw_response_) {
        res.status = status_;
        res.set_content(*raw_response_, "text/plain");
        return;
      }
      std::string phase = body.is_discarded() ? "" : body.value("phase", "");
      res.status = status_;
      res.set_content(responses_.at(phase).dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeProposerServer() {
    server_.stop();
    thread_.join();
  }

  RemoteProposerConfig config(const std::string& token = "") const {
    RemoteProposerConfig c;
    c.url = "http://127.0.0.1:" + std::to_string(port_) + "/propose";
    c.token = token;
    c.timeout_seconds = 5.0;
    return c;
  }

  void respond(const std::string& phase, json body) { responses_[phase] = std::move(body); }
  void respond_raw(std::string body, int status = 200) {
    raw_response_ = std::move(body);
    status_ = status;
  }
  void set_status(int status) { status_ = status; }

  std::vector<json> requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }
  std::vector<std::string> auth_headers() const {
    std::lock_guard<std::mutex> lock(mu_);
    return auth_headers_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::vector<json> requests_;
  std::vector<std::string> auth_headers_;
  std::map<std::string, json> responses_;
  std::optional<std::string> raw_response_;
  int status_ = 200;
};

SummaryProfile sample_profile() {
  SummaryProfile p;
  p.window_len = 4;
  p.mean_utilization = 0.5;
  p.max_utilization = 0.8;
  p.queue_lengths = {2, 0};
  p.bottleneck_machine = 0;
  p.mean_job_wait = 1.25;
  p.throughput = 2.0;
  p.metric_history = {1.5, 2.0};
  p.current_rule = "job_wait_time";
  p.active_failures = {1};
  return p;
}

}  // namespace

TEST_CASE("remote proposer speaks the three-phase wire protocol") {
  FakeProposerServer server;
  server.respond("plan", json{{"directive", "focus short ops"},
                              {"bottleneck", 1},
                              {"target_features", json::array({"op_proc_time", "nonsense"})}});
  server.respond("synthesize", json{{"rule", "-op_proc_time"}});
  server.respond("reflect", json{{"continue", false}, {"note", "done"}});

  auto proposer = remote_proposer(server.config("sekret"));

  Directive d = proposer->plan(sample_profile());
  CHECK(d.strategy == "focus short ops");
  CHECK(d.bottleneck == 1);
  REQUIRE(d.target_features.size() == 1);  // unknown names are skipped
  CHECK(d.target_features[0] == Feature::op_proc_time);

  std::vector<RepoEntry> retrieved(1);
  retrieved[0].meta = MetaFeatures{4, 2};
  retrieved[0].rule_source = "job_remaining_work";
  retrieved[0].value = 0.25;
  CHECK(proposer->synthesize(d, "job_wait_time", retrieved) == "-op_proc_time");

  ValidationReport report;
  report.r_t = 0.1;
  report.d_eff = std::numeric_limits<double>::infinity();
  report.t_stat = std::numeric_limits<double>::infinity();
  report.episodes = 5;
  ReflectorNote note = proposer->reflect(report, "-op_proc_time");
  CHECK_FALSE(note.keep_going);
  CHECK(note.text == "done");

  auto requests = server.requests();
  REQUIRE(requests.size() == 3);

  CHECK(requests[0]["phase"] == "plan");
  CHECK(requests[0]["objective"] == "makespan");
  CHECK(requests[0]["profile"]["current_rule"] == "job_wait_time");
  CHECK(requests[0]["profile"]["throughput"] == 2.0);
  CHECK(requests[0]["profile"]["queue_lengths"] == json::array({2, 0}));

  CHECK(requests[1]["phase"] == "synthesize");
  CHECK(requests[1]["current_rule"] == "job_wait_time");
  CHECK(requests[1]["directive"]["strategy"] == "focus short ops");
  REQUIRE(requests[1]["retrieved_rules"].size() == 1);
  CHECK(requests[1]["retrieved_rules"][0]["rule"] == "job_remaining_work");
  CHECK(requests[1]["retrieved_rules"][0]["value"] == 0.25);
  CHECK(requests[1]["profile"]["window_len"] == 4);  // profile echoed every phase

  CHECK(requests[2]["phase"] == "reflect");
  CHECK(requests[2]["candidate_rule"] == "-op_proc_time");
  CHECK(requests[2]["report"]["r_t"] == 0.1);
  CHECK(requests[2]["report"]["episodes"] == 5);
  CHECK(requests[2]["report"]["d_eff"] == 1e9);  // non-finite stats are capped on the wire

  for (const auto& h : server.auth_headers()) CHECK(h == "Bearer sekret");
}

TEST_CASE("token is omitted when not configured") {
  FakeProposerServer server;
  server.respond("plan", json{{"directive", "d"}});
  auto proposer = remote_proposer(server.config(""));
  proposer->plan(sample_profile());
  CHECK(server.auth_headers().at(0).empty());
}

TEST_CASE("protocol violations raise backend errors") {
  FakeProposerServer server;
  auto proposer = remote_proposer(server.config());

  SUBCASE("missing directive") {
    server.respond("plan", json::object());
    CHECK_THROWS_AS(proposer->plan(sample_profile()), BackendError);
  }
  SUBCASE("empty directive") {
    server.respond("plan", json{{"directive", ""}});
    CHECK_THROWS_AS(proposer->plan(sample_profile()), BackendError);
  }
  SUBCASE("missing rule") {
    server.respond("synthesize", json{{"note", "no rule here"}});
    CHECK_THROWS_AS(proposer->synthesize(Directive{"d", {}, -1}, "clock", {}), BackendError);
  }
  SUBCASE("continue of the wrong type") {
    server.respond("reflect", json{{"continue", "yes"}});
    CHECK_THROWS_AS(proposer->reflect(ValidationReport{}, "clock"), BackendError);
  }
  SUBCASE("non-JSON body") {
    server.respond_raw("this is not json");
    CHECK_THROWS_AS(proposer->plan(sample_profile()), BackendError);
  }
  SUBCASE("HTTP error status") {
    server.respond("plan", json{{"directive", "d"}});
    server.set_status(500);
    CHECK_THROWS_AS(proposer->plan(sample_profile()), BackendError);
  }
}

TEST_CASE("unreachable endpoint raises a backend error") {
  RemoteProposerConfig config;
  config.url = "http://127.0.0.1:1/propose";  // nothing listens on port 1
  config.timeout_seconds = 2.0;
  auto proposer = remote_proposer(config);
  CHECK_THROWS_AS(proposer->plan(sample_profile()), BackendError);
}

TEST_CASE("a remote proposer requires an endpoint") {
  CHECK_THROWS_AS(remote_proposer(RemoteProposerConfig{}), BackendError);
}

TEST_CASE("environment variables configure the remote endpoint") {
  setenv("DSCHED_PROPOSER_URL", "http://example.test/propose", 1);
  setenv("DSCHED_PROPOSER_TOKEN", "tok", 1);
  setenv("DSCHED_PROPOSER_TIMEOUT", "30", 1);
  RemoteProposerConfig c = remote_config_from_env();
  CHECK(c.url == "http://example.test/propose");
  CHECK(c.token == "tok");
  CHECK(c.timeout_seconds == 30.0);

  setenv("DSCHED_PROPOSER_TIMEOUT", "garbage", 1);
  CHECK(remote_config_from_env().timeout_seconds == 120.0);

  unsetenv("DSCHED_PROPOSER_URL");
  unsetenv("DSCHED_PROPOSER_TOKEN");
  unsetenv("DSCHED_PROPOSER_TIMEOUT");
  RemoteProposerConfig d = remote_config_from_env();
  CHECK(d.url.empty());
  CHECK(d.timeout_seconds == 120.0);
}
