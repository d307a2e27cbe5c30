#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsched/delib/validator.hpp"
#include "dsched/reactive/window.hpp"
#include "dsched/repo/repository.hpp"
#include "dsched/rules/ast.hpp"

namespace dsched {

// Planner output: a short strategy for the synthesizer.
struct Directive {
  std::string strategy;  // non-empty
  std::vector<Feature> target_features;
  int bottleneck = -1;
};

struct ReflectorNote {
  std::string text;
  bool keep_going = false;  // reflector wants another iteration
};

// Backend unreachable / misbehaving; the cycle maps this to backend_error.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The agentic trio. synthesize() output is plain rule-language text and is
// never trusted: the cycle revalidates it before any use.
class ProposerBackend {
 public:
  virtual ~ProposerBackend() = default;
  virtual Directive plan(const SummaryProfile& profile) = 0;
  virtual std::string synthesize(const Directive& directive, const std::string& current_rule,
                                 const std::vector<RepoEntry>& retrieved) = 0;
  virtual ReflectorNote reflect(const ValidationReport& report, const std::string& candidate) = 0;
};

// Deterministic offline stand-in: templated directives, seeded structural
// mutations of the incumbent (feature swap, min/max wrap, subterm negation,
// splice from a retrieved rule), reflect keeps going while rejected.
std::unique_ptr<ProposerBackend> mock_proposer(std::uint64_t seed);

struct RemoteProposerConfig {
  std::string url;               // e.g. http://host:8080/propose
  std::string token;             // optional bearer credential
  double timeout_seconds = 120.0;
};

// Reads DSCHED_PROPOSER_URL / DSCHED_PROPOSER_TOKEN / DSCHED_PROPOSER_TIMEOUT.
// Empty url means not configured.
RemoteProposerConfig remote_config_from_env();

// HTTP backend speaking the wire protocol (POST JSON per phase). Throws
// BackendError on timeout or protocol violation.
std::unique_ptr<ProposerBackend> remote_proposer(const RemoteProposerConfig& config);

}  // namespace dsched
