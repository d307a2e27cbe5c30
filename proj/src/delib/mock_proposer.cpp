#include <algorithm>

#include "dsched/delib/proposer.hpp"
#include "dsched/rules/parser.hpp"
#include "dsched/util/rng.hpp"

namespace dsched {

namespace {

// Collects mutable pointers to every node, depth-first.
void collect(RuleExpr& e, std::vector<RuleExpr*>& out) {
  out.push_back(&e);
  for (auto& kid : e.kids) collect(*kid, out);
}

RuleExpr make_feature(Feature f) {
  RuleExpr e;
  e.kind = NodeKind::feature;
  e.feature = f;
  return e;
}

class MockProposer final : public ProposerBackend {
 public:
  explicit MockProposer(std::uint64_t seed) : rng_(seed) {}

  Directive plan(const SummaryProfile& profile) override {
    Directive d;
    d.bottleneck = profile.bottleneck_machine;
    d.target_features.push_back(pick_feature());
    if (profile.bottleneck_machine >= 0)
      d.strategy = "prioritize short remaining work on bottleneck machine " +
                   std::to_string(profile.bottleneck_machine);
    else
      d.strategy = "reduce mean job wait under objective " + profile.objective;
    return d;
  }

  std::string synthesize(const Directive& directive, const std::string& current_rule,
                         const std::vector<RepoEntry>& retrieved) override {
    (void)directive;
    std::unique_ptr<RuleExpr> incumbent;
    try {
      incumbent = parse_rule(current_rule);
    } catch (const RuleError&) {
      return std::string(feature_name(pick_feature()));
    }

    switch (rng_.uniform_int(0, 3)) {
      case 0: return mutate_swap_feature(*incumbent);
      case 1: return mutate_wrap(*incumbent);
      case 2: return mutate_negate(*incumbent);
      default: return mutate_splice(*incumbent, retrieved);
    }
  }

  ReflectorNote reflect(const ValidationReport& report, const std::string& candidate) override {
    ReflectorNote note;
    note.keep_going = !report.accepted;
    if (report.accepted) {
      note.text = "accepted '" + candidate + "': r=" + std::to_string(report.r_t) +
                  ", d_eff=" + std::to_string(report.d_eff);
    } else if (report.feasibility_failures > 0) {
      note.text = "rejected '" + candidate + "': " +
                  std::to_string(report.feasibility_failures) + " sandbox failures";
    } else {
      note.text = "rejected '" + candidate + "': r=" + std::to_string(report.r_t) +
                  " below thresholds, try another structure";
    }
    return note;
  }

 private:
  Feature pick_feature() { return static_cast<Feature>(rng_.uniform_int(0, kFeatureCount - 1)); }

  Feature pick_feature_other_than(Feature f) {
    auto shifted = (static_cast<std::size_t>(f) + 1 + rng_.uniform_int(0, kFeatureCount - 2)) %
                   kFeatureCount;
    return static_cast<Feature>(shifted);
  }

  // Replaces one feature leaf with a different feature.
  std::string mutate_swap_feature(const RuleExpr& incumbent) {
    auto tree = clone(incumbent);
    std::vector<RuleExpr*> nodes;
    collect(*tree, nodes);
    std::vector<RuleExpr*> leaves;
    for (RuleExpr* n : nodes)
      if (n->kind == NodeKind::feature) leaves.push_back(n);
    if (leaves.empty()) return std::string(feature_name(pick_feature()));
    RuleExpr* leaf = leaves[rng_.uniform_int(0, leaves.size() - 1)];
    leaf->feature = pick_feature_other_than(leaf->feature);
    return pretty_print(*tree);
  }

  // min/max of the incumbent with a fresh feature.
  std::string mutate_wrap(const RuleExpr& incumbent) {
    auto root = std::make_unique<RuleExpr>();
    root->kind = rng_.chance(0.5) ? NodeKind::fn_min : NodeKind::fn_max;
    root->kids.push_back(clone(incumbent));
    root->kids.push_back(std::make_unique<RuleExpr>(make_feature(pick_feature())));
    return pretty_print(*root);
  }

  // Negates one subterm in place.
  std::string mutate_negate(const RuleExpr& incumbent) {
    auto tree = clone(incumbent);
    std::vector<RuleExpr*> nodes;
    collect(*tree, nodes);
    RuleExpr* target = nodes[rng_.uniform_int(0, nodes.size() - 1)];
    auto lifted = std::make_unique<RuleExpr>(std::move(*target));
    target->kind = NodeKind::negate;
    target->value = 0.0;
    target->kids.clear();
    target->kids.push_back(std::move(lifted));
    return pretty_print(*tree);
  }

  // Combines the incumbent with a fragment of a retrieved rule.
  std::string mutate_splice(const RuleExpr& incumbent, const std::vector<RepoEntry>& retrieved) {
    std::unique_ptr<RuleExpr> fragment;
    if (!retrieved.empty()) {
      const RepoEntry& pick = retrieved[rng_.uniform_int(0, retrieved.size() - 1)];
      try {
        auto donor = parse_rule(pick.rule_source);
        std::vector<RuleExpr*> nodes;
        collect(*donor, nodes);
        fragment = clone(*nodes[rng_.uniform_int(0, nodes.size() - 1)]);
      } catch (const RuleError&) {
      }
    }
    if (!fragment) return mutate_swap_feature(incumbent);

    auto root = std::make_unique<RuleExpr>();
    root->kind = rng_.chance(0.5) ? NodeKind::add : NodeKind::fn_max;
    root->kids.push_back(clone(incumbent));
    root->kids.push_back(std::move(fragment));
    return pretty_print(*root);
  }

  Rng rng_;
};

}  // namespace

std::unique_ptr<ProposerBackend> mock_proposer(std::uint64_t seed) {
  return std::make_unique<MockProposer>(seed);
}

}  // namespace dsched
