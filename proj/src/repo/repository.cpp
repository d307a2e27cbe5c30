#include "dsched/repo/repository.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dsched/rules/engine.hpp"

namespace dsched {

double meta_distance(const MetaFeatures& m_new, const MetaFeatures& m_i) {
  if (m_new.n_jobs < 1 || m_new.n_machines < 1)
    throw DomainError("meta features of the query must be >= 1");
  return std::abs(m_new.n_jobs - m_i.n_jobs) / static_cast<double>(m_new.n_jobs) +
         std::abs(m_new.n_machines - m_i.n_machines) / static_cast<double>(m_new.n_machines);
}

double retrieval_score(const RepoEntry& entry, const MetaFeatures& m_new,
                       const RetrievalConfig& config) {
  double d = meta_distance(m_new, entry.meta);
  double s = entry.value - config.lambda1 * d -
             config.lambda2 * std::log(1.0 + static_cast<double>(entry.complexity));
  if (d == 0.0) s += config.delta_match;
  return s;
}

RuleRepository& RuleRepository::operator=(const RuleRepository& other) {
  if (this != &other) {
    auto copy = other.entries();
    std::lock_guard<std::mutex> lock(mu_);
    entries_ = std::move(copy);
  }
  return *this;
}

void RuleRepository::insert(RepoEntry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back(std::move(entry));
}

std::size_t RuleRepository::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::vector<RepoEntry> RuleRepository::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

std::vector<RepoEntry> RuleRepository::retrieve(const MetaFeatures& m_new,
                                                const RetrievalConfig& config) const {
  auto snapshot = entries();
  std::vector<std::size_t> order(snapshot.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> scores(snapshot.size());
  for (std::size_t i = 0; i < snapshot.size(); ++i)
    scores[i] = retrieval_score(snapshot[i], m_new, config);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RepoEntry> out;
  std::size_t k = config.k < 1 ? 1 : static_cast<std::size_t>(config.k);
  for (std::size_t i = 0; i < order.size() && i < k; ++i)
    out.push_back(std::move(snapshot[order[i]]));
  return out;
}

namespace {

nlohmann::json to_json(const RepoEntry& e) {
  return nlohmann::json{{"n_jobs", e.meta.n_jobs},     {"n_machines", e.meta.n_machines},
                        {"rule", e.rule_source},       {"value", e.value},
                        {"complexity", e.complexity},  {"benchmark", e.benchmark},
                        {"timestamp", e.timestamp},    {"version", e.version}};
}

}  // namespace

void RuleRepository::persist(const std::string& path) const {
  auto snapshot = entries();
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DomainError("cannot write repository file: " + tmp);
    for (const auto& e : snapshot) out << to_json(e).dump() << '\n';
    out.flush();
    if (!out) throw DomainError("short write to repository file: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DomainError("cannot replace repository file " + path + ": " + ec.message());
}

RepoLoadResult RuleRepository::load(const std::string& path) {
  RepoLoadResult result;
  if (!std::filesystem::exists(path)) return result;  // cold start
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read repository file: " + path);

  RuleValidator validator;  // load-time re-validation of stored rule text
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      RepoEntry e;
      e.meta.n_jobs = j.at("n_jobs").get<int>();
      e.meta.n_machines = j.at("n_machines").get<int>();
      e.rule_source = j.at("rule").get<std::string>();
      e.value = j.at("value").get<double>();
      e.complexity = j.at("complexity").get<int>();
      e.benchmark = j.at("benchmark").get<std::string>();
      e.timestamp = j.at("timestamp").get<std::string>();
      e.version = j.at("version").get<std::uint64_t>();
      if (e.meta.n_jobs < 1 || e.meta.n_machines < 1 || !std::isfinite(e.value))
        throw DomainError("out-of-range fields");
      validator.validate(e.rule_source);
      result.repo.insert(std::move(e));
    } catch (const std::exception&) {
      ++result.dropped;
    }
  }
  return result;
}

}  // namespace dsched
