#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "dsched/core/types.hpp"

namespace dsched {

// Global problem topology an entry was earned on.
struct MetaFeatures {
  int n_jobs = 1;
  int n_machines = 1;
};

// D = |ΔN_j|/N_j_new + |ΔN_m|/N_m_new, dimensionless. Requires new fields >= 1.
double meta_distance(const MetaFeatures& m_new, const MetaFeatures& m_i);

struct RepoEntry {
  MetaFeatures meta;
  std::string rule_source;  // canonical rule text
  double value = 0.0;       // normalized improvement r_t at acceptance
  int complexity = 0;       // complexity score C_i
  std::string benchmark;    // provenance
  std::string timestamp;    // provenance, ISO 8601
  std::uint64_t version = 0;  // rule version at acceptance
};

struct RetrievalConfig {
  double lambda1 = 0.5;     // distance weight
  double lambda2 = 0.05;    // complexity weight
  double delta_match = 0.05;  // bonus iff D = 0
  int k = 3;
};

// S = v - lambda1*D - lambda2*ln(1 + C) + (delta_match iff D = 0).
double retrieval_score(const RepoEntry& entry, const MetaFeatures& m_new,
                       const RetrievalConfig& config);

struct RepoLoadResult;

// Indexed store of validated rules. Single writer (the deliberative worker);
// readers get consistent snapshot copies.
class RuleRepository {
 public:
  RuleRepository() = default;
  RuleRepository(const RuleRepository& other) : entries_(other.entries()) {}
  RuleRepository& operator=(const RuleRepository& other);

  void insert(RepoEntry entry);
  std::size_t size() const;
  std::vector<RepoEntry> entries() const;  // snapshot, insertion order

  // Top-k by score, descending; ties keep insertion order. Empty repo -> [].
  std::vector<RepoEntry> retrieve(const MetaFeatures& m_new, const RetrievalConfig& config) const;

  // Newline-delimited JSON records; atomic via write-then-rename.
  void persist(const std::string& path) const;

  // Throws DomainError when the file cannot be read. A missing file is an
  // empty repository (cold start).
  static RepoLoadResult load(const std::string& path);

 private:
  mutable std::mutex mu_;
  std::vector<RepoEntry> entries_;
};

struct RepoLoadResult {
  RuleRepository repo;
  int dropped = 0;  // corrupt or no-longer-parsing records skipped
};

}  // namespace dsched
