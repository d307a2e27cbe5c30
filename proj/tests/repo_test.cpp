#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsched/repo/repository.hpp"
#include "dsched/util/rng.hpp"

using namespace dsched;

namespace {

RepoEntry make_entry(int jobs, int machines, const std::string& rule, double value,
                     int complexity) {
  RepoEntry e;
  e.meta = MetaFeatures{jobs, machines};
  e.rule_source = rule;
  e.value = value;
  e.complexity = complexity;
  e.benchmark = "test";
  e.timestamp = "2025-01-01T00:00:00Z";
  e.version = 1;
  return e;
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "dsched_repo_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("meta distance normalizes by the query topology") {
  MetaFeatures q{10, 4};
  CHECK(meta_distance(q, MetaFeatures{10, 4}) == 0.0);
  CHECK(meta_distance(q, MetaFeatures{5, 4}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(meta_distance(q, MetaFeatures{20, 2}) == doctest::Approx(1.5).epsilon(1e-12));
  // Not symmetric: the query side supplies the denominators.
  CHECK(meta_distance(MetaFeatures{5, 4}, q) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("meta distance rejects degenerate queries") {
  CHECK_THROWS_AS(meta_distance(MetaFeatures{0, 4}, MetaFeatures{1, 1}), DomainError);
  CHECK_THROWS_AS(meta_distance(MetaFeatures{10, 0}, MetaFeatures{1, 1}), DomainError);
}

TEST_CASE("retrieval score matches the hand-computed fixture") {
  RetrievalConfig config;  // 0.5, 0.05, 0.05
  MetaFeatures q{10, 4};

  // D = 0.1, no match bonus: S = 0.2 - 0.5*0.1 - 0.05*ln(8).
  RepoEntry e = make_entry(9, 4, "clock", 0.2, 7);
  double expected = 0.2 - 0.05 - 0.05 * std::log(8.0);
  CHECK(retrieval_score(e, q, config) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(retrieval_score(e, q, config) == doctest::Approx(0.046027922916008216).epsilon(1e-12));

  // Exact topology match earns the bonus; ln(1+0) contributes nothing.
  RepoEntry exact = make_entry(10, 4, "clock", 0.05, 0);
  CHECK(retrieval_score(exact, q, config) == doctest::Approx(0.1).epsilon(1e-12));

  // All weights zero: score degenerates to the stored value.
  RetrievalConfig flat{0.0, 0.0, 0.0, 3};
  RepoEntry far = make_entry(1, 1, "clock", 0.37, 99);
  CHECK(retrieval_score(far, q, flat) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("retrieve returns top-k by score, descending") {
  RuleRepository repo;
  MetaFeatures q{10, 5};
  repo.insert(make_entry(10, 5, "clock", 0.10, 5));
  repo.insert(make_entry(10, 5, "op_proc_time", 0.20, 5));
  repo.insert(make_entry(5, 5, "job_wait_time", 0.30, 5));
  repo.insert(make_entry(10, 10, "machine_workload", 0.18, 0));
  repo.insert(make_entry(10, 5, "job_remaining_work", 0.12, 3));

  RetrievalConfig config;
  config.k = 2;
  auto top = repo.retrieve(q, config);
  REQUIRE(top.size() == 2);
  CHECK(top[0].rule_source == "op_proc_time");      // 0.25 - 0.05*ln(6)
  CHECK(top[1].rule_source == "job_remaining_work");  // 0.17 - 0.05*ln(4)
  CHECK(retrieval_score(top[0], q, config) > retrieval_score(top[1], q, config));
}

TEST_CASE("retrieve keeps insertion order on score ties") {
  RuleRepository repo;
  repo.insert(make_entry(4, 2, "clock + 0", 0.1, 1));
  repo.insert(make_entry(4, 2, "clock + 1", 0.1, 1));
  repo.insert(make_entry(4, 2, "clock + 2", 0.1, 1));
  auto top = repo.retrieve(MetaFeatures{4, 2}, RetrievalConfig{});
  REQUIRE(top.size() == 3);
  CHECK(top[0].rule_source == "clock + 0");
  CHECK(top[1].rule_source == "clock + 1");
  CHECK(top[2].rule_source == "clock + 2");
}

TEST_CASE("retrieve on an empty repository yields nothing") {
  RuleRepository repo;
  CHECK(repo.retrieve(MetaFeatures{3, 3}, RetrievalConfig{}).empty());
}

TEST_CASE("retrieve clamps k below one and truncates above size") {
  RuleRepository repo;
  repo.insert(make_entry(3, 3, "clock", 0.2, 0));
  repo.insert(make_entry(3, 3, "op_index", 0.1, 0));

  RetrievalConfig config;
  config.k = 0;
  CHECK(repo.retrieve(MetaFeatures{3, 3}, config).size() == 1);
  config.k = 10;
  CHECK(repo.retrieve(MetaFeatures{3, 3}, config).size() == 2);
}

TEST_CASE("persist then load round-trips every field") {
  auto path = temp_file("roundtrip.jsonl");
  std::filesystem::remove(path);

  RuleRepository repo;
  RepoEntry a = make_entry(10, 4, "-op_proc_time", 0.046027922916008216, 1);
  a.benchmark = "suite alpha";
  a.timestamp = "2025-03-14T09:26:53Z";
  a.version = 42;
  RepoEntry b = make_entry(6, 3, "if(machine_queue_len > 2, -op_proc_time, -job_remaining_work)",
                           1e-9, 5);
  RepoEntry c = make_entry(2, 2, "min(op_proc_time, job_remaining_work) / 2", -0.25, 2);
  repo.insert(a);
  repo.insert(b);
  repo.insert(c);
  repo.persist(path.string());

  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  auto loaded = RuleRepository::load(path.string());
  CHECK(loaded.dropped == 0);
  auto entries = loaded.repo.entries();
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].meta.n_jobs == 10);
  CHECK(entries[0].meta.n_machines == 4);
  CHECK(entries[0].rule_source == "-op_proc_time");
  CHECK(entries[0].value == 0.046027922916008216);
  CHECK(entries[0].complexity == 1);
  CHECK(entries[0].benchmark == "suite alpha");
  CHECK(entries[0].timestamp == "2025-03-14T09:26:53Z");
  CHECK(entries[0].version == 42);
  CHECK(entries[1].rule_source == b.rule_source);
  CHECK(entries[1].value == 1e-9);
  CHECK(entries[2].value == -0.25);
  std::filesystem::remove(path);
}

TEST_CASE("load drops corrupt and no-longer-valid lines, keeps the rest") {
  auto path = temp_file("corrupt.jsonl");
  std::filesystem::remove(path);

  RuleRepository repo;
  repo.insert(make_entry(4, 2, "clock", 0.1, 0));
  repo.insert(make_entry(4, 2, "op_index", 0.2, 0));
  repo.persist(path.string());

  {
    std::ofstream out(path, std::ios::app);
    out << "this is not json\n";
    out << R"({"n_jobs":4,"n_machines":2,"rule":"import os","value":0.1,)"
        << R"("complexity":0,"benchmark":"x","timestamp":"t","version":1})" << "\n";
    out << "\n";  // blank lines are skipped, not dropped
  }

  auto loaded = RuleRepository::load(path.string());
  CHECK(loaded.dropped == 2);
  auto entries = loaded.repo.entries();
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].rule_source == "clock");
  CHECK(entries[1].rule_source == "op_index");
  std::filesystem::remove(path);
}

TEST_CASE("missing repository file is a cold start") {
  auto loaded = RuleRepository::load("/nonexistent/dir/repo.jsonl");
  CHECK(loaded.repo.size() == 0);
  CHECK(loaded.dropped == 0);
}

TEST_CASE("empty repository persists to an empty, loadable file") {
  auto path = temp_file("empty.jsonl");
  std::filesystem::remove(path);
  RuleRepository repo;
  repo.persist(path.string());
  REQUIRE(std::filesystem::exists(path));
  CHECK(std::filesystem::file_size(path) == 0);
  auto loaded = RuleRepository::load(path.string());
  CHECK(loaded.repo.size() == 0);
  std::filesystem::remove(path);
}

TEST_CASE("property: score is strictly monotone in value, distance, complexity") {
  RetrievalConfig config;
  MetaFeatures q{10, 5};

  double prev = retrieval_score(make_entry(10, 5, "clock", -1.0, 3), q, config);
  for (int i = 1; i <= 20; ++i) {
    double s = retrieval_score(make_entry(10, 5, "clock", -1.0 + 0.1 * i, 3), q, config);
    CHECK(s > prev);
    prev = s;
  }

  // Distance: leaving D = 0 also forfeits the match bonus.
  prev = retrieval_score(make_entry(10, 5, "clock", 0.2, 3), q, config);
  for (int jobs = 11; jobs <= 30; ++jobs) {
    double s = retrieval_score(make_entry(jobs, 5, "clock", 0.2, 3), q, config);
    CHECK(s < prev);
    prev = s;
  }

  prev = retrieval_score(make_entry(10, 5, "clock", 0.2, 0), q, config);
  for (int c = 1; c <= 20; ++c) {
    double s = retrieval_score(make_entry(10, 5, "clock", 0.2, c), q, config);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("property: retrieval is deterministic and persistence is faithful") {
  const std::vector<std::string> sources = {
      "clock", "-op_proc_time", "job_remaining_work - op_proc_time",
      "if(machine_queue_len > 2, -op_proc_time, -job_remaining_work)",
      "min(op_proc_time, 3.5) * machine_workload"};
  Rng rng(2024);
  RuleRepository repo;
  for (int i = 0; i < 25; ++i) {
    RepoEntry e = make_entry(rng.uniform_int(1, 30), rng.uniform_int(1, 12),
                             sources[static_cast<std::size_t>(rng.uniform_int(0, 4))],
                             rng.uniform_real(-1.0, 1.0), rng.uniform_int(0, 40));
    e.version = static_cast<std::uint64_t>(i + 1);
    repo.insert(e);
  }

  MetaFeatures q{8, 4};
  RetrievalConfig config;
  config.k = 7;
  auto first = repo.retrieve(q, config);
  auto second = repo.retrieve(q, config);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].rule_source == second[i].rule_source);
    CHECK(first[i].value == second[i].value);
  }
  for (std::size_t i = 1; i < first.size(); ++i)
    CHECK(retrieval_score(first[i - 1], q, config) >= retrieval_score(first[i], q, config));

  auto path = temp_file("property.jsonl");
  std::filesystem::remove(path);
  repo.persist(path.string());
  auto loaded = RuleRepository::load(path.string());
  CHECK(loaded.dropped == 0);
  auto before = repo.entries();
  auto after = loaded.repo.entries();
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].meta.n_jobs == after[i].meta.n_jobs);
    CHECK(before[i].meta.n_machines == after[i].meta.n_machines);
    CHECK(before[i].rule_source == after[i].rule_source);
    CHECK(before[i].value == after[i].value);  // exact: dumper is round-trip safe
    CHECK(before[i].complexity == after[i].complexity);
    CHECK(before[i].version == after[i].version);
  }
  std::filesystem::remove(path);
}
