#include "dsched/core/generator.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dsched/util/rng.hpp"

namespace dsched {

void GeneratorParams::validate() const {
  if (n_jobs < 1 || n_machines < 1) throw DomainError("generator needs jobs and machines");
  if (min_ops < 1 || min_ops > max_ops) throw DomainError("empty ops_per_job range");
  if (min_flex < 1 || min_flex > max_flex) throw DomainError("empty flexibility range");
  if (max_flex > n_machines)
    throw DomainError("flexibility upper bound exceeds machine count");
  if (min_time < 1 || min_time > max_time) throw DomainError("empty or non-positive time range");
}

Instance generate_instance(const GeneratorParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed ^ 0xd1f5c0ffee1234ULL);

  Instance instance;
  instance.machine_count = params.n_machines;
  std::ostringstream name;
  name << "gen-j" << params.n_jobs << "-m" << params.n_machines << "-s" << seed;
  instance.name = name.str();

  std::vector<int> machine_ids(static_cast<std::size_t>(params.n_machines));
  std::iota(machine_ids.begin(), machine_ids.end(), 0);

  for (int i = 0; i < params.n_jobs; ++i) {
    Job job;
    job.id = i;
    int n_ops = rng.uniform_int(params.min_ops, params.max_ops);
    for (int j = 0; j < n_ops; ++j) {
      Operation op;
      op.job_id = i;
      op.op_index = j;
      int flex = rng.uniform_int(params.min_flex, params.max_flex);
      rng.shuffle(machine_ids);
      for (int k = 0; k < flex; ++k) {
        Time t = static_cast<Time>(rng.uniform_int(params.min_time, params.max_time));
        op.alternatives.emplace_back(machine_ids[static_cast<std::size_t>(k)], t);
      }
      std::sort(op.alternatives.begin(), op.alternatives.end());
      job.operations.push_back(std::move(op));
    }
    instance.jobs.push_back(std::move(job));
  }

  instance.validate();
  return instance;
}

}  // namespace dsched
