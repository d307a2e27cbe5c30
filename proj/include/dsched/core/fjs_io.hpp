#pragma once

#include <string>

#include "dsched/core/disturbance.hpp"
#include "dsched/core/types.hpp"

namespace dsched {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Flexible-job-shop text format. Line 1: `n_jobs n_machines [avg_flex]`
// (third field ignored). One line per job: `n_ops` then, per operation,
// `n_alts` followed by n_alts pairs of `machine_id proc_time` with 1-based
// machine ids. Machine ids are converted to 0-based internally.
Instance parse_fjs(const std::string& text, const std::string& name = "");
Instance load_fjs_file(const std::string& path);
std::string write_fjs(const Instance& instance);

// Disturbance script: one record per line.
//   arrival <time> <n_ops> { <n_alts> { <machine_id> <proc_time> }... }...
//   fail <time> <machine_id> <duration>
//   recover <time> <machine_id>
// Machine ids 1-based, blank lines and `#` comments ignored.
DisturbanceScript parse_disturbances(const std::string& text, int machine_count);
DisturbanceScript load_disturbance_file(const std::string& path, int machine_count);
std::string write_disturbances(const DisturbanceScript& script);

}  // namespace dsched
