#pragma once

#include <cstdint>

#include "dsched/core/types.hpp"

namespace dsched {

// Parameterized instance synthesis. Processing times are integer-valued so
// that event arithmetic in tests stays exact.
struct GeneratorParams {
  int n_jobs = 5;
  int n_machines = 3;
  int min_ops = 1, max_ops = 3;    // operations per job
  int min_flex = 1, max_flex = 2;  // eligible machines per operation
  int min_time = 1, max_time = 10;

  void validate() const;  // throws DomainError on empty ranges or flex > machines
};

// Deterministic for fixed (params, seed); the result passes Instance::validate().
Instance generate_instance(const GeneratorParams& params, std::uint64_t seed);

}  // namespace dsched
