// Copyright 2026 The mimpc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIMPC_BENCHMARK_HPP_
#define MIMPC_BENCHMARK_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mimpc/mimpc_loop.hpp"

namespace mimpc {

enum class BenchSuiteKind { kSatellite, kRandom };

struct BenchSuite {
  BenchSuiteKind kind = BenchSuiteKind::kSatellite;
  std::vector<int> horizons = {2, 4, 6, 8};
  int steps = 50;
  std::uint64_t seed = 1;  // random suite only
};

struct BenchConfig {
  std::string name;
  LoopConfig loop;
};

struct BenchRow {
  std::string suite;
  int horizon = 0;
  std::string config;
  int rep = 0;
  int steps = 0;
  double mean_ms = 0.0;
  double max_ms = 0.0;
  long total_nodes = 0;
  int max_nodes = 0;
  long qp_solves = 0;
  long qp_iterations = 0;
  int infeasible_steps = 0;
};

const char* ToString(BenchSuiteKind kind);

// The closed-loop problem and plant of one benchmark cell.
struct BenchCase {
  OcpMiqp problem;
  PlantModel plant;
};
BenchCase MakeBenchCase(const BenchSuite& suite, int horizon);

// Runs a closed-loop simulation for every horizon, config and repetition.
// When `problem_dir` is non-empty each generated problem is written there as
// <suite>_N<horizon>.json. Throws std::invalid_argument for no configs or
// fewer than one repetition.
std::vector<BenchRow> RunBenchmark(const BenchSuite& suite, const std::vector<BenchConfig>& configs,
                                   int repetitions, const std::string& problem_dir = "");

// Columns: suite,N,config,rep,steps,mean_ms,max_ms,total_nodes,max_nodes,
// qp_solves,qp_iterations,infeasible_steps.
void WriteBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace mimpc

#endif  // MIMPC_BENCHMARK_HPP_
