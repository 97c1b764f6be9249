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

#include "mimpc/benchmark.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "mimpc/problem_io.hpp"

namespace mimpc {
namespace {

std::vector<BenchConfig> WarmCold() {
  std::vector<BenchConfig> out(2);
  out[0].name = "warm";
  out[1].name = "cold";
  out[1].loop.warm_start = false;
  for (BenchConfig& c : out) c.loop.policy = InfeasiblePolicy::kHoldShifted;
  return out;
}

TEST(BenchmarkTest, RowsCoverEveryCellAndRepeatDeterministically) {
  BenchSuite suite;
  suite.kind = BenchSuiteKind::kRandom;
  suite.horizons = {2, 3};
  suite.steps = 4;
  suite.seed = 9;
  const std::vector<BenchRow> rows = RunBenchmark(suite, WarmCold(), 2);
  ASSERT_EQ(rows.size(), 8u);
  for (const BenchRow& r : rows) {
    EXPECT_EQ(r.suite, "random");
    EXPECT_GE(r.steps, 1);
    EXPECT_LE(r.steps, 4);
    EXPECT_GE(r.max_ms, r.mean_ms);
  }
  // Repetitions differ only in timing.
  for (size_t i = 0; i + 1 < rows.size(); i += 2) {
    EXPECT_EQ(rows[i].horizon, rows[i + 1].horizon);
    EXPECT_EQ(rows[i].config, rows[i + 1].config);
    EXPECT_NE(rows[i].rep, rows[i + 1].rep);
    EXPECT_EQ(rows[i].total_nodes, rows[i + 1].total_nodes);
    EXPECT_EQ(rows[i].qp_iterations, rows[i + 1].qp_iterations);
  }
}

TEST(BenchmarkTest, WritesProblemFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "mimpc_bench_test";
  std::filesystem::remove_all(dir);
  BenchSuite suite;
  suite.horizons = {2};
  suite.steps = 2;
  RunBenchmark(suite, WarmCold(), 1, dir.string());
  const auto file = dir / "satellite_N2.json";
  ASSERT_TRUE(std::filesystem::exists(file));
  const OcpMiqp p = ReadProblem(file.string());
  EXPECT_EQ(p.horizon(), 2);
  EXPECT_EQ(SerializeProblem(p), SerializeProblem(MakeBenchCase(suite, 2).problem));
  std::filesystem::remove_all(dir);
}

TEST(BenchmarkTest, CsvHeader) {
  std::ostringstream os;
  BenchRow r;
  r.suite = "satellite";
  r.config = "warm";
  WriteBenchCsv(os, {r});
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header,
            "suite,N,config,rep,steps,mean_ms,max_ms,total_nodes,max_nodes,qp_solves,"
            "qp_iterations,infeasible_steps");
  EXPECT_EQ(row.rfind("satellite,0,warm,0,", 0), 0u);
}

TEST(BenchmarkTest, RejectsEmptyConfigs) {
  EXPECT_THROW(RunBenchmark(BenchSuite{}, {}, 1), std::invalid_argument);
}

}  // namespace
}  // namespace mimpc
