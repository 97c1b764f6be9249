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

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <stdexcept>

#include "mimpc/problem_io.hpp"
#include "mimpc/scenarios.hpp"

namespace mimpc {

const char* ToString(BenchSuiteKind kind) {
  return kind == BenchSuiteKind::kSatellite ? "satellite" : "random";
}

BenchCase MakeBenchCase(const BenchSuite& suite, int horizon) {
  if (suite.kind == BenchSuiteKind::kSatellite) {
    SatelliteConfig cfg;
    cfg.horizon = horizon;
    SatelliteScenario sc = MakeSatellite(cfg);
    return {std::move(sc.problem), std::move(sc.plant)};
  }
  RandomFamilyConfig cfg;
  cfg.nx = 3;
  cfg.nu = 3;
  cfg.binaries_per_stage = 2;
  cfg.horizon = horizon;
  cfg.rows_per_stage = 2;
  cfg.terminal_rows = 0;
  cfg.time_invariant = true;
  cfg.seed = suite.seed;
  OcpMiqp prob = MakeRandomHybrid(cfg);
  PlantModel plant = PlantModel::FromStage(prob.stages.front());
  return {std::move(prob), std::move(plant)};
}

std::vector<BenchRow> RunBenchmark(const BenchSuite& suite, const std::vector<BenchConfig>& configs,
                                   int repetitions, const std::string& problem_dir) {
  if (configs.empty()) throw std::invalid_argument("benchmark needs at least one config");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  std::vector<BenchRow> rows;
  if (!problem_dir.empty()) std::filesystem::create_directories(problem_dir);
  for (int horizon : suite.horizons) {
    const BenchCase bc = MakeBenchCase(suite, horizon);
    if (!problem_dir.empty()) {
      WriteProblem(problem_dir + "/" + ToString(suite.kind) + "_N" + std::to_string(horizon) +
                       ".json",
                   bc.problem);
    }
    for (const BenchConfig& cfg : configs) {
      for (int rep = 0; rep < repetitions; ++rep) {
        const ClosedLoopTrace trace =
            RunClosedLoop(bc.problem, bc.plant, bc.problem.initial_state, suite.steps, cfg.loop);
        BenchRow row;
        row.suite = ToString(suite.kind);
        row.horizon = horizon;
        row.config = cfg.name;
        row.rep = rep;
        row.steps = static_cast<int>(trace.steps.size());
        for (const StepRecord& s : trace.steps) {
          row.mean_ms += s.wall_ms;
          row.max_ms = std::max(row.max_ms, s.wall_ms);
          row.total_nodes += s.stats.nodes;
          row.max_nodes = std::max(row.max_nodes, s.stats.nodes);
          row.qp_solves += s.stats.qp_solves;
          row.qp_iterations += s.stats.qp_iterations;
          if (s.held || s.input.size() == 0) ++row.infeasible_steps;
        }
        if (row.steps > 0) row.mean_ms /= row.steps;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void WriteBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "suite,N,config,rep,steps,mean_ms,max_ms,total_nodes,max_nodes,qp_solves,"
         "qp_iterations,infeasible_steps\n";
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::fixed << std::setprecision(3);
  for (const BenchRow& r : rows) {
    out << r.suite << "," << r.horizon << "," << r.config << "," << r.rep << "," << r.steps << ","
        << r.mean_ms << "," << r.max_ms << "," << r.total_nodes << "," << r.max_nodes << ","
        << r.qp_solves << "," << r.qp_iterations << "," << r.infeasible_steps << "\n";
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace mimpc
