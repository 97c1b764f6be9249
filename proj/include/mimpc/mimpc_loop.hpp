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

#ifndef MIMPC_MIMPC_LOOP_HPP_
#define MIMPC_MIMPC_LOOP_HPP_

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "mimpc/bnb.hpp"
#include "mimpc/ocp_model.hpp"

namespace mimpc {

// System driven by the controller. Defaults to the stage-0 prediction model.
struct PlantModel {
  int nx = 0;
  std::function<VectorXd(const VectorXd& x, const VectorXd& u)> step;

  static PlantModel FromStage(const Stage& stage);
};

enum class InfeasiblePolicy {
  kAbort,        // stop the run and report
  kHoldShifted,  // apply the previous plan shifted by one stage
};

struct LoopConfig {
  SolverConfig solver;
  bool warm_start = true;
  InfeasiblePolicy policy = InfeasiblePolicy::kAbort;
  int pseudo_cost_decay = 1;
};

struct StepRecord {
  int step = 0;
  VectorXd state;  // state at the start of the step
  VectorXd input;  // applied input
  double objective = 0.0;
  double lower_bound = -kInf;
  double upper_bound = kInf;
  SolveStats stats;
  double wall_ms = 0.0;  // condensing plus solve
  bool held = false;     // input taken from the previous plan
};

struct ClosedLoopTrace {
  std::vector<StepRecord> steps;
  VectorXd final_state;
  bool aborted = false;
  std::string diagnostic;

  long total_nodes() const;
  long total_qp_solves() const;
};

// Receding-horizon loop: condense at the current state, solve the MIQP with
// the shifted path and pseudo-costs of the previous step, apply the first
// input and advance the plant.
ClosedLoopTrace RunClosedLoop(const OcpMiqp& prob, const PlantModel& plant,
                              const VectorXd& initial_state, int steps, const LoopConfig& config);

// Columns: step,time_ms,nodes,qp_iters,objective,LB,UB,u0_0..u0_{nu-1},
// x_0..x_{nx-1}. Held steps report nan for objective and bounds.
void WriteTraceCsv(std::ostream& out, const ClosedLoopTrace& trace);

}  // namespace mimpc

#endif  // MIMPC_MIMPC_LOOP_HPP_
