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

#include "mimpc/mimpc_loop.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "mimpc/tree_propagation.hpp"

namespace mimpc {

PlantModel PlantModel::FromStage(const Stage& stage) {
  PlantModel p;
  p.nx = static_cast<int>(stage.state_matrix.rows());
  p.step = [a = stage.state_matrix, b = stage.input_matrix, c = stage.offset](
               const VectorXd& x, const VectorXd& u) -> VectorXd { return a * x + b * u + c; };
  return p;
}

long ClosedLoopTrace::total_nodes() const {
  long n = 0;
  for (const StepRecord& s : steps) n += s.stats.nodes;
  return n;
}

long ClosedLoopTrace::total_qp_solves() const {
  long n = 0;
  for (const StepRecord& s : steps) n += s.stats.qp_solves;
  return n;
}

ClosedLoopTrace RunClosedLoop(const OcpMiqp& prob, const PlantModel& plant,
                              const VectorXd& initial_state, int steps, const LoopConfig& config) {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (plant.nx != prob.nx || !plant.step) throw std::invalid_argument("plant does not match problem");
  if (initial_state.size() != prob.nx) throw std::invalid_argument("initial state size mismatch");
  const Condenser condenser(prob);  // validates

  ClosedLoopTrace trace;
  VectorXd x = initial_state;
  std::optional<WarmStart> warm;
  std::optional<VectorXd> plan;  // last applied control sequence

  for (int t = 0; t < steps; ++t) {
    const auto start = std::chrono::steady_clock::now();
    auto qp = std::make_shared<const CondensedQp>(condenser.Condense(x));
    MiqpResult res = SolveMiqp(qp, config.warm_start && warm ? &*warm : nullptr, config.solver);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    StepRecord rec;
    rec.step = t;
    rec.state = x;
    rec.stats = res.stats;
    rec.wall_ms = ms;
    if (res.solution) {
      rec.input = res.solution->controls.col(0);
      rec.objective = res.solution->objective;
      rec.lower_bound = res.stats.lower_bound;
      rec.upper_bound = res.stats.upper_bound;
      plan = *res.artifacts.incumbent;
      if (config.warm_start) {
        warm = WarmStart{ShiftPath(res.artifacts.warm_path(prob.nu, prob.horizon())),
                         ShiftPseudoCosts(res.artifacts.pseudo_costs, config.pseudo_cost_decay)};
      }
    } else {
      const std::string why = std::string("step ") + std::to_string(t) + ": " +
                              ToString(res.stats.termination) + " without a feasible solution";
      if (config.policy == InfeasiblePolicy::kAbort || !plan) {
        trace.steps.push_back(std::move(rec));
        trace.aborted = true;
        trace.diagnostic = why;
        trace.final_state = x;
        return trace;
      }
      plan = ShiftControls(*plan, prob.nu, &qp->var_lower, &qp->var_upper);
      rec.input = plan->head(prob.nu);
      rec.objective = std::numeric_limits<double>::quiet_NaN();
      rec.lower_bound = rec.upper_bound = rec.objective;
      rec.held = true;
      warm.reset();
    }
    x = plant.step(x, rec.input);
    trace.steps.push_back(std::move(rec));
  }
  trace.final_state = x;
  return trace;
}

void WriteTraceCsv(std::ostream& out, const ClosedLoopTrace& trace) {
  const int nu = trace.steps.empty() ? 0 : static_cast<int>(trace.steps.front().input.size());
  const int nx = trace.steps.empty() ? 0 : static_cast<int>(trace.steps.front().state.size());
  out << "step,time_ms,nodes,qp_iters,objective,LB,UB";
  for (int i = 0; i < nu; ++i) out << ",u0_" << i;
  for (int i = 0; i < nx; ++i) out << ",x_" << i;
  out << "\n";
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  for (const StepRecord& s : trace.steps) {
    out << s.step << "," << s.wall_ms << "," << s.stats.nodes << "," << s.stats.qp_iterations
        << "," << s.objective << "," << s.lower_bound << "," << s.upper_bound;
    for (int i = 0; i < nu; ++i) out << "," << (i < s.input.size() ? s.input[i] : std::nan(""));
    for (int i = 0; i < nx; ++i) out << "," << s.state[i];
    out << "\n";
  }
  out.precision(old_precision);
}

}  // namespace mimpc
