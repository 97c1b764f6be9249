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

#include "mimpc/oracle.hpp"

#include <memory>
#include <stdexcept>

#include "mimpc/qp_solver.hpp"

namespace mimpc {

OracleResult BruteForceOracle(const CondensedQp& qp) {
  const int nb = static_cast<int>(qp.binaries.size());
  if (nb > kOracleMaxBinaries) {
    throw std::invalid_argument("oracle refuses " + std::to_string(nb) + " binaries (limit " +
                                std::to_string(kOracleMaxBinaries) + ")");
  }
  auto shared = std::make_shared<const CondensedQp>(qp);
  const QpSolver solver(shared);
  const QpInstance root(shared);
  QpOptions opt;
  opt.max_iterations = 100 * solver.default_max_iterations();

  OracleResult out;
  std::vector<BoundOverride> fix(nb);
  for (long mask = 0; mask < (1L << nb); ++mask) {
    ++out.assignments;
    bool possible = true;
    for (int k = 0; k < nb; ++k) {
      const int j = qp.binaries[k];
      const double v = (mask >> k) & 1L ? 1.0 : 0.0;
      if (v < root.lower()[j] || v > root.upper()[j]) possible = false;
      fix[k] = {j, v, v};
    }
    if (!possible) continue;
    const QpResult res = solver.Solve(UpdateBounds(root, fix), {}, opt);
    if (res.status == QpStatus::kIterationLimit) {
      throw std::runtime_error("oracle QP hit its iteration limit");
    }
    if (res.status != QpStatus::kOptimal) continue;
    ++out.feasible_assignments;
    VectorXd u = res.solution;
    for (const BoundOverride& f : fix) u[f.var] = f.lower;
    const double obj = qp.Objective(u) + qp.constant;
    if (!out.feasible || obj < out.objective) {
      out.feasible = true;
      out.objective = obj;
      out.controls = u;
    }
  }
  return out;
}

OracleResult BruteForceOracle(const OcpMiqp& prob, const VectorXd& initial_state) {
  return BruteForceOracle(Condense(prob, initial_state));
}

}  // namespace mimpc
