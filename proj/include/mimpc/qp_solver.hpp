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

#ifndef MIMPC_QP_SOLVER_HPP_
#define MIMPC_QP_SOLVER_HPP_

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "mimpc/ocp_model.hpp"

namespace mimpc {

// Each one-sided inequality of the condensed QP, written as n' U >= b.
enum class ConstraintKind : std::uint8_t {
  kVarLower = 0,
  kVarUpper = 1,
  kRowLower = 2,
  kRowUpper = 3,
};

struct ConstraintId {
  ConstraintKind kind = ConstraintKind::kVarLower;
  int index = 0;

  // Variable bounds come first, then rows; lower before upper.
  std::int64_t order() const {
    const bool row = kind == ConstraintKind::kRowLower || kind == ConstraintKind::kRowUpper;
    const bool upper = kind == ConstraintKind::kVarUpper || kind == ConstraintKind::kRowUpper;
    return (static_cast<std::int64_t>(row) << 40) + 2 * static_cast<std::int64_t>(index) + upper;
  }
  friend bool operator==(const ConstraintId& a, const ConstraintId& b) {
    return a.kind == b.kind && a.index == b.index;
  }
  friend auto operator<=>(const ConstraintId& a, const ConstraintId& b) {
    return a.order() <=> b.order();
  }
};

std::string ToString(ConstraintId id);

// Tightened variable bounds for one index; both sides are always present.
struct BoundOverride {
  int var = 0;
  double lower = -kInf;
  double upper = kInf;
};

// A condensed QP together with node-local variable bounds. The condensed data
// is shared and immutable.
class QpInstance {
 public:
  explicit QpInstance(std::shared_ptr<const CondensedQp> qp);
  QpInstance(std::shared_ptr<const CondensedQp> qp, VectorXd lower, VectorXd upper);

  const CondensedQp& qp() const { return *qp_; }
  const std::shared_ptr<const CondensedQp>& shared_qp() const { return qp_; }
  const VectorXd& lower() const { return lower_; }
  const VectorXd& upper() const { return upper_; }

 private:
  std::shared_ptr<const CondensedQp> qp_;
  VectorXd lower_;
  VectorXd upper_;
};

// Merges overrides into the instance bounds. Throws std::invalid_argument if
// an override would loosen a bound or names an out-of-range variable.
QpInstance UpdateBounds(const QpInstance& inst, const std::vector<BoundOverride>& overrides);

struct WarmStartHint {
  std::optional<VectorXd> primal;
  std::vector<ConstraintId> active_set;
  bool empty() const { return !primal && active_set.empty(); }
};

enum class QpStatus { kOptimal, kInfeasible, kIterationLimit };
const char* ToString(QpStatus status);

// Nonnegative weights y with sum_k y_k n_k = 0 and sum_k y_k b_k > 0, which
// proves that no U satisfies all n_k' U >= b_k.
struct InfeasibilityCertificate {
  std::vector<ConstraintId> constraints;
  std::vector<double> weights;
};

struct QpResult {
  QpStatus status = QpStatus::kInfeasible;
  VectorXd solution;
  // Condensed objective 1/2 U'HU + h'U without the constant term. For
  // kIterationLimit this is the dual value reached, a valid lower bound.
  double objective = kInf;
  std::vector<ConstraintId> active_set;
  std::vector<double> multipliers;
  int iterations = 0;
  std::optional<InfeasibilityCertificate> certificate;
};

struct QpOptions {
  // 0 selects 100 * (num_vars + num_rows).
  int max_iterations = 0;
  double feasibility_tol = 1e-8;
  double dual_tol = 1e-8;
};

// Dual active-set solver (Goldfarb-Idnani) for the strictly convex condensed
// QP. The Cholesky factor of the Hessian is computed once and shared by every
// Solve() call, so one solver serves a whole branch-and-bound tree.
class QpSolver {
 public:
  // Throws std::invalid_argument if the Hessian is not positive definite.
  explicit QpSolver(std::shared_ptr<const CondensedQp> qp);

  QpResult Solve(const QpInstance& inst, const WarmStartHint& hint = {},
                 const QpOptions& options = {}) const;

  const CondensedQp& qp() const { return *qp_; }
  const std::shared_ptr<const CondensedQp>& shared_qp() const { return qp_; }
  int default_max_iterations() const;

  // n' U and the right-hand side b of one inequality under given bounds.
  double NormalDot(ConstraintId id, const VectorXd& u) const;
  double Rhs(ConstraintId id, const VectorXd& lower, const VectorXd& upper) const;

 private:
  friend class GoldfarbIdnani;
  std::shared_ptr<const CondensedQp> qp_;
  MatrixXd inv_chol_t_;  // L^{-T}, with H = L L'
  VectorXd unconstrained_;
};

}  // namespace mimpc

#endif  // MIMPC_QP_SOLVER_HPP_
