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

#ifndef MIMPC_OCP_MODEL_HPP_
#define MIMPC_OCP_MODEL_HPP_

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mimpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One control interval of the optimal control problem:
//   x+ = state_matrix * x + input_matrix * u + offset
//   constraint_lower <= constraint_state * x + constraint_input * u
//                    <= constraint_upper
//   input_lower <= u <= input_upper, u[k] in {0, 1} for k in binary_inputs.
struct Stage {
  MatrixXd state_weight;  // nx x nx, PSD
  MatrixXd input_weight;  // nu x nu, PD
  MatrixXd state_matrix;
  MatrixXd input_matrix;
  VectorXd offset;
  MatrixXd constraint_state;  // nc x nx
  MatrixXd constraint_input;  // nc x nu
  VectorXd constraint_lower;
  VectorXd constraint_upper;
  VectorXd input_lower;
  VectorXd input_upper;
  std::vector<int> binary_inputs;
};

struct TerminalStage {
  MatrixXd state_weight;      // nx x nx, PSD
  MatrixXd constraint_state;  // nc x nx
  VectorXd constraint_lower;
  VectorXd constraint_upper;
};

// Block-structured MIQP over the prediction horizon. The objective is
//   1/2 sum_i (x_i' Q_i x_i + u_i' R_i u_i) + 1/2 x_N' P x_N
// with x_0 fixed to initial_state.
struct OcpMiqp {
  int nx = 0;
  int nu = 0;
  std::vector<Stage> stages;
  TerminalStage terminal;
  VectorXd initial_state;

  int horizon() const { return static_cast<int>(stages.size()); }
  int num_controls() const { return nu * horizon(); }
  int num_rows() const;
  int num_binaries() const;
};

struct ValidationReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
  std::string summary() const;
};

ValidationReport Validate(const OcpMiqp& prob);

// Identifies control u_{stage}[index]; flattened as stage * nu + index.
struct ControlId {
  int stage = 0;
  int index = 0;
  friend bool operator==(const ControlId&, const ControlId&) = default;
  friend auto operator<=>(const ControlId&, const ControlId&) = default;
};

// Dense control-space form of an OcpMiqp at a fixed initial state:
//   min 1/2 U' H U + h' U + constant
//   s.t. row_lower <= D U <= row_upper, var_lower <= U <= var_upper.
// Rows are the stage constraints stacked in stage order, terminal last.
struct CondensedQp {
  int nx = 0;
  int nu = 0;
  int horizon = 0;
  MatrixXd hessian;
  VectorXd gradient;
  double constant = 0.0;
  MatrixXd rows;
  VectorXd row_lower;
  VectorXd row_upper;
  VectorXd var_lower;
  VectorXd var_upper;
  std::vector<int> binaries;  // sorted flat indices
  std::vector<char> is_binary;
  std::vector<int> row_stage;

  // Predicted states x_1..x_N stacked: state_from_input * U + free_response.
  MatrixXd state_from_input;
  VectorXd free_response;
  VectorXd initial_state;

  int num_vars() const { return static_cast<int>(hessian.rows()); }
  int num_rows() const { return static_cast<int>(rows.rows()); }
  int flat_index(ControlId id) const { return id.stage * nu + id.index; }
  ControlId control_id(int flat) const { return {flat / nu, flat % nu}; }
  double Objective(const VectorXd& u) const;
};

// Precomputes everything in the condensed problem that does not depend on
// the initial state so that a new state only costs a few mat-vec products.
class Condenser {
 public:
  // Throws std::invalid_argument if Validate(prob) fails.
  explicit Condenser(const OcpMiqp& prob);

  CondensedQp Condense(const VectorXd& initial_state) const;
  const OcpMiqp& problem() const { return prob_; }

 private:
  OcpMiqp prob_;
  MatrixXd state_from_input_;    // G
  MatrixXd state_from_initial_;  // Phi
  VectorXd affine_response_;     // w
  MatrixXd weighted_input_map_;  // Qbar * G
  MatrixXd hessian_;
  MatrixXd rows_;
  MatrixXd row_from_initial_;
  VectorXd row_affine_;
  VectorXd row_lower_;
  VectorXd row_upper_;
  VectorXd var_lower_;
  VectorXd var_upper_;
  std::vector<int> binaries_;
  std::vector<int> row_stage_;
  MatrixXd stacked_state_weight_;  // blkdiag(Q_1..Q_{N-1}, P)
};

CondensedQp Condense(const OcpMiqp& prob, const VectorXd& initial_state);

struct TrajectorySolution {
  MatrixXd states;    // nx x (N+1), column i is x_i
  MatrixXd controls;  // nu x N
  double objective = 0.0;

  VectorXd stacked_controls() const;
};

TrajectorySolution Expand(const CondensedQp& qp, const VectorXd& controls);

// Structured objective and dynamics simulation, independent of condensing.
TrajectorySolution Simulate(const OcpMiqp& prob, const VectorXd& initial_state,
                            const VectorXd& controls);

// Largest violation of stage/terminal rows, input bounds and integrality.
double MaxConstraintViolation(const OcpMiqp& prob,
                              const TrajectorySolution& traj);

}  // namespace mimpc

#endif  // MIMPC_OCP_MODEL_HPP_
