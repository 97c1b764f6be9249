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

#include "mimpc/ocp_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mimpc {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kSymmetryTol = 1e-12;

bool IsSymmetric(const MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * scale;
}

// Smallest pivot of a pivoted LDL' factorization, relative to the largest.
double MinRelativePivot(const MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::LDLT<MatrixXd> ldlt(0.5 * (m + m.transpose()));
  const VectorXd d = ldlt.vectorD();
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  return d.minCoeff() / scale;
}

void CheckDims(std::vector<std::string>& out, const std::string& what,
               Eigen::Index rows, Eigen::Index cols, Eigen::Index want_rows,
               Eigen::Index want_cols) {
  if (rows != want_rows || cols != want_cols) {
    std::ostringstream os;
    os << what << " has shape " << rows << "x" << cols << ", expected "
       << want_rows << "x" << want_cols;
    out.push_back(os.str());
  }
}

void CheckBounds(std::vector<std::string>& out, const std::string& what,
                 const VectorXd& lo, const VectorXd& hi) {
  if (lo.size() != hi.size()) return;
  for (Eigen::Index r = 0; r < lo.size(); ++r) {
    if (std::isnan(lo[r]) || std::isnan(hi[r])) {
      out.push_back(what + " row " + std::to_string(r) + ": NaN bound");
    } else if (lo[r] > hi[r]) {
      out.push_back(what + " row " + std::to_string(r) + ": inverted bound");
    }
  }
}

}  // namespace

int OcpMiqp::num_rows() const {
  int rows = static_cast<int>(terminal.constraint_state.rows());
  for (const Stage& s : stages) rows += static_cast<int>(s.constraint_state.rows());
  return rows;
}

int OcpMiqp::num_binaries() const {
  int count = 0;
  for (const Stage& s : stages) count += static_cast<int>(s.binary_inputs.size());
  return count;
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (size_t i = 0; i < failures.size(); ++i) {
    if (i) os << "; ";
    os << failures[i];
  }
  return os.str();
}

ValidationReport Validate(const OcpMiqp& prob) {
  ValidationReport report;
  auto& out = report.failures;
  const int nx = prob.nx;
  const int nu = prob.nu;
  if (nx <= 0 || nu <= 0) out.push_back("nx and nu must be positive");
  if (prob.horizon() < 1) out.push_back("horizon must be at least 1");
  if (prob.initial_state.size() != nx) out.push_back("initial state has wrong size");
  if (!out.empty()) return report;

  for (int i = 0; i < prob.horizon(); ++i) {
    const Stage& s = prob.stages[i];
    const std::string tag = "stage " + std::to_string(i) + " ";
    const size_t before = out.size();
    CheckDims(out, tag + "Q", s.state_weight.rows(), s.state_weight.cols(), nx, nx);
    CheckDims(out, tag + "R", s.input_weight.rows(), s.input_weight.cols(), nu, nu);
    CheckDims(out, tag + "A", s.state_matrix.rows(), s.state_matrix.cols(), nx, nx);
    CheckDims(out, tag + "B", s.input_matrix.rows(), s.input_matrix.cols(), nx, nu);
    CheckDims(out, tag + "a", s.offset.size(), 1, nx, 1);
    const Eigen::Index nc = s.constraint_state.rows();
    CheckDims(out, tag + "C", s.constraint_state.rows(), s.constraint_state.cols(), nc, nx);
    CheckDims(out, tag + "D", s.constraint_input.rows(), s.constraint_input.cols(), nc, nu);
    CheckDims(out, tag + "lc", s.constraint_lower.size(), 1, nc, 1);
    CheckDims(out, tag + "uc", s.constraint_upper.size(), 1, nc, 1);
    CheckDims(out, tag + "u_lo", s.input_lower.size(), 1, nu, 1);
    CheckDims(out, tag + "u_hi", s.input_upper.size(), 1, nu, 1);
    if (out.size() != before) continue;

    if (!IsSymmetric(s.state_weight)) out.push_back(tag + "Q not symmetric");
    else if (MinRelativePivot(s.state_weight) < -kPivotTol)
      out.push_back(tag + "Q not positive semidefinite");
    if (!IsSymmetric(s.input_weight)) out.push_back(tag + "R not symmetric");
    else if (MinRelativePivot(s.input_weight) <= kPivotTol)
      out.push_back(tag + "R not positive definite");
    CheckBounds(out, tag + "constraint", s.constraint_lower, s.constraint_upper);
    CheckBounds(out, tag + "input", s.input_lower, s.input_upper);

    std::set<int> seen;
    for (int k : s.binary_inputs) {
      if (k < 0 || k >= nu) {
        out.push_back(tag + "binary index " + std::to_string(k) + " out of range");
      } else if (!seen.insert(k).second) {
        out.push_back(tag + "duplicate binary index " + std::to_string(k));
      } else if (std::max(0.0, s.input_lower[k]) > std::min(1.0, s.input_upper[k])) {
        out.push_back(tag + "binary input " + std::to_string(k) +
                      " has bounds excluding [0, 1]");
      }
    }
  }

  const TerminalStage& t = prob.terminal;
  const size_t before = out.size();
  CheckDims(out, "terminal P", t.state_weight.rows(), t.state_weight.cols(), nx, nx);
  const Eigen::Index nc = t.constraint_state.rows();
  CheckDims(out, "terminal C", t.constraint_state.rows(), t.constraint_state.cols(), nc, nx);
  CheckDims(out, "terminal lc", t.constraint_lower.size(), 1, nc, 1);
  CheckDims(out, "terminal uc", t.constraint_upper.size(), 1, nc, 1);
  if (out.size() == before) {
    if (!IsSymmetric(t.state_weight)) out.push_back("terminal P not symmetric");
    else if (MinRelativePivot(t.state_weight) < -kPivotTol)
      out.push_back("terminal P not positive semidefinite");
    CheckBounds(out, "terminal constraint", t.constraint_lower, t.constraint_upper);
  }
  return report;
}

double CondensedQp::Objective(const VectorXd& u) const {
  return 0.5 * u.dot(hessian * u) + gradient.dot(u);
}

Condenser::Condenser(const OcpMiqp& prob) : prob_(prob) {
  const ValidationReport report = Validate(prob_);
  if (!report.ok()) throw std::invalid_argument("invalid OCP: " + report.summary());

  const int nx = prob_.nx;
  const int nu = prob_.nu;
  const int n = prob_.horizon();
  const int n_u = nu * n;
  const int n_x = nx * n;

  // Forward block substitution through the unit lower block-triangular
  // dynamics: block i holds x_{i+1}.
  state_from_input_ = MatrixXd::Zero(n_x, n_u);
  state_from_initial_ = MatrixXd::Zero(n_x, nx);
  affine_response_ = VectorXd::Zero(n_x);
  for (int i = 0; i < n; ++i) {
    const Stage& s = prob_.stages[i];
    if (i == 0) {
      state_from_initial_.middleRows(0, nx) = s.state_matrix;
      affine_response_.segment(0, nx) = s.offset;
    } else {
      const int prev = (i - 1) * nx;
      state_from_input_.block(i * nx, 0, nx, i * nu) =
          s.state_matrix * state_from_input_.block(prev, 0, nx, i * nu);
      state_from_initial_.middleRows(i * nx, nx) =
          s.state_matrix * state_from_initial_.middleRows(prev, nx);
      affine_response_.segment(i * nx, nx) =
          s.state_matrix * affine_response_.segment(prev, nx) + s.offset;
    }
    state_from_input_.block(i * nx, i * nu, nx, nu) = s.input_matrix;
  }

  stacked_state_weight_ = MatrixXd::Zero(n_x, n_x);
  for (int i = 0; i < n; ++i) {
    stacked_state_weight_.block(i * nx, i * nx, nx, nx) =
        (i + 1 < n) ? prob_.stages[i + 1].state_weight : prob_.terminal.state_weight;
  }
  weighted_input_map_ = stacked_state_weight_ * state_from_input_;
  hessian_ = state_from_input_.transpose() * weighted_input_map_;
  for (int i = 0; i < n; ++i) {
    hessian_.block(i * nu, i * nu, nu, nu) += prob_.stages[i].input_weight;
  }
  hessian_ = 0.5 * (hessian_ + hessian_.transpose());

  const int n_rows = prob_.num_rows();
  rows_ = MatrixXd::Zero(n_rows, n_u);
  row_from_initial_ = MatrixXd::Zero(n_rows, nx);
  row_affine_ = VectorXd::Zero(n_rows);
  row_lower_.resize(n_rows);
  row_upper_.resize(n_rows);
  int r = 0;
  for (int i = 0; i <= n; ++i) {
    const bool terminal = (i == n);
    const MatrixXd& c = terminal ? prob_.terminal.constraint_state
                                 : prob_.stages[i].constraint_state;
    const int nc = static_cast<int>(c.rows());
    if (nc == 0) continue;
    if (i == 0) {
      row_from_initial_.middleRows(r, nc) = c;
    } else {
      const int blk = (i - 1) * nx;
      rows_.block(r, 0, nc, i * nu) = c * state_from_input_.block(blk, 0, nx, i * nu);
      row_from_initial_.middleRows(r, nc) = c * state_from_initial_.middleRows(blk, nx);
      row_affine_.segment(r, nc) = c * affine_response_.segment(blk, nx);
    }
    if (!terminal) {
      rows_.block(r, i * nu, nc, nu) += prob_.stages[i].constraint_input;
      row_lower_.segment(r, nc) = prob_.stages[i].constraint_lower;
      row_upper_.segment(r, nc) = prob_.stages[i].constraint_upper;
    } else {
      row_lower_.segment(r, nc) = prob_.terminal.constraint_lower;
      row_upper_.segment(r, nc) = prob_.terminal.constraint_upper;
    }
    for (int k = 0; k < nc; ++k) row_stage_.push_back(i);
    r += nc;
  }

  var_lower_.resize(n_u);
  var_upper_.resize(n_u);
  for (int i = 0; i < n; ++i) {
    const Stage& s = prob_.stages[i];
    var_lower_.segment(i * nu, nu) = s.input_lower;
    var_upper_.segment(i * nu, nu) = s.input_upper;
    std::vector<int> bins = s.binary_inputs;
    std::sort(bins.begin(), bins.end());
    for (int k : bins) {
      const int j = i * nu + k;
      binaries_.push_back(j);
      var_lower_[j] = std::max(var_lower_[j], 0.0);
      var_upper_[j] = std::min(var_upper_[j], 1.0);
    }
  }
}

CondensedQp Condenser::Condense(const VectorXd& initial_state) const {
  if (initial_state.size() != prob_.nx) {
    throw std::invalid_argument("initial state has wrong size");
  }
  CondensedQp qp;
  qp.nx = prob_.nx;
  qp.nu = prob_.nu;
  qp.horizon = prob_.horizon();
  qp.hessian = hessian_;
  qp.rows = rows_;
  qp.var_lower = var_lower_;
  qp.var_upper = var_upper_;
  qp.binaries = binaries_;
  qp.is_binary.assign(static_cast<size_t>(prob_.num_controls()), 0);
  for (int j : binaries_) qp.is_binary[j] = 1;
  qp.row_stage = row_stage_;
  qp.state_from_input = state_from_input_;
  qp.initial_state = initial_state;

  // Free response b = Abar^{-1} (b + E0 x0) and everything affine in it.
  qp.free_response = affine_response_ + state_from_initial_ * initial_state;
  qp.gradient = weighted_input_map_.transpose() * qp.free_response;
  qp.constant =
      0.5 * initial_state.dot(prob_.stages[0].state_weight * initial_state) +
      0.5 * qp.free_response.dot(stacked_state_weight_ * qp.free_response);
  const VectorXd shift = row_from_initial_ * initial_state + row_affine_;
  qp.row_lower = row_lower_ - shift;
  qp.row_upper = row_upper_ - shift;
  return qp;
}

CondensedQp Condense(const OcpMiqp& prob, const VectorXd& initial_state) {
  return Condenser(prob).Condense(initial_state);
}

VectorXd TrajectorySolution::stacked_controls() const {
  return Eigen::Map<const VectorXd>(controls.data(), controls.size());
}

TrajectorySolution Expand(const CondensedQp& qp, const VectorXd& controls) {
  if (controls.size() != qp.num_vars()) {
    throw std::invalid_argument("control vector has wrong size");
  }
  TrajectorySolution sol;
  sol.states.resize(qp.nx, qp.horizon + 1);
  sol.states.col(0) = qp.initial_state;
  const VectorXd x = qp.state_from_input * controls + qp.free_response;
  for (int i = 0; i < qp.horizon; ++i) sol.states.col(i + 1) = x.segment(i * qp.nx, qp.nx);
  sol.controls = Eigen::Map<const MatrixXd>(controls.data(), qp.nu, qp.horizon);
  sol.objective = qp.Objective(controls) + qp.constant;
  return sol;
}

TrajectorySolution Simulate(const OcpMiqp& prob, const VectorXd& initial_state,
                            const VectorXd& controls) {
  const int n = prob.horizon();
  TrajectorySolution sol;
  sol.states.resize(prob.nx, n + 1);
  sol.controls = Eigen::Map<const MatrixXd>(controls.data(), prob.nu, n);
  sol.states.col(0) = initial_state;
  double obj = 0.0;
  for (int i = 0; i < n; ++i) {
    const Stage& s = prob.stages[i];
    const VectorXd x = sol.states.col(i);
    const VectorXd u = sol.controls.col(i);
    obj += x.dot(s.state_weight * x) + u.dot(s.input_weight * u);
    sol.states.col(i + 1) = s.state_matrix * x + s.input_matrix * u + s.offset;
  }
  const VectorXd xn = sol.states.col(n);
  obj += xn.dot(prob.terminal.state_weight * xn);
  sol.objective = 0.5 * obj;
  return sol;
}

double MaxConstraintViolation(const OcpMiqp& prob, const TrajectorySolution& traj) {
  double worst = 0.0;
  auto rows = [&](const VectorXd& v, const VectorXd& lo, const VectorXd& hi) {
    for (Eigen::Index r = 0; r < v.size(); ++r) {
      worst = std::max({worst, lo[r] - v[r], v[r] - hi[r]});
    }
  };
  const int n = prob.horizon();
  for (int i = 0; i < n; ++i) {
    const Stage& s = prob.stages[i];
    const VectorXd x = traj.states.col(i);
    const VectorXd u = traj.controls.col(i);
    rows(s.constraint_state * x + s.constraint_input * u, s.constraint_lower,
         s.constraint_upper);
    rows(u, s.input_lower, s.input_upper);
    for (int k : s.binary_inputs) worst = std::max(worst, std::min(std::abs(u[k]), std::abs(1.0 - u[k])));
  }
  rows(prob.terminal.constraint_state * traj.states.col(n),
       prob.terminal.constraint_lower, prob.terminal.constraint_upper);
  return worst;
}

}  // namespace mimpc
