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

#include <random>

#include <gtest/gtest.h>

#include "mimpc/scenarios.hpp"
#include "test_util.hpp"

namespace mimpc {
namespace {

OcpMiqp ScalarProblem() {
  OcpMiqp p;
  p.nx = 1;
  p.nu = 1;
  Stage s;
  s.state_weight = MatrixXd::Zero(1, 1);
  s.input_weight = MatrixXd::Ones(1, 1);
  s.state_matrix = MatrixXd::Ones(1, 1);
  s.input_matrix = MatrixXd::Ones(1, 1);
  s.offset = VectorXd::Zero(1);
  s.constraint_state = MatrixXd::Ones(1, 1);
  s.constraint_input = MatrixXd::Ones(1, 1);
  s.constraint_lower = VectorXd::Constant(1, -5.0);
  s.constraint_upper = VectorXd::Constant(1, 5.0);
  s.input_lower = VectorXd::Constant(1, -10.0);
  s.input_upper = VectorXd::Constant(1, 10.0);
  p.stages.push_back(s);
  p.terminal.state_weight = MatrixXd::Ones(1, 1);
  p.terminal.constraint_state = MatrixXd::Ones(1, 1);
  p.terminal.constraint_lower = VectorXd::Constant(1, -4.0);
  p.terminal.constraint_upper = VectorXd::Constant(1, 4.0);
  p.initial_state = VectorXd::Constant(1, 2.0);
  return p;
}

OcpMiqp RandomProblem(unsigned seed, int n = 3, int nx = 2, int nu = 1) {
  RandomFamilyConfig c;
  c.seed = seed;
  c.horizon = n;
  c.nx = nx;
  c.nu = nu;
  c.binaries_per_stage = 0;
  c.rows_per_stage = 2;
  return MakeRandomHybrid(c);
}

VectorXd RandomControls(int size, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = u(rng);
  return v;
}

TEST(CondenseTest, SingleStageHandExpansion) {
  const CondensedQp qp = Condense(ScalarProblem(), VectorXd::Constant(1, 2.0));
  EXPECT_DOUBLE_EQ(qp.hessian(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(qp.gradient[0], 2.0);
  EXPECT_DOUBLE_EQ(qp.constant, 2.0);
  // Stage row: x0 + u0 in [-5, 5] with x0 = 2.
  EXPECT_DOUBLE_EQ(qp.rows(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(qp.row_lower[0], -7.0);
  EXPECT_DOUBLE_EQ(qp.row_upper[0], 3.0);
  // Terminal row: x1 = 2 + u0 in [-4, 4].
  EXPECT_DOUBLE_EQ(qp.rows(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(qp.row_lower[1], -6.0);
  EXPECT_DOUBLE_EQ(qp.row_upper[1], 2.0);
}

TEST(CondenseTest, HomogeneousDataGivesZeroGradientAndRawBounds) {
  OcpMiqp p = RandomProblem(3);
  for (Stage& s : p.stages) s.offset.setZero();
  const CondensedQp qp = Condense(p, VectorXd::Zero(p.nx));
  EXPECT_LE(qp.gradient.cwiseAbs().maxCoeff(), 1e-15);
  int r = 0;
  for (const Stage& s : p.stages) {
    for (int k = 0; k < s.constraint_lower.size(); ++k, ++r) {
      EXPECT_EQ(qp.row_lower[r], s.constraint_lower[k]);
      EXPECT_EQ(qp.row_upper[r], s.constraint_upper[k]);
    }
  }
}

TEST(CondenseTest, ObjectiveMatchesForwardSimulation) {
  std::mt19937 rng(7);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const OcpMiqp p = RandomProblem(seed);
    const VectorXd x0 = p.initial_state;
    const CondensedQp qp = Condense(p, x0);
    for (int trial = 0; trial < 10; ++trial) {
      const VectorXd u = RandomControls(p.num_controls(), rng);
      const TrajectorySolution sim = Simulate(p, x0, u);
      const double condensed = qp.Objective(u) + qp.constant;
      EXPECT_NEAR(condensed, sim.objective, 1e-9 * (1.0 + std::abs(sim.objective)));
    }
  }
}

TEST(CondenseTest, RowsMatchStructuredConstraints) {
  std::mt19937 rng(11);
  const OcpMiqp p = RandomProblem(4, 4, 3, 2);
  const CondensedQp qp = Condense(p, p.initial_state);
  const VectorXd u = RandomControls(p.num_controls(), rng);
  const TrajectorySolution sim = Simulate(p, p.initial_state, u);
  const VectorXd du = qp.rows * u;
  int r = 0;
  for (int i = 0; i < p.horizon(); ++i) {
    const Stage& s = p.stages[i];
    const VectorXd v = s.constraint_state * sim.states.col(i) + s.constraint_input * sim.controls.col(i);
    for (int k = 0; k < v.size(); ++k, ++r) {
      // l <= v <= h  iff  l - offset <= du <= h - offset with offset = v - du.
      const double offset = v[k] - du[r];
      if (std::isfinite(s.constraint_lower[k])) {
        EXPECT_NEAR(qp.row_lower[r] + offset, s.constraint_lower[k], 1e-9);
      }
      if (std::isfinite(s.constraint_upper[k])) {
        EXPECT_NEAR(qp.row_upper[r] + offset, s.constraint_upper[k], 1e-9);
      }
    }
  }
  const VectorXd vt = p.terminal.constraint_state * sim.states.col(p.horizon());
  for (int k = 0; k < vt.size(); ++k, ++r) {
    EXPECT_NEAR(qp.row_lower[r] + vt[k] - du[r], p.terminal.constraint_lower[k], 1e-9);
  }
  EXPECT_EQ(r, qp.num_rows());
}

TEST(CondenseTest, AffineInInitialState) {
  const OcpMiqp p = RandomProblem(5);
  const VectorXd a = VectorXd::Constant(p.nx, 1.0);
  const VectorXd b = VectorXd::LinSpaced(p.nx, -2.0, 3.0);
  const CondensedQp qa = Condense(p, a), qb = Condense(p, b), qm = Condense(p, 0.5 * (a + b));
  EXPECT_EQ(qa.hessian, qb.hessian);
  EXPECT_EQ(qa.rows, qb.rows);
  EXPECT_LE((qm.gradient - 0.5 * (qa.gradient + qb.gradient)).cwiseAbs().maxCoeff(), 1e-12);
  for (int r = 0; r < qm.num_rows(); ++r) {
    if (std::isfinite(qm.row_lower[r])) {
      EXPECT_NEAR(qm.row_lower[r], 0.5 * (qa.row_lower[r] + qb.row_lower[r]), 1e-12);
    }
  }
}

TEST(CondenseTest, CondenserMatchesOneShotCondense) {
  const OcpMiqp p = RandomProblem(6);
  const Condenser c(p);
  const VectorXd x0 = VectorXd::Constant(p.nx, -0.7);
  const CondensedQp a = c.Condense(x0), b = Condense(p, x0);
  EXPECT_EQ(a.hessian, b.hessian);
  EXPECT_EQ(a.gradient, b.gradient);
  EXPECT_EQ(a.constant, b.constant);
}

TEST(CondenseTest, BinaryBoundsIntersectUnitInterval) {
  OcpMiqp p = ScalarProblem();
  p.stages[0].binary_inputs = {0};
  const CondensedQp qp = Condense(p, p.initial_state);
  EXPECT_EQ(qp.var_lower[0], 0.0);
  EXPECT_EQ(qp.var_upper[0], 1.0);
  ASSERT_EQ(qp.binaries.size(), 1u);
  EXPECT_TRUE(qp.is_binary[0]);
}

TEST(ExpandTest, ZeroInputZeroStateGivesZeroTrajectory) {
  OcpMiqp p = RandomProblem(8);
  for (Stage& s : p.stages) s.offset.setZero();
  const CondensedQp qp = Condense(p, VectorXd::Zero(p.nx));
  const TrajectorySolution t = Expand(qp, VectorXd::Zero(p.num_controls()));
  EXPECT_EQ(t.states.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(t.objective, 0.0);
}

TEST(ExpandTest, SingleStageStep) {
  const CondensedQp qp = Condense(ScalarProblem(), VectorXd::Constant(1, 2.0));
  const TrajectorySolution t = Expand(qp, VectorXd::Ones(1));
  EXPECT_DOUBLE_EQ(t.states(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(t.states(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(t.objective, 0.5 + 4.5);
}

TEST(ExpandTest, DynamicsResidual) {
  std::mt19937 rng(3);
  const OcpMiqp p = RandomProblem(9, 4, 3, 2);
  const CondensedQp qp = Condense(p, p.initial_state);
  const TrajectorySolution t = Expand(qp, RandomControls(p.num_controls(), rng));
  for (int i = 0; i < p.horizon(); ++i) {
    const Stage& s = p.stages[i];
    const VectorXd next = s.state_matrix * t.states.col(i) + s.input_matrix * t.controls.col(i) + s.offset;
    EXPECT_LE((next - t.states.col(i + 1)).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_EQ(t.stacked_controls().size(), p.num_controls());
}

TEST(ValidateTest, AcceptsWellFormedProblem) {
  EXPECT_TRUE(Validate(ScalarProblem()).ok());
}

TEST(ValidateTest, RejectsSingularInputWeight) {
  OcpMiqp p = ScalarProblem();
  p.stages[0].input_weight(0, 0) = 0.0;
  const ValidationReport r = Validate(p);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.summary().find("R not positive definite"), std::string::npos);
  EXPECT_THROW(Condenser{p}, std::invalid_argument);
}

TEST(ValidateTest, RejectsIndefiniteStateWeight) {
  OcpMiqp p = ScalarProblem();
  p.stages[0].state_weight(0, 0) = -1.0;
  EXPECT_NE(Validate(p).summary().find("Q not positive semidefinite"), std::string::npos);
}

TEST(ValidateTest, RejectsInvertedBound) {
  OcpMiqp p = ScalarProblem();
  p.stages[0].constraint_lower[0] = 6.0;
  EXPECT_NE(Validate(p).summary().find("inverted bound"), std::string::npos);
}

TEST(ValidateTest, RejectsDimensionMismatch) {
  OcpMiqp p = ScalarProblem();
  p.stages[0].input_matrix = MatrixXd::Ones(2, 1);
  EXPECT_NE(Validate(p).summary().find("B has shape 2x1"), std::string::npos);
}

TEST(ValidateTest, RejectsBadBinaryIndex) {
  OcpMiqp p = ScalarProblem();
  p.stages[0].binary_inputs = {1};
  EXPECT_NE(Validate(p).summary().find("out of range"), std::string::npos);
}

TEST(ValidateTest, RejectsEmptyHorizon) {
  OcpMiqp p = ScalarProblem();
  p.stages.clear();
  EXPECT_FALSE(Validate(p).ok());
}

TEST(MaxConstraintViolationTest, ReportsFractionalBinary) {
  OcpMiqp p = testing::ScalarBinaryProblem();
  const TrajectorySolution t = Simulate(p, p.initial_state, VectorXd::Constant(1, 0.3));
  EXPECT_NEAR(MaxConstraintViolation(p, t), 0.3, 1e-15);
  const TrajectorySolution ok = Simulate(p, p.initial_state, VectorXd::Constant(1, 1.0));
  EXPECT_EQ(MaxConstraintViolation(p, ok), 0.0);
}

}  // namespace
}  // namespace mimpc
