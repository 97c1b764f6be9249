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

#include "mimpc/bnb.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "mimpc/oracle.hpp"
#include "mimpc/scenarios.hpp"
#include "test_util.hpp"

namespace mimpc {
namespace {

OcpMiqp HardInstance() {
  RandomFamilyConfig c;
  c.nx = 3;
  c.nu = 4;
  c.binaries_per_stage = 3;
  c.horizon = 5;
  c.rows_per_stage = 2;
  c.seed = 42;
  return MakeRandomHybrid(c);
}

TEST(NodeListTest, LifoWithoutIncumbent) {
  NodeList l;
  for (double b : {1.0, 2.0, 3.0}) {
    Node n;
    n.lower_bound = b;
    l.Push(n);
  }
  EXPECT_EQ(l.PopNext(false).lower_bound, 3.0);
  EXPECT_EQ(l.size(), 2u);
}

TEST(NodeListTest, BestFirstWithIncumbentAndDepthTieBreak) {
  NodeList l;
  Node a, b, c;
  a.lower_bound = 5.0;
  b.lower_bound = 3.0;
  b.depth = 1;
  c.lower_bound = 3.0;
  c.depth = 2;
  l.Push(a);
  l.Push(b);
  l.Push(c);
  EXPECT_EQ(l.MinBound(), 3.0);
  const Node first = l.PopNext(true);
  EXPECT_EQ(first.depth, 2);
  EXPECT_EQ(l.PopNext(true).lower_bound, 3.0);
  EXPECT_EQ(l.PopNext(true).lower_bound, 5.0);
  EXPECT_TRUE(l.empty());
  EXPECT_EQ(l.MinBound(), kInf);
  EXPECT_THROW(l.PopNext(true), std::logic_error);
}

TEST(NodeListTest, PruneAboveDropsWorseNodes) {
  NodeList l;
  for (double b : {1.0, 4.0, 6.0}) {
    Node n;
    n.lower_bound = b;
    l.Push(n);
  }
  EXPECT_EQ(l.PruneAbove(4.0), 1);
  EXPECT_EQ(l.size(), 2u);
}

TEST(PruneCheckTest, Examples) {
  QpResult infeasible;
  infeasible.status = QpStatus::kInfeasible;
  EXPECT_EQ(PruneCheck(infeasible, kInf, 1e-6), PruneDecision::kPruneInfeasible);
  QpResult r;
  r.status = QpStatus::kOptimal;
  r.objective = 7.0;
  EXPECT_EQ(PruneCheck(r, 5.0, 1e-6), PruneDecision::kPruneBound);
  r.objective = 5.0;
  EXPECT_EQ(PruneCheck(r, kInf, 1e-6), PruneDecision::kKeep);
}

TEST(SolveMiqpTest, ScalarDichotomy) {
  const OcpMiqp p = testing::ScalarBinaryProblem();
  const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, {});
  ASSERT_TRUE(r.solution.has_value());
  EXPECT_NEAR(r.solution->objective, 0.16, 1e-6);
  EXPECT_EQ(r.solution->controls(0, 0), 1.0);
  EXPECT_GE(r.stats.nodes, 3);
  EXPECT_EQ(r.stats.termination, Termination::kGapClosed);
  EXPECT_EQ(r.stats.branch_sequence, std::vector<int>{0});
}

TEST(SolveMiqpTest, IntegralRootNeedsOneNode) {
  OcpMiqp p = testing::ScalarBinaryProblem();
  p.initial_state[0] = 1.3;
  const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, {});
  ASSERT_TRUE(r.solution.has_value());
  EXPECT_EQ(r.stats.nodes, 1);
  EXPECT_TRUE(r.stats.branch_sequence.empty());
  EXPECT_EQ(r.solution->controls(0, 0), 1.0);
}

TEST(SolveMiqpTest, InfeasibleProblem) {
  OcpMiqp p = testing::ScalarBinaryProblem();
  // u must equal 0.5, which no binary value satisfies.
  p.stages[0].constraint_state = MatrixXd::Zero(1, 1);
  p.stages[0].constraint_input = MatrixXd::Ones(1, 1);
  p.stages[0].constraint_lower = VectorXd::Constant(1, 0.5);
  p.stages[0].constraint_upper = VectorXd::Constant(1, 0.5);
  for (bool presolve : {true, false}) {
    SolverConfig cfg;
    cfg.presolve = presolve;
    const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, cfg);
    EXPECT_FALSE(r.solution.has_value());
    EXPECT_EQ(r.stats.termination, Termination::kInfeasible);
    EXPECT_EQ(r.stats.upper_bound, kInf);
  }
}

TEST(SolveMiqpTest, FourBinaryInstanceMatchesEnumeration) {
  RandomFamilyConfig c;
  c.nx = 2;
  c.nu = 2;
  c.horizon = 4;
  c.binaries_per_stage = 1;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    c.seed = seed;
    const OcpMiqp p = MakeRandomHybrid(c);
    const OracleResult o = BruteForceOracle(p, p.initial_state);
    const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, {});
    ASSERT_EQ(o.feasible, r.solution.has_value()) << "seed " << seed;
    if (o.feasible) EXPECT_NEAR(r.solution->objective, o.objective, 1e-6) << "seed " << seed;
  }
}

TEST(SolveMiqpTest, CorpusAgreesWithOracleUnderEveryRule) {
  for (int i = 0; i < 120; ++i) {
    const OcpMiqp p = MakeRandomHybrid(testing::CorpusConfig(i));
    const OracleResult o = BruteForceOracle(p, p.initial_state);
    for (BranchingRule rule :
         {BranchingRule::kReliability, BranchingRule::kPseudoCost, BranchingRule::kStrong}) {
      for (bool presolve : {true, false}) {
        SolverConfig cfg;
        cfg.branching.rule = rule;
        cfg.presolve = presolve;
        cfg.optimality_fixing = i % 2 == 0;
        const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, cfg);
        ASSERT_EQ(o.feasible, r.solution.has_value()) << "instance " << i;
        if (!o.feasible) continue;
        EXPECT_NEAR(r.solution->objective, o.objective, 1e-6) << "instance " << i;
        EXPECT_LE(MaxConstraintViolation(p, *r.solution), 1e-7) << "instance " << i;
        const int nb = p.num_binaries();
        EXPECT_LE(r.stats.nodes, (1 << (nb + 1)) - 1);
      }
    }
  }
}

TEST(SolveMiqpTest, BoundSandwich) {
  for (int i = 0; i < 100; ++i) {
    const OcpMiqp p = MakeRandomHybrid(testing::CorpusConfig(i));
    SolverConfig cfg;
    cfg.record_bounds = true;
    const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, cfg);
    const auto& b = r.stats.bounds;
    for (size_t k = 0; k < b.size(); ++k) {
      EXPECT_LE(b[k].lower, b[k].upper + cfg.eps_gap) << "instance " << i;
      if (k == 0) continue;
      EXPECT_LE(b[k].upper, b[k - 1].upper);
      if (b[k - 1].best_first) EXPECT_GE(b[k].lower, b[k - 1].lower - 1e-12);
    }
    if (r.solution) {
      EXPECT_LE(r.stats.lower_bound, r.stats.upper_bound + cfg.eps_gap);
      EXPECT_NEAR(r.stats.upper_bound, r.solution->objective, 1e-9);
    }
  }
}

TEST(SolveMiqpTest, DeterministicReruns) {
  const OcpMiqp p = HardInstance();
  const MiqpResult a = SolveMiqp(p, p.initial_state, nullptr, {});
  const MiqpResult b = SolveMiqp(p, p.initial_state, nullptr, {});
  EXPECT_EQ(a.stats.nodes, b.stats.nodes);
  EXPECT_EQ(a.stats.qp_iterations, b.stats.qp_iterations);
  EXPECT_EQ(a.stats.branch_sequence, b.stats.branch_sequence);
  ASSERT_TRUE(a.solution && b.solution);
  EXPECT_EQ(a.solution->controls, b.solution->controls);
}

TEST(SolveMiqpTest, IterationCapReturnsIncumbent) {
  const OcpMiqp p = HardInstance();
  const MiqpResult full = SolveMiqp(p, p.initial_state, nullptr, {});
  ASSERT_TRUE(full.solution.has_value());
  ASSERT_GT(full.stats.nodes, 10);
  bool saw_incumbent = false;
  for (int cap = 1; cap < full.stats.nodes; cap += 3) {
    SolverConfig cfg;
    cfg.max_iterations = cap;
    const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, cfg);
    EXPECT_EQ(r.stats.termination, Termination::kIterationCap);
    EXPECT_LE(r.stats.nodes, cap);
    EXPECT_LE(r.stats.lower_bound, full.solution->objective + 1e-6);
    if (r.solution) {
      saw_incumbent = true;
      EXPECT_GE(r.solution->objective, full.solution->objective - 1e-6);
      EXPECT_LE(MaxConstraintViolation(p, *r.solution), 1e-7);
    }
  }
  EXPECT_TRUE(saw_incumbent);
}

TEST(SolveMiqpTest, MemoryCapStopsSearch) {
  const OcpMiqp p = HardInstance();
  SolverConfig cfg;
  cfg.node_memory_cap = 1;
  const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, cfg);
  EXPECT_EQ(r.stats.termination, Termination::kMemoryCap);
}

TEST(SolveMiqpTest, ArtifactsDescribeTheSolve) {
  const OcpMiqp p = HardInstance();
  const MiqpResult r = SolveMiqp(p, p.initial_state, nullptr, {});
  ASSERT_TRUE(r.solution.has_value());
  ASSERT_TRUE(r.artifacts.root_relaxation.has_value());
  ASSERT_TRUE(r.artifacts.incumbent.has_value());
  EXPECT_EQ(*r.artifacts.incumbent, r.solution->stacked_controls());
  EXPECT_FALSE(r.artifacts.pseudo_costs.empty());
  // The path leads to the incumbent: every decision agrees with it.
  for (const PathStep& s : r.artifacts.path) {
    const int j = s.var.stage * p.nu + s.var.index;
    EXPECT_EQ((*r.artifacts.incumbent)[j], BranchValue(s.dir));
    EXPECT_TRUE(s.relaxation.has_value());
  }
  const WarmStartPath w = r.artifacts.warm_path(p.nu, p.horizon());
  EXPECT_EQ(w.steps.size(), r.artifacts.path.size());
  EXPECT_EQ(w.horizon, p.horizon());
}

TEST(TerminationTest, Names) {
  EXPECT_STREQ(ToString(Termination::kGapClosed), "gap_closed");
  EXPECT_STREQ(ToString(Termination::kIterationCap), "iteration_cap");
  EXPECT_STREQ(ToString(Termination::kMemoryCap), "memory_cap");
  EXPECT_STREQ(ToString(Termination::kInfeasible), "infeasible");
}

}  // namespace
}  // namespace mimpc
