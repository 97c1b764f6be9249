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

#include "mimpc/branching.hpp"

#include <limits>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mimpc {
namespace {

using testing::MakeQp;

std::shared_ptr<CondensedQp> ScalarBinary(const MatrixXd& d = MatrixXd(0, 1),
                                          double lo = -kInf, double hi = kInf) {
  const int m = static_cast<int>(d.rows());
  return MakeQp(MatrixXd::Constant(1, 1, 2.0), VectorXd::Constant(1, -1.2), d,
                VectorXd::Constant(m, lo), VectorXd::Constant(m, hi), VectorXd::Zero(1),
                VectorXd::Ones(1), {0});
}

struct RandomNode {
  std::shared_ptr<CondensedQp> qp;
  QpResult relaxation;
};

// Random QP whose root relaxation has at least two fractional binaries.
std::vector<RandomNode> FractionalNodes(int count) {
  std::vector<RandomNode> out;
  for (unsigned seed = 1; static_cast<int>(out.size()) < count && seed < 5000; ++seed) {
    auto qp = testing::RandomQp(7, 3, seed, true);
    const QpSolver solver(qp);
    QpResult r = solver.Solve(QpInstance(qp));
    if (r.status != QpStatus::kOptimal) continue;
    if (FractionalCandidates(QpInstance(qp), r, 1e-6).size() < 2) continue;
    out.push_back({qp, std::move(r)});
  }
  return out;
}

PseudoCostTable RandomTable(const CondensedQp& qp, unsigned seed, int count) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  PseudoCostTable t;
  for (int j : qp.binaries) {
    PseudoCost& pc = t[qp.control_id(j)];
    pc.down = u(rng);
    pc.up = u(rng);
    pc.down_count = pc.up_count = count;
  }
  return t;
}

TEST(ScoreTest, Examples) {
  EXPECT_DOUBLE_EQ(Score(3.0, 2.0), 6.0);
  EXPECT_DOUBLE_EQ(Score(0.0, 5.0), 5e-6);
  EXPECT_DOUBLE_EQ(Score(0.0, 0.0), 1e-12);
  EXPECT_NEAR(PseudoScore(0.3, 2.0, 4.0), 1.68, 1e-15);
  EXPECT_DOUBLE_EQ(PseudoScore(0.5, 0.0, 0.0), 1e-12);
  EXPECT_DOUBLE_EQ(PseudoScore(0.5, 2.0, 2.0), 1.0);
}

TEST(PseudoCostTest, RunningMean) {
  PseudoCostTable t;
  const ControlId id{1, 0};
  UpdatePseudoCost(t, id, BranchDirection::kUp, 0.8, 0.4);
  EXPECT_DOUBLE_EQ(t.Find(id)->up, 2.0);
  EXPECT_EQ(t.Find(id)->up_count, 1);
  UpdatePseudoCost(t, id, BranchDirection::kUp, 4.0, 1.0);
  EXPECT_DOUBLE_EQ(t.Find(id)->up, 3.0);
  EXPECT_EQ(t.Find(id)->up_count, 2);
  EXPECT_EQ(t.Find(id)->down_count, 0);
  EXPECT_EQ(t.Find({0, 0}), nullptr);
  EXPECT_THROW(UpdatePseudoCost(t, id, BranchDirection::kDown, 1.0, 0.0), std::invalid_argument);
}

TEST(PseudoCostTest, CumulativeAverageProperty) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> gain(0.0, 10.0), dist(0.01, 0.99);
  PseudoCostTable t;
  t.set_record_history(true);
  for (int k = 0; k < 500; ++k) {
    const ControlId id{k % 3, k % 2};
    const BranchDirection dir = k % 5 < 2 ? BranchDirection::kDown : BranchDirection::kUp;
    UpdatePseudoCost(t, id, dir, gain(rng), dist(rng));
  }
  for (BranchDirection dir : {BranchDirection::kDown, BranchDirection::kUp}) {
    for (const auto& [id, samples] : t.history(dir)) {
      const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
      const PseudoCost* pc = t.Find(id);
      ASSERT_NE(pc, nullptr);
      EXPECT_NEAR(dir == BranchDirection::kUp ? pc->up : pc->down, mean, 1e-12);
      EXPECT_EQ(dir == BranchDirection::kUp ? pc->up_count : pc->down_count,
                static_cast<int>(samples.size()));
    }
  }
}

TEST(StrongBranchTest, ScalarGains) {
  auto qp = ScalarBinary();
  const QpSolver solver(qp);
  const QpInstance node(qp);
  const QpResult rel = solver.Solve(node);
  ASSERT_NEAR(rel.solution[0], 0.6, 1e-12);
  PseudoCostTable table;
  const StrongBranchResult sb = StrongBranch(solver, node, rel, 0, {}, &table);
  EXPECT_NEAR(sb.down_gain, 0.36, 1e-12);
  EXPECT_NEAR(sb.up_gain, 0.16, 1e-12);
  EXPECT_NEAR(sb.score, 0.36 * 0.16, 1e-12);
  EXPECT_NEAR(table.Find({0, 0})->down, 0.6, 1e-12);
  EXPECT_NEAR(table.Find({0, 0})->up, 0.4, 1e-12);
}

TEST(StrongBranchTest, BothChildrenInfeasible) {
  auto qp = ScalarBinary(MatrixXd::Ones(1, 1), 0.5, 0.5);
  const QpSolver solver(qp);
  const QpInstance node(qp);
  const QpResult rel = solver.Solve(node);
  PseudoCostTable table;
  const StrongBranchResult sb = StrongBranch(solver, node, rel, 0, {}, &table);
  EXPECT_TRUE(sb.down_infeasible());
  EXPECT_TRUE(sb.up_infeasible());
  EXPECT_TRUE(table.empty());
}

TEST(StrongBranchTest, InfeasibleSideGetsBigGain) {
  auto qp = ScalarBinary(MatrixXd::Ones(1, 1), -kInf, 0.5);
  const QpSolver solver(qp);
  const QpInstance node(qp);
  const QpResult rel = solver.Solve(node);
  ASSERT_NEAR(rel.solution[0], 0.5, 1e-12);
  BranchingConfig cfg;
  PseudoCostTable table;
  const StrongBranchResult sb = StrongBranch(solver, node, rel, 0, cfg, &table);
  EXPECT_FALSE(sb.down_infeasible());
  EXPECT_TRUE(sb.up_infeasible());
  EXPECT_EQ(sb.up_gain, cfg.big_gain);
  EXPECT_NEAR(sb.score, cfg.big_gain * sb.down_gain, 1e-6);
  EXPECT_EQ(table.Find({0, 0})->up_count, 0);
  EXPECT_EQ(table.Find({0, 0})->down_count, 1);
}

TEST(StrongBranchTest, CappedChildScoredWithLowerBound) {
  int capped = 0;
  for (const RandomNode& n : FractionalNodes(40)) {
    const QpSolver solver(n.qp);
    const QpInstance node(n.qp);
    BranchingConfig cfg;
    cfg.strong_iteration_cap = 1;
    for (int j : FractionalCandidates(node, n.relaxation, cfg.int_tol)) {
      PseudoCostTable table;
      const StrongBranchResult sb = StrongBranch(solver, node, n.relaxation, j, cfg, &table);
      for (const auto* side : {&sb.down, &sb.up}) {
        if (side->status != QpStatus::kIterationLimit) continue;
        ++capped;
        const double gain = side == &sb.down ? sb.down_gain : sb.up_gain;
        EXPECT_DOUBLE_EQ(gain, std::max(0.0, side->objective - n.relaxation.objective));
      }
      const PseudoCost* pc = table.Find(n.qp->control_id(j));
      const int expected = (sb.down.status == QpStatus::kOptimal) + (sb.up.status == QpStatus::kOptimal);
      EXPECT_EQ(pc ? pc->down_count + pc->up_count : 0, expected);
    }
  }
  EXPECT_GT(capped, 0);
}

TEST(SelectVariableTest, SingleCandidateIsSelected) {
  auto qp = ScalarBinary();
  const QpSolver solver(qp);
  const QpInstance node(qp);
  const QpResult rel = solver.Solve(node);
  PseudoCostTable table;
  BranchingConfig cfg;
  cfg.rule = BranchingRule::kPseudoCost;
  EXPECT_EQ(SelectVariable(solver, node, rel, table, cfg).var, 0);
}

TEST(SelectVariableTest, NoCandidateThrows) {
  auto qp = ScalarBinary();
  const QpSolver solver(qp);
  const QpInstance node(qp);
  QpResult rel = solver.Solve(node);
  rel.solution[0] = 1.0;
  PseudoCostTable table;
  EXPECT_THROW(SelectVariable(solver, node, rel, table, {}), std::invalid_argument);
}

TEST(SelectVariableTest, ReliabilityBoundaries) {
  const auto nodes = FractionalNodes(30);
  ASSERT_EQ(nodes.size(), 30u);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const RandomNode& n = nodes[i];
    const QpSolver solver(n.qp);
    const QpInstance node(n.qp);

    // Threshold 0 with populated counts: pure pseudo-cost choice, no QPs.
    PseudoCostTable t1 = RandomTable(*n.qp, i, 1), t2 = t1;
    BranchingConfig rel;
    rel.reliability = 0.0;
    BranchingConfig pure;
    pure.rule = BranchingRule::kPseudoCost;
    SelectionStats s1;
    const BranchCandidate a = SelectVariable(solver, node, n.relaxation, t1, rel, &s1);
    const BranchCandidate b = SelectVariable(solver, node, n.relaxation, t2, pure);
    EXPECT_EQ(a.var, b.var);
    EXPECT_EQ(s1.qp_solves, 0);
    EXPECT_FALSE(a.strong.has_value());

    // Infinite threshold and unlimited look-ahead: pure strong branching.
    PseudoCostTable t3 = RandomTable(*n.qp, i, 50), t4 = t3;
    BranchingConfig inf_rel;
    inf_rel.reliability = std::numeric_limits<double>::infinity();
    inf_rel.lookahead = std::numeric_limits<int>::max();
    BranchingConfig strong;
    strong.rule = BranchingRule::kStrong;
    SelectionStats s3;
    const BranchCandidate c = SelectVariable(solver, node, n.relaxation, t3, inf_rel, &s3);
    const BranchCandidate d = SelectVariable(solver, node, n.relaxation, t4, strong);
    EXPECT_EQ(c.var, d.var);
    EXPECT_EQ(s3.pseudo_scored, 0);
    EXPECT_TRUE(c.strong.has_value());
  }
}

TEST(SelectVariableTest, LookaheadLimitsStrongBranching) {
  const auto nodes = FractionalNodes(10);
  for (const RandomNode& n : nodes) {
    const QpSolver solver(n.qp);
    const QpInstance node(n.qp);
    PseudoCostTable t;
    BranchingConfig cfg;
    cfg.lookahead = 1;
    SelectionStats s;
    SelectVariable(solver, node, n.relaxation, t, cfg, &s);
    EXPECT_EQ(s.strong_branched, 1);
    EXPECT_EQ(s.qp_solves, 2);
  }
}

TEST(SelectVariableTest, ScalingPseudoCostsKeepsChoice) {
  for (const RandomNode& n : FractionalNodes(30)) {
    const QpSolver solver(n.qp);
    const QpInstance node(n.qp);
    BranchingConfig cfg;
    cfg.rule = BranchingRule::kPseudoCost;
    PseudoCostTable t = RandomTable(*n.qp, 3, 5);
    PseudoCostTable scaled = t;
    for (const auto& [id, pc] : t.entries()) {
      scaled[id].down = 7.0 * pc.down;
      scaled[id].up = 7.0 * pc.up;
    }
    EXPECT_EQ(SelectVariable(solver, node, n.relaxation, t, cfg).var,
              SelectVariable(solver, node, n.relaxation, scaled, cfg).var);
  }
}

TEST(SelectVariableTest, TiesGoToLowestIndexAndRepeat) {
  for (const RandomNode& n : FractionalNodes(10)) {
    const QpSolver solver(n.qp);
    const QpInstance node(n.qp);
    BranchingConfig cfg;
    cfg.rule = BranchingRule::kPseudoCost;
    PseudoCostTable empty;  // every score is eps^2
    const auto cands = FractionalCandidates(node, n.relaxation, cfg.int_tol);
    EXPECT_EQ(SelectVariable(solver, node, n.relaxation, empty, cfg).var, cands.front());

    PseudoCostTable t1, t2;
    const BranchCandidate a = SelectVariable(solver, node, n.relaxation, t1, {});
    const BranchCandidate b = SelectVariable(solver, node, n.relaxation, t2, {});
    EXPECT_EQ(a.var, b.var);
    EXPECT_EQ(a.score, b.score);
  }
}

TEST(FractionalCandidatesTest, SkipsFixedAndNearIntegral) {
  auto qp = testing::RandomQp(5, 0, 1, true);  // binaries 0, 2, 4
  QpResult r;
  r.solution = VectorXd::Zero(5);
  r.solution[0] = 0.5;
  r.solution[2] = 1.0 - 1e-7;
  r.solution[4] = 0.3;
  const QpInstance node = UpdateBounds(QpInstance(qp), {{4, 1.0, 1.0}});
  EXPECT_EQ(FractionalCandidates(node, r, 1e-6), (std::vector<int>{0}));
  EXPECT_TRUE(IsFractional(0.5, 1e-6));
  EXPECT_FALSE(IsFractional(1e-6, 1e-6));
}

}  // namespace
}  // namespace mimpc
