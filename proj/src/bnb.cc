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

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mimpc {

const char* ToString(Termination t) {
  switch (t) {
    case Termination::kGapClosed: return "gap_closed";
    case Termination::kIterationCap: return "iteration_cap";
    case Termination::kMemoryCap: return "memory_cap";
    case Termination::kInfeasible: return "infeasible";
  }
  return "unknown";
}

WarmStartPath SolveArtifacts::warm_path(int nu, int horizon) const {
  WarmStartPath out;
  out.nu = nu;
  out.horizon = horizon;
  out.steps = path;
  out.incumbent = incumbent;
  return out;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(std::shared_ptr<const CondensedQp> qp, const WarmStart* warm,
                 const SolverConfig& config)
      : qp_(std::move(qp)), solver_(qp_), rows_(*qp_), warm_(warm), cfg_(config) {}

  MiqpResult Run();

 private:
  void ProcessNode(Node node);
  void VerifyShiftedIncumbent(const VectorXd& shifted);
  // Snaps binaries to 0/1, re-solving with them fixed if any was only
  // integral to tolerance. Returns false if that re-solve fails.
  bool Polish(const QpInstance& inst, const QpResult& relaxation, VectorXd* u, double* obj);
  void SetIncumbent(const VectorXd& u, double obj);
  QpResult SolveCounted(const QpInstance& inst, const WarmStartHint& hint, const QpOptions& opt);
  std::vector<PathStep> PathFrom(const std::shared_ptr<const PathRecord>& record) const;
  double lower_bound_now() const {
    return list_.empty() ? (incumbent_ ? ub_ : kInf) : list_.MinBound();
  }
  void SampleBounds() {
    if (cfg_.record_bounds) {
      result_.stats.bounds.push_back(
          {lower_bound_now() + qp_->constant, ub_ + qp_->constant, incumbent_.has_value()});
    }
  }

  std::shared_ptr<const CondensedQp> qp_;
  QpSolver solver_;
  SparseRows rows_;
  const WarmStart* warm_;
  SolverConfig cfg_;

  MiqpResult result_;
  BoundState root_bounds_;
  PseudoCostTable pc_;
  NodeList list_;
  double ub_ = kInf;
  std::optional<VectorXd> incumbent_;
  std::vector<PathStep> incumbent_path_;
  bool warm_tree_used_ = false;
};

QpResult BranchAndBound::SolveCounted(const QpInstance& inst, const WarmStartHint& hint,
                                      const QpOptions& opt) {
  QpResult res = solver_.Solve(inst, hint, opt);
  ++result_.stats.qp_solves;
  result_.stats.qp_iterations += res.iterations;
  return res;
}

std::vector<PathStep> BranchAndBound::PathFrom(
    const std::shared_ptr<const PathRecord>& record) const {
  std::vector<PathStep> steps;
  for (const PathRecord* r = record.get(); r; r = r->parent.get()) {
    if (!r->decision) continue;
    steps.push_back({qp_->control_id(r->decision->var), r->decision->dir, r->relaxation});
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

bool BranchAndBound::Polish(const QpInstance& inst, const QpResult& relaxation, VectorXd* u,
                            double* obj) {
  *u = relaxation.solution;
  *obj = relaxation.objective;
  std::vector<BoundOverride> fix;
  for (int j : qp_->binaries) {
    const double v = std::round((*u)[j]);
    if ((*u)[j] != v && inst.lower()[j] != inst.upper()[j]) fix.push_back({j, v, v});
  }
  if (!fix.empty()) {
    WarmStartHint hint;
    hint.primal = relaxation.solution;
    hint.active_set = relaxation.active_set;
    const QpResult res = SolveCounted(UpdateBounds(inst, fix), hint, cfg_.qp);
    if (res.status != QpStatus::kOptimal) return false;
    *u = res.solution;
  }
  for (int j : qp_->binaries) (*u)[j] = std::round((*u)[j]);
  *obj = qp_->Objective(*u);
  return true;
}

void BranchAndBound::SetIncumbent(const VectorXd& u, double obj) {
  ub_ = obj;
  incumbent_ = u;
  result_.stats.bound_prunes += list_.PruneAbove(ub_ - cfg_.eps_gap);
}

void BranchAndBound::VerifyShiftedIncumbent(const VectorXd& shifted) {
  if (shifted.size() != qp_->num_vars()) return;
  const VectorXd u = shifted.cwiseMax(qp_->var_lower).cwiseMin(qp_->var_upper);
  BoundState b = root_bounds_;
  b.ClearDirty();
  for (int j : qp_->binaries) {
    const double v = std::round(u[j]);
    if (v < b.lower[j] || v > b.upper[j]) return;
    b.lower[j] = b.upper[j] = v;
    b.changed[j] = 1;
  }
  if (cfg_.presolve) {
    b = Propagate(*qp_, rows_, b, cfg_.propagation);
    if (!b.consistent()) return;
  }
  WarmStartHint hint;
  hint.primal = u;
  const QpResult res = SolveCounted(QpInstance(qp_, b.lower, b.upper), hint, cfg_.qp);
  if (res.status != QpStatus::kOptimal) return;
  VectorXd sol = res.solution;
  for (int j : qp_->binaries) sol[j] = std::round(sol[j]);
  SetIncumbent(sol, qp_->Objective(sol));
  result_.stats.warm_incumbent = true;
  incumbent_path_ = warm_->path.steps;
}

void BranchAndBound::ProcessNode(Node node) {
  SolveStats& stats = result_.stats;
  if (node.known_infeasible) {
    ++stats.infeasible_prunes;
    return;
  }
  if (node.lower_bound > ub_ - cfg_.eps_gap) {
    ++stats.bound_prunes;
    return;
  }

  BoundState b = root_bounds_;
  b.ClearDirty();
  for (const BranchDecision& f : node.fixings) {
    const double v = BranchValue(f.dir);
    if (v < b.lower[f.var] || v > b.upper[f.var]) {
      ++stats.infeasible_prunes;
      return;
    }
    b.lower[f.var] = b.upper[f.var] = v;
    b.changed[f.var] = 1;
  }
  if (cfg_.presolve) {
    PropagationStats ps;
    b = Propagate(*qp_, rows_, b, cfg_.propagation, &ps);
    stats.presolve_fixings += ps.fixings;
    if (!b.consistent()) {
      ++stats.infeasible_prunes;
      return;
    }
  }

  const QpInstance inst(qp_, b.lower, b.upper);
  ++stats.nodes;
  QpResult res = SolveCounted(inst, node.hint ? *node.hint : WarmStartHint{}, cfg_.qp);
  if (res.status == QpStatus::kIterationLimit) {
    ++stats.qp_iteration_limits;
    QpOptions retry = cfg_.qp;
    retry.max_iterations = 10 * solver_.default_max_iterations();
    res = SolveCounted(inst, {}, retry);
    if (res.status == QpStatus::kIterationLimit) return;
  }

  if (node.origin && res.status == QpStatus::kOptimal) {
    UpdatePseudoCost(pc_, qp_->control_id(node.origin->var), node.origin->dir,
                     res.objective - node.origin->parent_objective, node.origin->distance);
  }

  switch (PruneCheck(res, ub_, cfg_.eps_gap)) {
    case PruneDecision::kPruneInfeasible: ++stats.infeasible_prunes; return;
    case PruneDecision::kPruneBound: ++stats.bound_prunes; return;
    case PruneDecision::kKeep: break;
  }

  auto record = std::make_shared<PathRecord>();
  record->parent = node.path;
  if (!node.fixings.empty()) record->decision = node.fixings.back();
  record->relaxation = res.solution;
  if (node.depth == 0 && !result_.artifacts.root_relaxation) result_.artifacts.root_relaxation = res;

  const std::vector<int> cands = FractionalCandidates(inst, res, cfg_.branching.int_tol);
  if (cands.empty()) {
    VectorXd u;
    double obj;
    if (Polish(inst, res, &u, &obj) && obj < ub_) {
      SetIncumbent(u, obj);
      incumbent_path_ = PathFrom(record);
    }
    return;
  }

  if (node.depth == 0 && warm_ && !warm_tree_used_) {
    warm_tree_used_ = true;
    WarmTreeConfig wcfg;
    wcfg.int_tol = cfg_.branching.int_tol;
    wcfg.score_eps = cfg_.branching.score_eps;
    std::optional<WarmTree> tree = BuildWarmTree(warm_->path, *qp_, res, pc_, wcfg, record);
    if (tree && !tree->nodes.empty()) {
      stats.warm_nodes = static_cast<int>(tree->nodes.size());
      for (Node& n : tree->nodes) list_.Push(std::move(n));
      return;
    }
  }

  SelectionStats ss;
  BranchCandidate c = SelectVariable(solver_, inst, res, pc_, cfg_.branching, &ss);
  stats.qp_solves += ss.qp_solves;
  stats.qp_iterations += ss.qp_iterations;
  stats.strong_branch_qps += ss.qp_solves;
  stats.branch_sequence.push_back(c.var);

  if (c.strong && c.strong->down_infeasible() && c.strong->up_infeasible()) {
    ++stats.infeasible_prunes;
    return;
  }

  const double v = c.value;
  const PseudoCost* pc = pc_.Find(qp_->control_id(c.var));
  const double phi_down = pc ? pc->down : 0.0;
  const double phi_up = pc ? pc->up : 0.0;

  auto parent_hint = std::make_shared<WarmStartHint>();
  parent_hint->primal = res.solution;
  parent_hint->active_set = res.active_set;

  auto make_child = [&](BranchDirection dir) {
    Node child;
    child.fixings = node.fixings;
    child.fixings.push_back({c.var, dir});
    child.depth = node.depth + 1;
    child.lower_bound = res.objective;
    child.path = record;
    child.origin = BranchOrigin{c.var, dir, res.objective, dir == BranchDirection::kUp ? 1.0 - v : v};
    child.hint = parent_hint;
    if (c.strong) {
      const QpResult& sr = dir == BranchDirection::kUp ? c.strong->up : c.strong->down;
      child.known_infeasible = sr.status == QpStatus::kInfeasible;
      if (sr.status == QpStatus::kOptimal) {
        auto h = std::make_shared<WarmStartHint>();
        h->primal = sr.solution;
        h->active_set = sr.active_set;
        child.hint = h;
      }
    }
    return child;
  };

  // The child pushed last is explored first.
  if ((1.0 - v) * phi_up < v * phi_down) {
    list_.Push(make_child(BranchDirection::kDown));
    list_.Push(make_child(BranchDirection::kUp));
  } else {
    list_.Push(make_child(BranchDirection::kUp));
    list_.Push(make_child(BranchDirection::kDown));
  }
}

MiqpResult BranchAndBound::Run() {
  const auto start = std::chrono::steady_clock::now();
  SolveStats& stats = result_.stats;

  root_bounds_ = InitialBounds(*qp_);
  if (cfg_.presolve && root_bounds_.consistent()) {
    PropagationStats ps;
    root_bounds_ = Propagate(*qp_, rows_, root_bounds_, cfg_.propagation, &ps);
    stats.presolve_fixings += ps.fixings;
  }
  root_bounds_.ClearDirty();
  if (root_bounds_.consistent() && cfg_.optimality_fixing) {
    int fixed = 0;
    root_bounds_ = FixByOptimality(*qp_, rows_, root_bounds_, cfg_.propagation, &fixed);
    root_bounds_.ClearDirty();
    stats.optimality_fixings = fixed;
  }

  if (!root_bounds_.consistent()) {
    ++stats.infeasible_prunes;
  } else {
    if (warm_) pc_ = warm_->pseudo_costs;
    pc_.set_record_history(cfg_.record_pseudo_cost_history);
    if (warm_ && warm_->path.incumbent) VerifyShiftedIncumbent(*warm_->path.incumbent);
    list_.Push(Node{});
  }

  Termination term = Termination::kGapClosed;
  bool stopped = false;
  while (!list_.empty()) {
    SampleBounds();
    if (cfg_.max_iterations > 0 && stats.nodes >= cfg_.max_iterations) {
      term = Termination::kIterationCap;
      stopped = true;
      break;
    }
    if (cfg_.node_memory_cap > 0 && static_cast<int>(list_.size()) > cfg_.node_memory_cap) {
      term = Termination::kMemoryCap;
      stopped = true;
      break;
    }
    ProcessNode(list_.PopNext(incumbent_.has_value()));
  }
  if (!stopped) term = incumbent_ ? Termination::kGapClosed : Termination::kInfeasible;
  SampleBounds();

  stats.termination = term;
  stats.lower_bound = std::min(lower_bound_now(), ub_) + qp_->constant;
  stats.upper_bound = ub_ + qp_->constant;
  result_.artifacts.pseudo_costs = pc_;
  if (incumbent_) {
    result_.solution = Expand(*qp_, *incumbent_);
    result_.artifacts.incumbent = incumbent_;
    result_.artifacts.path = incumbent_path_;
  }
  stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return std::move(result_);
}

}  // namespace

MiqpResult SolveMiqp(std::shared_ptr<const CondensedQp> qp, const WarmStart* warm,
                     const SolverConfig& config) {
  return BranchAndBound(std::move(qp), warm, config).Run();
}

MiqpResult SolveMiqp(const OcpMiqp& prob, const VectorXd& initial_state, const WarmStart* warm,
                     const SolverConfig& config) {
  return SolveMiqp(std::make_shared<const CondensedQp>(Condense(prob, initial_state)), warm,
                   config);
}

}  // namespace mimpc
