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

#include "mimpc/presolve.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mimpc {
namespace {

// Relative magnitude below which a condensed coefficient is structural zero.
constexpr double kZeroCoef = 1e-12;

struct Activity {
  double min_finite = 0.0;
  double max_finite = 0.0;
  int min_inf = 0;
  int max_inf = 0;
};

double MinContribution(double coef, double lo, double hi) {
  return coef > 0.0 ? coef * lo : coef * hi;
}
double MaxContribution(double coef, double lo, double hi) {
  return coef > 0.0 ? coef * hi : coef * lo;
}

Activity RowActivity(const std::vector<SparseRows::Entry>& row, const VectorXd& lo,
                     const VectorXd& hi) {
  Activity a;
  for (const auto& e : row) {
    const double mn = MinContribution(e.coef, lo[e.col], hi[e.col]);
    const double mx = MaxContribution(e.coef, lo[e.col], hi[e.col]);
    if (std::isfinite(mn)) a.min_finite += mn; else ++a.min_inf;
    if (std::isfinite(mx)) a.max_finite += mx; else ++a.max_inf;
  }
  return a;
}

class Propagator {
 public:
  Propagator(const CondensedQp& qp, const SparseRows& rows, const PropagationConfig& config,
             BoundState& state)
      : qp_(qp), rows_(rows), cfg_(config), st_(state) {}

  void Run(PropagationStats* stats);

 private:
  // Returns true if the bound moved.
  bool Tighten(int col, double candidate, bool upper_side);
  void ProcessRow(int r, std::set<int>& touched);

  const CondensedQp& qp_;
  const SparseRows& rows_;
  const PropagationConfig& cfg_;
  BoundState& st_;
  int tightenings_ = 0;
  int fixings_ = 0;
};

bool Propagator::Tighten(int col, double candidate, bool upper_side) {
  if (!std::isfinite(candidate)) return false;
  double& lo = st_.lower[col];
  double& hi = st_.upper[col];
  const bool was_fixed = lo == hi;
  if (qp_.is_binary[col]) {
    candidate = upper_side ? std::floor(candidate + cfg_.int_tol)
                           : std::ceil(candidate - cfg_.int_tol);
    if (upper_side ? candidate >= hi : candidate <= lo) return false;
  } else {
    // Relax by round-off so that bounds never cut off a feasible point.
    candidate += (upper_side ? 1.0 : -1.0) * 1e-12 * (1.0 + std::abs(candidate));
    const double gain = upper_side ? hi - candidate : candidate - lo;
    const double scale = std::max(1.0, std::abs(candidate));
    if (!(gain > cfg_.min_change * scale)) return false;
  }
  (upper_side ? hi : lo) = candidate;
  ++tightenings_;
  if (lo > hi) {
    if (lo - hi > cfg_.feas_tol * std::max(1.0, std::abs(lo))) {
      st_.status = BoundStatus::kInfeasible;
    } else if (upper_side) {
      hi = lo;  // keeps both bounds inside the previous interval
    } else {
      lo = hi;
    }
  }
  if (!was_fixed && lo == hi) ++fixings_;
  st_.changed[col] = 1;
  return true;
}

void Propagator::ProcessRow(int r, std::set<int>& touched) {
  const auto& row = rows_.row(r);
  const double lb = qp_.row_lower[r];
  const double ub = qp_.row_upper[r];
  Activity act = RowActivity(row, st_.lower, st_.upper);

  for (const auto& e : row) {
    if (!st_.consistent()) return;
    const double lo = st_.lower[e.col];
    const double hi = st_.upper[e.col];
    bool moved = false;
    // d_i u_i <= ub - (min activity of the other entries).
    if (std::isfinite(ub)) {
      const double own = MinContribution(e.coef, lo, hi);
      const int others_inf = act.min_inf - (std::isfinite(own) ? 0 : 1);
      if (others_inf == 0) {
        const double rest = std::isfinite(own) ? act.min_finite - own : act.min_finite;
        const double bound = (ub - rest) / e.coef;
        moved |= Tighten(e.col, bound, e.coef > 0.0);
      }
    }
    if (!st_.consistent()) return;
    // d_i u_i >= lb - (max activity of the other entries).
    if (std::isfinite(lb)) {
      const double lo2 = st_.lower[e.col];
      const double hi2 = st_.upper[e.col];
      const double own = MaxContribution(e.coef, lo2, hi2);
      Activity cur = moved ? RowActivity(row, st_.lower, st_.upper) : act;
      const int others_inf = cur.max_inf - (std::isfinite(own) ? 0 : 1);
      if (others_inf == 0) {
        const double rest = std::isfinite(own) ? cur.max_finite - own : cur.max_finite;
        const double bound = (lb - rest) / e.coef;
        moved |= Tighten(e.col, bound, e.coef < 0.0);
      }
    }
    if (moved) {
      touched.insert(e.col);
      act = RowActivity(row, st_.lower, st_.upper);
    }
  }
}

void Propagator::Run(PropagationStats* stats) {
  std::set<int> dirty_rows;
  for (int j = 0; j < static_cast<int>(st_.changed.size()); ++j) {
    if (st_.changed[j]) {
      for (int r : rows_.rows_of(j)) dirty_rows.insert(r);
    }
  }
  st_.ClearDirty();
  for (int j = 0; j < qp_.num_vars(); ++j) {
    if (st_.lower[j] > st_.upper[j] + cfg_.feas_tol * std::max(1.0, std::abs(st_.lower[j]))) {
      st_.status = BoundStatus::kInfeasible;
    }
  }

  int passes = 0;
  bool converged = dirty_rows.empty();
  while (st_.consistent() && !dirty_rows.empty()) {
    if (passes >= cfg_.max_passes) break;
    ++passes;
    std::set<int> touched;
    for (int r : dirty_rows) {
      ProcessRow(r, touched);
      if (!st_.consistent()) break;
    }
    dirty_rows.clear();
    for (int j : touched) {
      for (int r : rows_.rows_of(j)) dirty_rows.insert(r);
    }
    if (touched.empty()) converged = true;
  }
  if (stats) {
    stats->passes = passes;
    stats->tightenings = tightenings_;
    stats->fixings = fixings_;
    stats->converged = converged || !st_.consistent();
  }
}

}  // namespace

BoundState InitialBounds(const CondensedQp& qp) {
  BoundState s;
  s.lower = qp.var_lower;
  s.upper = qp.var_upper;
  s.changed.assign(static_cast<size_t>(qp.num_vars()), 1);
  for (int j = 0; j < qp.num_vars(); ++j) {
    if (s.lower[j] > s.upper[j]) s.status = BoundStatus::kInfeasible;
  }
  return s;
}

SparseRows::SparseRows(const CondensedQp& qp)
    : rows_(static_cast<size_t>(qp.num_rows())), cols_(static_cast<size_t>(qp.num_vars())) {
  for (int r = 0; r < qp.num_rows(); ++r) {
    const double scale = qp.num_vars() > 0 ? qp.rows.row(r).cwiseAbs().maxCoeff() : 0.0;
    for (int c = 0; c < qp.num_vars(); ++c) {
      const double v = qp.rows(r, c);
      if (v != 0.0 && std::abs(v) > kZeroCoef * scale) {
        rows_[r].push_back({c, v});
        cols_[c].push_back(r);
        ++nnz_;
      }
    }
  }
}

BoundState Propagate(const CondensedQp& qp, const SparseRows& rows, const BoundState& bounds,
                     const PropagationConfig& config, PropagationStats* stats) {
  BoundState out = bounds;
  if (out.changed.size() != static_cast<size_t>(qp.num_vars())) {
    out.changed.assign(static_cast<size_t>(qp.num_vars()), 1);
  }
  if (!out.consistent()) return out;
  Propagator(qp, rows, config, out).Run(stats);
  return out;
}

BoundState Propagate(const CondensedQp& qp, const BoundState& bounds,
                     const PropagationConfig& config, PropagationStats* stats) {
  return Propagate(qp, SparseRows(qp), bounds, config, stats);
}

BoundState FixByOptimality(const CondensedQp& qp, const SparseRows& rows, const BoundState& bounds,
                           const PropagationConfig& config, int* num_fixed) {
  BoundState cur = bounds;
  int fixed = 0;
  if (!cur.consistent()) return cur;
  const int n = qp.num_vars();
  for (int j : qp.binaries) {
    if (cur.fixed(j)) continue;
    // Objective change of moving u_j from 0 to 1 with the rest of U in the box:
    //   h_j + H_jj / 2 + sum_{k != j} H_jk u_k.
    double lo_diff = qp.gradient[j] + 0.5 * qp.hessian(j, j);
    double hi_diff = lo_diff;
    for (int k = 0; k < n && std::isfinite(lo_diff); ++k) {
      const double h = qp.hessian(j, k);
      if (k == j || h == 0.0) continue;
      lo_diff += MinContribution(h, cur.lower[k], cur.upper[k]);
      hi_diff += MaxContribution(h, cur.lower[k], cur.upper[k]);
    }
    double preferred;
    if (std::isfinite(lo_diff) && lo_diff >= 0.0) {
      preferred = 0.0;
    } else if (std::isfinite(hi_diff) && hi_diff <= 0.0) {
      preferred = 1.0;
    } else {
      continue;
    }
    // Moving u_j toward `preferred` must never violate a row, otherwise a
    // feasible point with the other value may have no feasible counterpart.
    const double dir = preferred > 0.5 ? 1.0 : -1.0;
    bool locked = false;
    for (int r = 0; r < qp.num_rows() && !locked; ++r) {
      const double d = dir * qp.rows(r, j);
      locked = (d > 0.0 && std::isfinite(qp.row_upper[r])) ||
               (d < 0.0 && std::isfinite(qp.row_lower[r]));
    }
    if (locked) continue;
    BoundState trial = cur;
    trial.ClearDirty();
    trial.lower[j] = trial.upper[j] = preferred;
    trial.changed[j] = 1;
    BoundState after = Propagate(qp, rows, trial, config);
    if (!after.consistent()) continue;
    bool induced = false;
    for (int k = 0; k < n && !induced; ++k) {
      if (k == j) continue;
      induced = after.lower[k] != cur.lower[k] || after.upper[k] != cur.upper[k];
    }
    if (induced) continue;
    cur.lower[j] = cur.upper[j] = preferred;
    cur.changed[j] = 1;
    ++fixed;
  }
  if (num_fixed) *num_fixed = fixed;
  return cur;
}

}  // namespace mimpc
