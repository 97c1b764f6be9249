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

#include "mimpc/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mimpc {

std::string ToString(ConstraintId id) {
  static const char* kNames[] = {"var_lower", "var_upper", "row_lower", "row_upper"};
  std::ostringstream os;
  os << kNames[static_cast<int>(id.kind)] << "[" << id.index << "]";
  return os.str();
}

const char* ToString(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

QpInstance::QpInstance(std::shared_ptr<const CondensedQp> qp)
    : qp_(std::move(qp)), lower_(qp_->var_lower), upper_(qp_->var_upper) {}

QpInstance::QpInstance(std::shared_ptr<const CondensedQp> qp, VectorXd lower, VectorXd upper)
    : qp_(std::move(qp)), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != qp_->num_vars() || upper_.size() != qp_->num_vars()) {
    throw std::invalid_argument("bound vectors have wrong size");
  }
  for (int j = 0; j < qp_->num_vars(); ++j) {
    if (lower_[j] < qp_->var_lower[j] || upper_[j] > qp_->var_upper[j]) {
      throw std::invalid_argument("instance bounds must not loosen the problem bounds");
    }
  }
}

QpInstance UpdateBounds(const QpInstance& inst, const std::vector<BoundOverride>& overrides) {
  VectorXd lower = inst.lower();
  VectorXd upper = inst.upper();
  for (const BoundOverride& o : overrides) {
    if (o.var < 0 || o.var >= inst.qp().num_vars()) {
      throw std::invalid_argument("bound override for out-of-range variable " +
                                  std::to_string(o.var));
    }
    if (o.lower < lower[o.var] || o.upper > upper[o.var]) {
      throw std::invalid_argument("bound override loosens variable " + std::to_string(o.var));
    }
    lower[o.var] = o.lower;
    upper[o.var] = o.upper;
  }
  return QpInstance(inst.shared_qp(), std::move(lower), std::move(upper));
}

QpSolver::QpSolver(std::shared_ptr<const CondensedQp> qp) : qp_(std::move(qp)) {
  const int n = qp_->num_vars();
  Eigen::LLT<MatrixXd> llt(qp_->hessian);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("condensed Hessian is not positive definite");
  }
  const MatrixXd l = llt.matrixL();
  inv_chol_t_ = l.transpose().triangularView<Eigen::Upper>().solve(MatrixXd::Identity(n, n));
  unconstrained_ = -llt.solve(qp_->gradient);
}

int QpSolver::default_max_iterations() const {
  return 100 * (qp_->num_vars() + qp_->num_rows());
}

double QpSolver::NormalDot(ConstraintId id, const VectorXd& u) const {
  switch (id.kind) {
    case ConstraintKind::kVarLower: return u[id.index];
    case ConstraintKind::kVarUpper: return -u[id.index];
    case ConstraintKind::kRowLower: return qp_->rows.row(id.index).dot(u);
    case ConstraintKind::kRowUpper: return -qp_->rows.row(id.index).dot(u);
  }
  return 0.0;
}

double QpSolver::Rhs(ConstraintId id, const VectorXd& lower, const VectorXd& upper) const {
  switch (id.kind) {
    case ConstraintKind::kVarLower: return lower[id.index];
    case ConstraintKind::kVarUpper: return -upper[id.index];
    case ConstraintKind::kRowLower: return qp_->row_lower[id.index];
    case ConstraintKind::kRowUpper: return -qp_->row_upper[id.index];
  }
  return -kInf;
}

// Workspace of one solve. Keeps J = L^{-T} Q and the upper-triangular R of the
// QR factorization of L^{-1} N_A, where N_A holds the active normals.
class GoldfarbIdnani {
 public:
  GoldfarbIdnani(const QpSolver& solver, const QpInstance& inst, const QpOptions& options)
      : s_(solver),
        qp_(solver.qp()),
        lower_(inst.lower()),
        upper_(inst.upper()),
        opt_(options),
        n_(qp_.num_vars()),
        j_(solver.inv_chol_t_),
        r_(MatrixXd::Zero(n_, n_)) {
    max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations : solver.default_max_iterations();
  }

  QpResult Run(const WarmStartHint& hint);

 private:
  VectorXd TransformedNormal(ConstraintId id) const {
    switch (id.kind) {
      case ConstraintKind::kVarLower: return j_.row(id.index).transpose();
      case ConstraintKind::kVarUpper: return -j_.row(id.index).transpose();
      case ConstraintKind::kRowLower: return j_.transpose() * qp_.rows.row(id.index).transpose();
      case ConstraintKind::kRowUpper: return -(j_.transpose() * qp_.rows.row(id.index).transpose());
    }
    return VectorXd();
  }
  double Rhs(ConstraintId id) const { return s_.Rhs(id, lower_, upper_); }
  double Slack(ConstraintId id) const { return s_.NormalDot(id, x_) - Rhs(id); }
  double Tolerance(ConstraintId id) const {
    return opt_.feasibility_tol * std::max(1.0, std::abs(Rhs(id)));
  }
  double NormalNorm(ConstraintId id) const {
    if (id.kind == ConstraintKind::kVarLower || id.kind == ConstraintKind::kVarUpper) return 1.0;
    return std::max(1e-300, qp_.rows.row(id.index).norm());
  }

  bool AddConstraint(VectorXd& d, double dependency_tol);
  void DeleteConstraint(int pos);
  void SolveEqualityProblem();
  std::optional<ConstraintId> PickViolated(const std::set<ConstraintId>& preferred) const;
  std::vector<ConstraintId> AllConstraints() const;
  QpResult Finish(QpStatus status);

  const QpSolver& s_;
  const CondensedQp& qp_;
  const VectorXd& lower_;
  const VectorXd& upper_;
  QpOptions opt_;
  int n_;
  int max_iter_ = 0;
  int iterations_ = 0;
  MatrixXd j_;
  MatrixXd r_;
  double r_norm_ = 1.0;
  std::vector<ConstraintId> active_;
  std::vector<double> mult_;
  VectorXd x_;
  double f_ = 0.0;
  std::optional<InfeasibilityCertificate> certificate_;
};

bool GoldfarbIdnani::AddConstraint(VectorXd& d, double dependency_tol) {
  const int q = static_cast<int>(active_.size());
  // Givens rotations zero d[q+1..n-1] and are accumulated into J.
  for (int jj = n_ - 1; jj > q; --jj) {
    double cc = d[jj - 1];
    double ss = d[jj];
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    d[jj] = 0.0;
    ss /= h;
    cc /= h;
    if (cc < 0.0) {
      cc = -cc;
      ss = -ss;
      d[jj - 1] = -h;
    } else {
      d[jj - 1] = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = 0; k < n_; ++k) {
      const double t1 = j_(k, jj - 1);
      const double t2 = j_(k, jj);
      j_(k, jj - 1) = t1 * cc + t2 * ss;
      j_(k, jj) = xny * (t1 + j_(k, jj - 1)) - t2;
    }
  }
  if (q >= n_ || std::abs(d[q]) <= dependency_tol * r_norm_) return false;
  r_.col(q).head(q + 1) = d.head(q + 1);
  r_norm_ = std::max(r_norm_, std::abs(d[q]));
  return true;
}

void GoldfarbIdnani::DeleteConstraint(int pos) {
  const int q = static_cast<int>(active_.size());
  for (int i = pos; i < q - 1; ++i) r_.col(i) = r_.col(i + 1);
  r_.col(q - 1).setZero();
  active_.erase(active_.begin() + pos);
  mult_.erase(mult_.begin() + pos);
  const int nq = q - 1;
  // Restore triangularity of R with rotations that also act on J.
  for (int jj = pos; jj < nq; ++jj) {
    double cc = r_(jj, jj);
    double ss = r_(jj + 1, jj);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    cc /= h;
    ss /= h;
    r_(jj + 1, jj) = 0.0;
    if (cc < 0.0) {
      r_(jj, jj) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      r_(jj, jj) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = jj + 1; k < nq; ++k) {
      const double t1 = r_(jj, k);
      const double t2 = r_(jj + 1, k);
      r_(jj, k) = t1 * cc + t2 * ss;
      r_(jj + 1, k) = xny * (t1 + r_(jj, k)) - t2;
    }
    for (int k = 0; k < n_; ++k) {
      const double t1 = j_(k, jj);
      const double t2 = j_(k, jj + 1);
      j_(k, jj) = t1 * cc + t2 * ss;
      j_(k, jj + 1) = xny * (j_(k, jj) + t1) - t2;
    }
  }
}

// Minimizer and multipliers of the QP restricted to N_A' x = b_A.
void GoldfarbIdnani::SolveEqualityProblem() {
  const int q = static_cast<int>(active_.size());
  VectorXd b(q);
  for (int i = 0; i < q; ++i) b[i] = Rhs(active_[i]);
  const auto rq = r_.topLeftCorner(q, q).triangularView<Eigen::Upper>();
  const VectorXd w = rq.transpose().solve(b);
  const auto j1 = j_.leftCols(q);
  const auto j2 = j_.rightCols(n_ - q);
  x_ = j1 * w - j2 * (j2.transpose() * qp_.gradient);
  const VectorXd m = rq.solve(w + j1.transpose() * qp_.gradient);
  mult_.assign(m.data(), m.data() + q);
  f_ = 0.5 * x_.dot(qp_.hessian * x_) + qp_.gradient.dot(x_);
}

std::vector<ConstraintId> GoldfarbIdnani::AllConstraints() const {
  std::vector<ConstraintId> all;
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lower_[j])) all.push_back({ConstraintKind::kVarLower, j});
    if (std::isfinite(upper_[j])) all.push_back({ConstraintKind::kVarUpper, j});
  }
  for (int r = 0; r < qp_.num_rows(); ++r) {
    if (std::isfinite(qp_.row_lower[r])) all.push_back({ConstraintKind::kRowLower, r});
    if (std::isfinite(qp_.row_upper[r])) all.push_back({ConstraintKind::kRowUpper, r});
  }
  return all;
}

std::optional<ConstraintId> GoldfarbIdnani::PickViolated(
    const std::set<ConstraintId>& preferred) const {
  std::optional<ConstraintId> best;
  std::optional<ConstraintId> best_preferred;
  double worst = 0.0;
  double worst_preferred = 0.0;
  std::set<ConstraintId> active(active_.begin(), active_.end());
  auto consider = [&](ConstraintId id, double slack) {
    if (slack >= -Tolerance(id) || active.count(id)) return;
    const double v = -slack / NormalNorm(id);
    // Strict comparison keeps the lowest index on ties.
    if (v > worst) {
      worst = v;
      best = id;
    }
    if (preferred.count(id) && v > worst_preferred) {
      worst_preferred = v;
      best_preferred = id;
    }
  };
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lower_[j])) consider({ConstraintKind::kVarLower, j}, x_[j] - lower_[j]);
    if (std::isfinite(upper_[j])) consider({ConstraintKind::kVarUpper, j}, upper_[j] - x_[j]);
  }
  if (qp_.num_rows() > 0) {
    const VectorXd act = qp_.rows * x_;
    for (int r = 0; r < qp_.num_rows(); ++r) {
      if (std::isfinite(qp_.row_lower[r]))
        consider({ConstraintKind::kRowLower, r}, act[r] - qp_.row_lower[r]);
      if (std::isfinite(qp_.row_upper[r]))
        consider({ConstraintKind::kRowUpper, r}, qp_.row_upper[r] - act[r]);
    }
  }
  return best_preferred ? best_preferred : best;
}

QpResult GoldfarbIdnani::Finish(QpStatus status) {
  QpResult res;
  res.status = status;
  res.solution = x_;
  res.iterations = iterations_;
  if (status == QpStatus::kOptimal) {
    res.objective = 0.5 * x_.dot(qp_.hessian * x_) + qp_.gradient.dot(x_);
    std::vector<size_t> perm(active_.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](size_t a, size_t b) { return active_[a] < active_[b]; });
    for (size_t i : perm) {
      res.active_set.push_back(active_[i]);
      res.multipliers.push_back(std::max(0.0, mult_[i]));
    }
  } else if (status == QpStatus::kIterationLimit) {
    res.objective = f_;
    res.active_set = active_;
    res.multipliers = mult_;
  } else {
    res.objective = kInf;
    res.certificate = certificate_;
  }
  return res;
}

QpResult GoldfarbIdnani::Run(const WarmStartHint& hint) {
  // Contradictory bounds need no iterations.
  for (int j = 0; j < n_; ++j) {
    if (lower_[j] > upper_[j] + opt_.feasibility_tol * std::max(1.0, std::abs(lower_[j]))) {
      certificate_ = InfeasibilityCertificate{
          {{ConstraintKind::kVarLower, j}, {ConstraintKind::kVarUpper, j}}, {1.0, 1.0}};
      x_ = s_.unconstrained_;
      return Finish(QpStatus::kInfeasible);
    }
  }
  for (int r = 0; r < qp_.num_rows(); ++r) {
    if (qp_.row_lower[r] > qp_.row_upper[r] + opt_.feasibility_tol * std::max(1.0, std::abs(qp_.row_lower[r]))) {
      certificate_ = InfeasibilityCertificate{
          {{ConstraintKind::kRowLower, r}, {ConstraintKind::kRowUpper, r}}, {1.0, 1.0}};
      x_ = s_.unconstrained_;
      return Finish(QpStatus::kInfeasible);
    }
  }

  x_ = s_.unconstrained_;
  f_ = 0.5 * qp_.gradient.dot(x_);

  // Warm start: factorize the hinted working set, then drop constraints with
  // negative multipliers until (x, A) is optimal for the constraints in A.
  std::set<ConstraintId> preferred;
  if (!hint.empty()) {
    std::vector<ConstraintId> candidates;
    std::set<ConstraintId> seen;
    auto usable = [&](ConstraintId id) {
      const bool var = id.kind == ConstraintKind::kVarLower || id.kind == ConstraintKind::kVarUpper;
      if (id.index < 0 || id.index >= (var ? n_ : qp_.num_rows())) return false;
      return std::isfinite(Rhs(id)) && seen.insert(id).second;
    };
    for (ConstraintId id : hint.active_set) {
      if (usable(id)) candidates.push_back(id);
    }
    if (hint.primal && hint.primal->size() == n_) {
      for (ConstraintId id : AllConstraints()) {
        const double slack = s_.NormalDot(id, *hint.primal) - Rhs(id);
        if (std::abs(slack) <= 1e-7 * std::max(1.0, std::abs(Rhs(id))) && usable(id)) {
          candidates.push_back(id);
        }
      }
    }
    for (ConstraintId id : candidates) {
      preferred.insert(id);
      VectorXd d = TransformedNormal(id);
      if (AddConstraint(d, 1e-9)) {
        active_.push_back(id);
        mult_.push_back(0.0);
      }
    }
    if (!active_.empty()) {
      for (;;) {
        SolveEqualityProblem();
        int drop = -1;
        double most_negative = -opt_.dual_tol;
        for (size_t i = 0; i < mult_.size(); ++i) {
          if (mult_[i] < most_negative) {
            most_negative = mult_[i];
            drop = static_cast<int>(i);
          }
        }
        if (drop < 0) break;
        DeleteConstraint(drop);
        ++iterations_;
      }
      if (active_.empty()) {
        x_ = s_.unconstrained_;
        f_ = 0.5 * qp_.gradient.dot(x_);
      }
      for (double& m : mult_) m = std::max(m, 0.0);
    }
  }

  for (;;) {
    if (iterations_ >= max_iter_) return Finish(QpStatus::kIterationLimit);
    const std::optional<ConstraintId> picked = PickViolated(preferred);
    if (!picked) return Finish(QpStatus::kOptimal);
    const ConstraintId p = *picked;
    double slack = Slack(p);
    double pending = 0.0;

    for (;;) {
      const int q = static_cast<int>(active_.size());
      VectorXd d = TransformedNormal(p);
      const VectorXd z = j_.rightCols(n_ - q) * d.tail(n_ - q);
      VectorXd r = r_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));

      double t_partial = kInf;
      int block = -1;
      for (int k = 0; k < q; ++k) {
        if (r[k] > 0.0) {
          const double ratio = mult_[k] / r[k];
          if (ratio < t_partial) {
            t_partial = ratio;
            block = k;
          }
        }
      }
      const double curvature = d.tail(n_ - q).squaredNorm();
      const double t_full = curvature > 1e-14 * d.squaredNorm() ? -slack / curvature : kInf;

      if (!std::isfinite(t_partial) && !std::isfinite(t_full)) {
        // n_p is a nonpositive combination of active normals: infeasible.
        InfeasibilityCertificate cert;
        cert.constraints.push_back(p);
        cert.weights.push_back(1.0);
        for (int k = 0; k < q; ++k) {
          cert.constraints.push_back(active_[k]);
          cert.weights.push_back(std::max(0.0, -r[k]));
        }
        certificate_ = std::move(cert);
        return Finish(QpStatus::kInfeasible);
      }
      if (!std::isfinite(t_full)) {
        // Step in dual space only.
        for (int k = 0; k < q; ++k) mult_[k] -= t_partial * r[k];
        pending += t_partial;
        DeleteConstraint(block);
        ++iterations_;
        if (iterations_ >= max_iter_) return Finish(QpStatus::kIterationLimit);
        continue;
      }
      const double t = std::min(t_partial, t_full);
      x_ += t * z;
      f_ += t * curvature * (0.5 * t + pending);
      for (int k = 0; k < q; ++k) mult_[k] -= t * r[k];
      pending += t;
      ++iterations_;
      if (t_full <= t_partial) {
        if (AddConstraint(d, 1e-14)) {
          active_.push_back(p);
          mult_.push_back(pending);
        }
        break;
      }
      DeleteConstraint(block);
      if (iterations_ >= max_iter_) return Finish(QpStatus::kIterationLimit);
      slack = Slack(p);
    }
  }
}

QpResult QpSolver::Solve(const QpInstance& inst, const WarmStartHint& hint,
                         const QpOptions& options) const {
  if (inst.lower().size() != qp_->num_vars()) {
    throw std::invalid_argument("instance does not belong to this solver");
  }
  GoldfarbIdnani gi(*this, inst, options);
  return gi.Run(hint);
}

}  // namespace mimpc
