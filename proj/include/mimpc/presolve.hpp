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

#ifndef MIMPC_PRESOLVE_HPP_
#define MIMPC_PRESOLVE_HPP_

#include <vector>

#include "mimpc/ocp_model.hpp"

namespace mimpc {

enum class BoundStatus { kConsistent, kInfeasible };

// Per-variable bounds of the condensed controls. `changed` doubles as the
// dirty set on input to Propagate() and as the set of tightened variables on
// output.
struct BoundState {
  VectorXd lower;
  VectorXd upper;
  std::vector<char> changed;
  BoundStatus status = BoundStatus::kConsistent;

  bool consistent() const { return status == BoundStatus::kConsistent; }
  bool fixed(int j) const { return lower[j] == upper[j]; }
  void MarkAllDirty() { changed.assign(changed.size(), 1); }
  void ClearDirty() { changed.assign(changed.size(), 0); }
};

// Root bounds of the condensed problem, every variable dirty.
BoundState InitialBounds(const CondensedQp& qp);

struct PropagationConfig {
  int max_passes = 10;
  double min_change = 1e-8;
  double feas_tol = 1e-9;
  double int_tol = 1e-6;
};

struct PropagationStats {
  int passes = 0;
  int tightenings = 0;
  int fixings = 0;
  bool converged = false;
};

// Nonzero pattern of the condensed constraint rows.
class SparseRows {
 public:
  explicit SparseRows(const CondensedQp& qp);

  struct Entry {
    int col;
    double coef;
  };
  const std::vector<Entry>& row(int r) const { return rows_[r]; }
  const std::vector<int>& rows_of(int col) const { return cols_[col]; }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int nnz() const { return nnz_; }

 private:
  std::vector<std::vector<Entry>> rows_;
  std::vector<std::vector<int>> cols_;
  int nnz_ = 0;
};

// Activity-based bound strengthening over the condensed rows. Only rows that
// touch a dirty variable are visited in the first sweep; later sweeps visit
// rows touching variables tightened in the previous sweep.
BoundState Propagate(const CondensedQp& qp, const SparseRows& rows, const BoundState& bounds,
                     const PropagationConfig& config = {}, PropagationStats* stats = nullptr);
BoundState Propagate(const CondensedQp& qp, const BoundState& bounds,
                     const PropagationConfig& config = {}, PropagationStats* stats = nullptr);

// Fixes free binaries whose objective preference is unambiguous over the
// current box and that no row blocks from moving toward the preferred value,
// keeping a fixing only if propagating it tightens no other variable.
BoundState FixByOptimality(const CondensedQp& qp, const SparseRows& rows, const BoundState& bounds,
                           const PropagationConfig& config = {}, int* num_fixed = nullptr);

}  // namespace mimpc

#endif  // MIMPC_PRESOLVE_HPP_
