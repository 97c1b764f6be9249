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

#include "mimpc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace mimpc {

namespace {

constexpr double kEarthMu = 3.986004418e14;    // m^3/s^2
constexpr double kEarthRadius = 6378137.0;     // m

// Row r of stage constraints applied to the next state: row * x_{i+1}.
void AddNextStateRow(const MatrixXd& a, const MatrixXd& b, const VectorXd& offset,
                     const VectorXd& state_row, const VectorXd& input_row, double lo, double hi,
                     std::vector<VectorXd>* c_rows, std::vector<VectorXd>* d_rows,
                     std::vector<double>* lower, std::vector<double>* upper) {
  c_rows->push_back(a.transpose() * state_row);
  d_rows->push_back(b.transpose() * state_row + input_row);
  const double shift = state_row.dot(offset);
  lower->push_back(lo - shift);
  upper->push_back(hi - shift);
}

}  // namespace

double OrbitalRate(double altitude_m) {
  const double r = kEarthRadius + altitude_m;
  return std::sqrt(kEarthMu / (r * r * r));
}

VectorXd DefaultSatelliteState() {
  VectorXd x(4);
  x << -260.0, 20.0, 0.15, -0.05;
  return x;
}

bool InsideWindow(const SatelliteConfig& config, const VectorXd& state, double tol) {
  return std::abs(state[0]) <= config.window_x + tol && std::abs(state[1]) <= config.window_y + tol;
}

bool InsideZone(const SatelliteConfig& config, const VectorXd& state, double tol) {
  const Zone& z = config.zone;
  return state[0] > z.x_lo + tol && state[0] < z.x_hi - tol && state[1] > z.y_lo + tol &&
         state[1] < z.y_hi - tol;
}

SatelliteScenario MakeSatellite(const SatelliteConfig& config) {
  const Zone& zone = config.zone;
  if (!(config.ts > 0.0)) throw std::invalid_argument("sampling period must be positive");
  if (!(config.altitude_m > -kEarthRadius)) throw std::invalid_argument("invalid altitude");
  if (config.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(config.window_x > 0.0 && config.window_y > 0.0)) {
    throw std::invalid_argument("window must have positive extent");
  }
  if (!(zone.x_lo < zone.x_hi && zone.y_lo < zone.y_hi && zone.x_lo > -config.window_x &&
        zone.x_hi < config.window_x && zone.y_lo > -config.window_y &&
        zone.y_hi < config.window_y)) {
    throw std::invalid_argument("exclusion zone must lie strictly inside the window");
  }

  SatelliteScenario sc;
  sc.config = config;
  if (sc.config.initial_state.size() == 0) sc.config.initial_state = DefaultSatelliteState();
  const VectorXd& x0 = sc.config.initial_state;
  if (x0.size() != 4) throw std::invalid_argument("initial state must have 4 entries");
  if (!InsideWindow(sc.config, x0, 0.0) || InsideZone(sc.config, x0, 0.0)) {
    throw std::invalid_argument("initial state must be inside the window and outside the zone");
  }

  const double n = OrbitalRate(config.altitude_m);
  sc.orbital_rate = n;
  const double f = config.thrust_accel;
  const double tan_a = std::tan(config.gimbal_half_angle_deg * std::numbers::pi / 180.0);
  constexpr int nx = 4;
  constexpr int nu = kSatelliteInputs;

  MatrixXd ac = MatrixXd::Zero(nx, nx);
  ac(0, 2) = 1.0;
  ac(1, 3) = 1.0;
  ac(2, 3) = -2.0 * n;
  ac(3, 1) = 3.0 * n * n;
  ac(3, 2) = 2.0 * n;
  MatrixXd bc = MatrixXd::Zero(nx, nu);
  bc(2, kT1) = f;
  bc(2, kT2) = -f;
  bc(3, kG1) = f;
  bc(3, kG2) = f;

  // Zero-order hold through the exponential of the augmented generator.
  MatrixXd aug = MatrixXd::Zero(nx + nu, nx + nu);
  aug.topLeftCorner(nx, nx) = ac * config.ts;
  aug.topRightCorner(nx, nu) = bc * config.ts;
  const MatrixXd phi = aug.exp();
  const MatrixXd a = phi.topLeftCorner(nx, nx);
  const MatrixXd b = phi.topRightCorner(nx, nu);
  const VectorXd offset = VectorXd::Zero(nx);

  VectorXd q_diag(nx);
  q_diag << config.position_weight, config.position_weight, config.velocity_weight,
      config.velocity_weight;
  VectorXd r_diag(nu);
  r_diag << config.on_weight, config.thrust_weight, config.gimbal_weight, config.on_weight,
      config.thrust_weight, config.gimbal_weight, config.zone_weight, 2.0 * config.zone_weight,
      4.0 * config.zone_weight;

  std::vector<VectorXd> c_rows, d_rows;
  std::vector<double> lower, upper;
  auto input_row = [&](std::initializer_list<std::pair<int, double>> terms) {
    VectorXd d = VectorXd::Zero(nu);
    for (auto [k, v] : terms) d[k] = v;
    return d;
  };
  auto pure_input_row = [&](const VectorXd& d) {
    c_rows.push_back(VectorXd::Zero(nx));
    d_rows.push_back(d);
    lower.push_back(-kInf);
    upper.push_back(0.0);
  };
  // Thrust simplex: level gated by the on/off binary, radial level inside
  // the gimbal cone.
  pure_input_row(input_row({{kT1, 1.0}, {kB1, -1.0}}));
  pure_input_row(input_row({{kG1, 1.0}, {kT1, -tan_a}}));
  pure_input_row(input_row({{kG1, -1.0}, {kT1, -tan_a}}));
  pure_input_row(input_row({{kT2, 1.0}, {kB2, -1.0}}));
  pure_input_row(input_row({{kG2, 1.0}, {kT2, -tan_a}}));
  pure_input_row(input_row({{kG2, -1.0}, {kT2, -tan_a}}));

  const VectorXd ex = VectorXd::Unit(nx, 0);
  const VectorXd ey = VectorXd::Unit(nx, 1);
  const VectorXd none = VectorXd::Zero(nu);
  AddNextStateRow(a, b, offset, ex, none, -config.window_x, config.window_x, &c_rows, &d_rows,
                  &lower, &upper);
  AddNextStateRow(a, b, offset, ey, none, -config.window_y, config.window_y, &c_rows, &d_rows,
                  &lower, &upper);
  // Tightest big-M values given the window.
  const double m1 = config.window_x - zone.x_lo;
  const double m2 = zone.x_hi + config.window_x;
  const double m3 = zone.y_hi + config.window_y;
  const double m4 = config.window_y - zone.y_lo;
  AddNextStateRow(a, b, offset, ex, input_row({{kZ1, m1}}), -kInf, zone.x_lo + m1, &c_rows,
                  &d_rows, &lower, &upper);
  AddNextStateRow(a, b, offset, ex, input_row({{kZ2, -m2}}), zone.x_hi - m2, kInf, &c_rows,
                  &d_rows, &lower, &upper);
  AddNextStateRow(a, b, offset, ey, input_row({{kZ3, -m3}}), zone.y_hi - m3, kInf, &c_rows,
                  &d_rows, &lower, &upper);
  AddNextStateRow(a, b, offset, ey, input_row({{kZ1, -m4}, {kZ2, -m4}, {kZ3, -m4}}), -kInf,
                  zone.y_lo, &c_rows, &d_rows, &lower, &upper);

  const int nc = static_cast<int>(c_rows.size());
  Stage st;
  st.state_weight = q_diag.asDiagonal();
  st.input_weight = r_diag.asDiagonal();
  st.state_matrix = a;
  st.input_matrix = b;
  st.offset = offset;
  st.constraint_state.resize(nc, nx);
  st.constraint_input.resize(nc, nu);
  st.constraint_lower.resize(nc);
  st.constraint_upper.resize(nc);
  for (int r = 0; r < nc; ++r) {
    st.constraint_state.row(r) = c_rows[r].transpose();
    st.constraint_input.row(r) = d_rows[r].transpose();
    st.constraint_lower[r] = lower[r];
    st.constraint_upper[r] = upper[r];
  }
  st.input_lower = VectorXd::Zero(nu);
  st.input_upper = VectorXd::Ones(nu);
  st.input_lower[kG1] = st.input_lower[kG2] = -tan_a;
  st.input_upper[kG1] = st.input_upper[kG2] = tan_a;
  st.binary_inputs = {kB1, kB2, kZ1, kZ2, kZ3};

  OcpMiqp& p = sc.problem;
  p.nx = nx;
  p.nu = nu;
  p.stages.assign(config.horizon, st);
  p.terminal.state_weight = config.terminal_factor * st.state_weight;
  p.terminal.constraint_state.resize(0, nx);
  p.terminal.constraint_lower.resize(0);
  p.terminal.constraint_upper.resize(0);
  p.initial_state = x0;
  sc.plant = PlantModel::FromStage(st);
  return sc;
}

OcpMiqp MakeRandomHybrid(const RandomFamilyConfig& cfg) {
  if (cfg.nx < 1 || cfg.nu < 1 || cfg.horizon < 1 || cfg.binaries_per_stage < 0 ||
      cfg.binaries_per_stage > cfg.nu || cfg.rows_per_stage < 0 || cfg.terminal_rows < 0 ||
      cfg.density < 0.0 || cfg.density > 1.0) {
    throw std::invalid_argument("invalid random family parameters");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto sparse = [&](int rows, int cols) {
    MatrixXd m = MatrixXd::Zero(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (unit(rng) < cfg.density) m(r, c) = uniform(-1.0, 1.0);
      }
      if (m.row(r).isZero()) m(r, static_cast<int>(unit(rng) * cols) % cols) = uniform(0.5, 1.0);
    }
    return m;
  };

  const int nx = cfg.nx, nu = cfg.nu, n = cfg.horizon;
  OcpMiqp p;
  p.nx = nx;
  p.nu = nu;
  p.initial_state.resize(nx);
  for (int i = 0; i < nx; ++i) p.initial_state[i] = uniform(-2.0, 2.0);

  auto make_stage = [&]() {
    Stage s;
    s.state_matrix = MatrixXd::Identity(nx, nx);
    for (int r = 0; r < nx; ++r) {
      for (int c = 0; c < nx; ++c) s.state_matrix(r, c) += uniform(-0.4, 0.4);
    }
    s.input_matrix.resize(nx, nu);
    for (int r = 0; r < nx; ++r) {
      for (int c = 0; c < nu; ++c) s.input_matrix(r, c) = uniform(-1.0, 1.0);
    }
    s.offset.resize(nx);
    for (int r = 0; r < nx; ++r) s.offset[r] = uniform(-0.5, 0.5);
    VectorXd q(nx), rw(nu);
    for (int r = 0; r < nx; ++r) q[r] = uniform(0.5, 2.0);
    for (int r = 0; r < nu; ++r) rw[r] = uniform(0.05, 1.0);
    s.state_weight = q.asDiagonal();
    s.input_weight = rw.asDiagonal();
    s.input_lower = VectorXd::Constant(nu, -2.0);
    s.input_upper = VectorXd::Constant(nu, 2.0);
    std::vector<int> idx(nu);
    for (int k = 0; k < nu; ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    s.binary_inputs.assign(idx.begin(), idx.begin() + cfg.binaries_per_stage);
    std::sort(s.binary_inputs.begin(), s.binary_inputs.end());
    for (int k : s.binary_inputs) {
      s.input_lower[k] = 0.0;
      s.input_upper[k] = 1.0;
    }
    s.constraint_state = sparse(cfg.rows_per_stage, nx);
    s.constraint_input = sparse(cfg.rows_per_stage, nu);
    s.constraint_lower.resize(cfg.rows_per_stage);
    s.constraint_upper.resize(cfg.rows_per_stage);
    return s;
  };

  if (cfg.time_invariant) {
    p.stages.assign(n, make_stage());
  } else {
    for (int i = 0; i < n; ++i) p.stages.push_back(make_stage());
  }
  VectorXd pw(nx);
  for (int r = 0; r < nx; ++r) pw[r] = uniform(1.0, 3.0);
  p.terminal.state_weight = pw.asDiagonal();
  p.terminal.constraint_state = sparse(cfg.terminal_rows, nx);
  p.terminal.constraint_lower.resize(cfg.terminal_rows);
  p.terminal.constraint_upper.resize(cfg.terminal_rows);

  // Row bounds: around a planted trajectory, or around zero otherwise.
  VectorXd x = p.initial_state;
  for (int i = 0; i < n; ++i) {
    Stage& s = p.stages[i];
    VectorXd u(nu);
    for (int k = 0; k < nu; ++k) u[k] = uniform(-1.0, 1.0);
    for (int k : s.binary_inputs) u[k] = unit(rng) < 0.5 ? 0.0 : 1.0;
    const VectorXd center =
        cfg.planted ? VectorXd(s.constraint_state * x + s.constraint_input * u)
                    : VectorXd::Zero(cfg.rows_per_stage);
    for (int r = 0; r < cfg.rows_per_stage; ++r) {
      const double lo = uniform(0.05, cfg.planted ? 1.5 : 1.0);
      const double hi = uniform(0.05, cfg.planted ? 1.5 : 1.0);
      const double side = unit(rng);
      s.constraint_lower[r] = side < 0.25 ? -kInf : center[r] - lo;
      s.constraint_upper[r] = side > 0.75 ? kInf : center[r] + hi;
    }
    x = s.state_matrix * x + s.input_matrix * u + s.offset;
  }
  for (int r = 0; r < cfg.terminal_rows; ++r) {
    const double center = cfg.planted ? p.terminal.constraint_state.row(r).dot(x) : 0.0;
    p.terminal.constraint_lower[r] = center - uniform(0.1, 2.0);
    p.terminal.constraint_upper[r] = center + uniform(0.1, 2.0);
  }
  // With time-invariant data the planted bounds of stage 0 are shared.
  if (cfg.time_invariant) {
    for (int i = 1; i < n; ++i) {
      p.stages[i].constraint_lower = p.stages[0].constraint_lower;
      p.stages[i].constraint_upper = p.stages[0].constraint_upper;
    }
  }
  return p;
}

}  // namespace mimpc
