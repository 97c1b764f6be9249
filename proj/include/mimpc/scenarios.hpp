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

#ifndef MIMPC_SCENARIOS_HPP_
#define MIMPC_SCENARIOS_HPP_

#include <cstdint>

#include "mimpc/mimpc_loop.hpp"
#include "mimpc/ocp_model.hpp"

namespace mimpc {

// Axis-aligned rectangle in (X, Y) that the satellite must stay out of.
struct Zone {
  double x_lo = -150.0;
  double x_hi = -50.0;
  double y_lo = -40.0;
  double y_hi = 60.0;
};

// In-plane station keeping with two gimballed on/off thrusters on the
// in-track faces. State [X in-track, Y radial, vX, vY] in m and m/s.
// Inputs per stage, thrust levels normalized to the acceleration bound:
//   0 b1  thruster 1 on (pushes +X)     3 b2  thruster 2 on (pushes -X)
//   1 t1  in-track level, [0, b1]       4 t2  in-track level, [0, b2]
//   2 g1  radial level, |g1| <= tan(a) t1   5 g2  radial level
//   6-8 z1..z3 zone side selectors (left, right, above; none means below)
struct SatelliteConfig {
  double ts = 30.0;
  double altitude_m = 400e3;
  double thrust_accel = 0.02;   // m/s^2 per thruster
  double gimbal_half_angle_deg = 30.0;
  int horizon = 8;
  double window_x = 300.0;
  double window_y = 150.0;
  Zone zone;
  double position_weight = 1e-2;
  double velocity_weight = 10.0;
  double terminal_factor = 10.0;
  double thrust_weight = 1.0;
  double gimbal_weight = 1.0;
  double on_weight = 0.1;
  double zone_weight = 1e-4;  // z1, z2, z3 cost 1, 2, 4 times this
  VectorXd initial_state;     // empty selects DefaultSatelliteState()
};

enum SatelliteInput { kB1 = 0, kT1, kG1, kB2, kT2, kG2, kZ1, kZ2, kZ3, kSatelliteInputs };

struct SatelliteScenario {
  SatelliteConfig config;
  double orbital_rate = 0.0;
  OcpMiqp problem;
  PlantModel plant;
};

// Circular orbit mean motion, rad/s.
double OrbitalRate(double altitude_m);

// Drifting state left of the zone with a nonzero in-track drift.
VectorXd DefaultSatelliteState();

// Throws std::invalid_argument for Ts <= 0, a zone not strictly inside the
// window, or an initial state outside the window or inside the zone.
SatelliteScenario MakeSatellite(const SatelliteConfig& config = {});

bool InsideWindow(const SatelliteConfig& config, const VectorXd& state, double tol = 1e-6);
// True when the position lies in the open zone by more than `tol`.
bool InsideZone(const SatelliteConfig& config, const VectorXd& state, double tol = 1e-6);

struct RandomFamilyConfig {
  int nx = 3;
  int nu = 2;
  int binaries_per_stage = 1;
  int horizon = 3;
  int rows_per_stage = 2;
  int terminal_rows = 1;
  double density = 0.6;
  // Plants a feasible assignment so every instance has a solution.
  bool planted = true;
  // Same data at every stage, for closed-loop runs. The planted point then
  // only fixes the shared row bounds, so feasibility is not guaranteed.
  bool time_invariant = false;
  std::uint64_t seed = 1;
};

// Seeded random MIQP with mixed binary and continuous inputs. Continuous
// inputs lie in [-2, 2]. Always passes Validate(). Identical configs give
// identical problems.
OcpMiqp MakeRandomHybrid(const RandomFamilyConfig& config);

}  // namespace mimpc

#endif  // MIMPC_SCENARIOS_HPP_
