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

#include "mimpc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "mimpc/benchmark.hpp"
#include "mimpc/bnb.hpp"
#include "mimpc/mimpc_loop.hpp"
#include "mimpc/problem_io.hpp"
#include "mimpc/scenarios.hpp"

namespace mimpc {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string subcommand;
  std::string problem;
  std::string scenario = "satellite";
  int horizon = 0;  // 0 keeps the problem or scenario default
  double eta_rel = 2.0;
  double eps_gap = 1e-6;
  double int_tol = 1e-6;
  int max_iters = 0;
  std::string warm_start = "on";
  std::uint64_t seed = 1;
  std::string out;
  int steps = 100;
  int repetitions = 1;
  std::vector<int> horizons = {2, 4, 6, 8};
  std::string policy = "abort";
};

struct CliError {
  ExitCode code;
  std::string kind;
  std::string message;
  int line = 0;
};

void ReportError(std::ostream& err, const CliError& e) {
  json j;
  j["error"] = e.kind;
  j["message"] = e.message;
  if (e.line > 0) j["line"] = e.line;
  j["exit_code"] = static_cast<int>(e.code);
  err << j.dump() << "\n";
}

json EchoConfig(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  if (!c.problem.empty()) j["problem"] = c.problem;
  else j["scenario"] = c.scenario;
  j["horizon"] = c.horizon;
  j["eta_rel"] = std::isinf(c.eta_rel) ? json("inf") : json(c.eta_rel);
  j["eps_gap"] = c.eps_gap;
  j["int_tol"] = c.int_tol;
  j["max_iters"] = c.max_iters;
  j["warm_start"] = c.warm_start;
  j["seed"] = c.seed;
  j["out"] = c.out;
  if (c.subcommand != "solve") j["steps"] = c.steps;
  if (c.subcommand == "simulate") j["policy"] = c.policy;
  if (c.subcommand == "bench") {
    j["repetitions"] = c.repetitions;
    j["horizons"] = c.horizons;
  }
  return j;
}

SolverConfig MakeSolverConfig(const RunConfig& c) {
  SolverConfig s;
  s.eps_gap = c.eps_gap;
  s.max_iterations = c.max_iters;
  s.branching.reliability = c.eta_rel;
  s.branching.int_tol = c.int_tol;
  s.propagation.int_tol = c.int_tol;
  return s;
}

void Validate(const RunConfig& c) {
  auto bad = [](const std::string& m) { throw CliError{kExitUsage, "usage", m}; };
  if (!(c.eta_rel >= 0.0)) bad("--eta-rel must be >= 0 (inf allowed)");
  if (!(c.eps_gap >= 0.0) || std::isinf(c.eps_gap)) bad("--eps-gap must be finite and >= 0");
  if (!(c.int_tol > 0.0 && c.int_tol < 0.5)) bad("--int-tol must lie in (0, 0.5)");
  if (c.max_iters < 0) bad("--max-iters must be >= 0");
  if (c.horizon < 0) bad("--horizon must be >= 1");
  if (c.steps < 1) bad("--steps must be >= 1");
  if (c.repetitions < 1) bad("--repetitions must be >= 1");
  for (int n : c.horizons) {
    if (n < 1) bad("--horizons entries must be >= 1");
  }
  if (c.scenario != "satellite" && c.scenario != "random") {
    bad("--scenario must be satellite or random");
  }
}

struct LoadedProblem {
  OcpMiqp problem;
  PlantModel plant;
};

LoadedProblem Load(const RunConfig& c) {
  if (!c.problem.empty()) {
    try {
      OcpMiqp p = ReadProblem(c.problem);
      if (c.horizon > 0 && c.horizon != p.horizon()) {
        // Truncate or extend with copies of the last stage.
        const Stage last = p.stages.back();
        p.stages.resize(c.horizon, last);
      }
      PlantModel plant = PlantModel::FromStage(p.stages.front());
      return {std::move(p), std::move(plant)};
    } catch (const ProblemFormatError& e) {
      throw CliError{kExitMalformedFile, "malformed_file", e.what(), e.line()};
    }
  }
  if (c.scenario == "satellite") {
    SatelliteConfig cfg;
    if (c.horizon > 0) cfg.horizon = c.horizon;
    SatelliteScenario sc = MakeSatellite(cfg);
    return {std::move(sc.problem), std::move(sc.plant)};
  }
  RandomFamilyConfig cfg;
  cfg.seed = c.seed;
  if (c.horizon > 0) cfg.horizon = c.horizon;
  OcpMiqp p = MakeRandomHybrid(cfg);
  PlantModel plant = PlantModel::FromStage(p.stages.front());
  return {std::move(p), std::move(plant)};
}

void PrepareOut(const RunConfig& c) {
  if (c.out.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  std::ofstream probe(c.out + "/config.json");
  if (!probe) throw CliError{kExitUsage, "usage", "output directory not writable: " + c.out};
  probe << EchoConfig(c).dump(1) << "\n";
}

int DoSolve(const RunConfig& c, std::ostream& out) {
  const LoadedProblem lp = Load(c);
  PrepareOut(c);
  const MiqpResult res = SolveMiqp(lp.problem, lp.problem.initial_state, nullptr, MakeSolverConfig(c));
  const SolveStats& s = res.stats;
  out << std::setprecision(12) << "objective=" << (res.solution ? res.solution->objective : kInf)
      << " nodes=" << s.nodes << " time_ms=" << std::setprecision(4) << s.wall_ms
      << " termination=" << ToString(s.termination) << "\n";
  if (!c.out.empty() && res.solution) {
    std::ofstream f(c.out + "/solution.csv");
    f << "stage";
    for (int k = 0; k < lp.problem.nu; ++k) f << ",u_" << k;
    f << "\n" << std::setprecision(17);
    for (int i = 0; i < lp.problem.horizon(); ++i) {
      f << i;
      for (int k = 0; k < lp.problem.nu; ++k) f << "," << res.solution->controls(k, i);
      f << "\n";
    }
  }
  if (!res.solution) {
    if (s.termination == Termination::kInfeasible) {
      throw CliError{kExitInfeasible, "infeasible", "problem is infeasible"};
    }
    throw CliError{kExitBudgetExhausted, "budget_exhausted",
                   std::string("no feasible solution before ") + ToString(s.termination)};
  }
  return kExitOk;
}

int DoSimulate(const RunConfig& c, std::ostream& out) {
  const LoadedProblem lp = Load(c);
  PrepareOut(c);
  LoopConfig loop;
  loop.solver = MakeSolverConfig(c);
  loop.warm_start = c.warm_start == "on";
  loop.policy = c.policy == "hold" ? InfeasiblePolicy::kHoldShifted : InfeasiblePolicy::kAbort;
  const ClosedLoopTrace trace =
      RunClosedLoop(lp.problem, lp.plant, lp.problem.initial_state, c.steps, loop);
  for (const StepRecord& s : trace.steps) {
    out << std::setprecision(12) << "step=" << s.step << " objective=" << s.objective
        << " nodes=" << s.stats.nodes << " time_ms=" << std::setprecision(4) << s.wall_ms << "\n";
  }
  const std::string path = (c.out.empty() ? std::string(".") : c.out) + "/trace.csv";
  std::ofstream f(path);
  if (!f) throw CliError{kExitUsage, "usage", "cannot write " + path};
  WriteTraceCsv(f, trace);
  if (trace.aborted) {
    const bool capped = !trace.steps.empty() &&
                        trace.steps.back().stats.termination != Termination::kInfeasible;
    throw CliError{capped ? kExitBudgetExhausted : kExitInfeasible,
                   capped ? "budget_exhausted" : "infeasible", trace.diagnostic};
  }
  return kExitOk;
}

int DoBench(const RunConfig& c, std::ostream& out) {
  PrepareOut(c);
  BenchSuite suite;
  suite.kind = c.scenario == "random" ? BenchSuiteKind::kRandom : BenchSuiteKind::kSatellite;
  suite.horizons = c.horizons;
  suite.steps = c.steps;
  suite.seed = c.seed;
  std::vector<BenchConfig> configs;
  for (bool warm : {true, false}) {
    BenchConfig bc;
    bc.name = warm ? "warm" : "cold";
    bc.loop.solver = MakeSolverConfig(c);
    bc.loop.warm_start = warm;
    bc.loop.policy = InfeasiblePolicy::kHoldShifted;
    configs.push_back(bc);
  }
  const std::string dir = c.out.empty() ? std::string(".") : c.out;
  const std::vector<BenchRow> rows = RunBenchmark(suite, configs, c.repetitions, dir + "/problems");
  std::ofstream f(dir + "/bench.csv");
  if (!f) throw CliError{kExitUsage, "usage", "cannot write " + dir + "/bench.csv"};
  WriteBenchCsv(f, rows);
  WriteBenchCsv(out, rows);
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Mixed-integer MPC branch-and-bound solver"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--problem", c.problem, "problem file (JSON)")->envname("MIMPC_PROBLEM");
    sub->add_option("--scenario", c.scenario, "built-in scenario: satellite or random")
        ->envname("MIMPC_SCENARIO");
    sub->add_option("--horizon", c.horizon, "prediction horizon override")
        ->envname("MIMPC_HORIZON");
    sub->add_option("--eta-rel", c.eta_rel, "reliability threshold (inf allowed)")
        ->envname("MIMPC_ETA_REL");
    sub->add_option("--eps-gap", c.eps_gap, "absolute optimality gap")->envname("MIMPC_EPS_GAP");
    sub->add_option("--int-tol", c.int_tol, "integrality tolerance")->envname("MIMPC_INT_TOL");
    sub->add_option("--max-iters", c.max_iters, "node limit per MIQP, 0 for none")
        ->envname("MIMPC_MAX_ITERS");
    sub->add_option("--warm-start", c.warm_start, "tree propagation between steps")
        ->check(CLI::IsMember({"on", "off"}))
        ->envname("MIMPC_WARM_START");
    sub->add_option("--seed", c.seed, "random scenario seed")->envname("MIMPC_SEED");
    sub->add_option("--out", c.out, "output directory")->envname("MIMPC_OUT");
  };
  CLI::App* solve = app.add_subcommand("solve", "solve one MIQP");
  add_solver_flags(solve);
  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop simulation");
  add_solver_flags(simulate);
  simulate->add_option("--steps", c.steps, "simulation steps")->envname("MIMPC_STEPS");
  simulate->add_option("--policy", c.policy, "infeasible step policy")
      ->check(CLI::IsMember({"abort", "hold"}))
      ->envname("MIMPC_POLICY");
  CLI::App* bench = app.add_subcommand("bench", "closed-loop benchmark sweep");
  add_solver_flags(bench);
  bench->add_option("--steps", c.steps, "simulation steps per run")->envname("MIMPC_STEPS");
  bench->add_option("--repetitions", c.repetitions, "runs per cell")
      ->envname("MIMPC_REPETITIONS");
  bench->add_option("--horizons", c.horizons, "horizon sweep")->delimiter(',')
      ->envname("MIMPC_HORIZONS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ReportError(err, {kExitUsage, "usage", e.what()});
    return kExitUsage;
  }

  try {
    if (solve->parsed()) c.subcommand = "solve";
    else if (simulate->parsed()) c.subcommand = "simulate";
    else c.subcommand = "bench";
    Validate(c);
    if (c.subcommand == "solve") return DoSolve(c, out);
    if (c.subcommand == "simulate") return DoSimulate(c, out);
    return DoBench(c, out);
  } catch (const CliError& e) {
    ReportError(err, e);
    return e.code;
  } catch (const std::invalid_argument& e) {
    ReportError(err, {kExitUsage, "invalid_argument", e.what()});
    return kExitUsage;
  } catch (const std::exception& e) {
    ReportError(err, {kExitInternal, "internal", e.what()});
    return kExitInternal;
  }
}

}  // namespace mimpc
