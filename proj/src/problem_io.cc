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

#include "mimpc/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mimpc {

using nlohmann::json;

ProblemFormatError::ProblemFormatError(const std::string& message, int line, std::string where)
    : std::runtime_error(message), line_(line), where_(std::move(where)) {}

namespace {

constexpr const char* kFormat = "mimpc-ocp";
constexpr int kVersion = 1;

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw ProblemFormatError(where + ": " + what, 0, where);
}

json Number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

json Vector(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(Number(v[i]));
  return out;
}

json Matrix(const MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(Vector(m.row(r).transpose()));
  return out;
}

double ReadNumber(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  Fail(where, "expected a number or \"inf\"/\"-inf\"");
}

const json& Field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) Fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) Fail(where + "." + key, "missing field");
  return *it;
}

int ReadInt(const json& j, const std::string& where) {
  if (!j.is_number_integer()) Fail(where, "expected an integer");
  return j.get<int>();
}

VectorXd ReadVector(const json& j, Eigen::Index size, const std::string& where) {
  if (!j.is_array()) Fail(where, "expected an array");
  if (size >= 0 && static_cast<Eigen::Index>(j.size()) != size) {
    Fail(where, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  }
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v[i] = ReadNumber(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

// Reads a matrix with the given column count; the row count is checked when
// `rows` is nonnegative.
MatrixXd ReadMatrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (!j.is_array()) Fail(where, "expected an array of rows");
  if (rows >= 0 && static_cast<Eigen::Index>(j.size()) != rows) {
    Fail(where, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  }
  MatrixXd m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    m.row(r) = ReadVector(j[r], cols, where + "[" + std::to_string(r) + "]").transpose();
  }
  return m;
}

int LineOf(const std::string& text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

json ParseJson(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = LineOf(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ProblemFormatError("line " + std::to_string(line) + ": " + e.what(), line, "");
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProblemFormatError("cannot open " + path, 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string SerializeProblem(const OcpMiqp& prob) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["nx"] = prob.nx;
  j["nu"] = prob.nu;
  j["initial_state"] = Vector(prob.initial_state);
  json stages = json::array();
  for (const Stage& s : prob.stages) {
    json st;
    st["Q"] = Matrix(s.state_weight);
    st["R"] = Matrix(s.input_weight);
    st["A"] = Matrix(s.state_matrix);
    st["B"] = Matrix(s.input_matrix);
    st["a"] = Vector(s.offset);
    st["C"] = Matrix(s.constraint_state);
    st["D"] = Matrix(s.constraint_input);
    st["c_lower"] = Vector(s.constraint_lower);
    st["c_upper"] = Vector(s.constraint_upper);
    st["u_lower"] = Vector(s.input_lower);
    st["u_upper"] = Vector(s.input_upper);
    st["binary"] = s.binary_inputs;
    stages.push_back(std::move(st));
  }
  j["stages"] = std::move(stages);
  json t;
  t["P"] = Matrix(prob.terminal.state_weight);
  t["C"] = Matrix(prob.terminal.constraint_state);
  t["c_lower"] = Vector(prob.terminal.constraint_lower);
  t["c_upper"] = Vector(prob.terminal.constraint_upper);
  j["terminal"] = std::move(t);
  return j.dump(1) + "\n";
}

OcpMiqp ParseProblem(const std::string& text) {
  const json j = ParseJson(text);
  if (!j.is_object()) Fail("$", "expected an object");
  const json& format = Field(j, "format", "$");
  if (format != kFormat) Fail("$.format", "expected \"mimpc-ocp\"");
  if (ReadInt(Field(j, "version", "$"), "$.version") != kVersion) {
    Fail("$.version", "unsupported version");
  }
  OcpMiqp prob;
  prob.nx = ReadInt(Field(j, "nx", "$"), "$.nx");
  prob.nu = ReadInt(Field(j, "nu", "$"), "$.nu");
  if (prob.nx <= 0) Fail("$.nx", "must be positive");
  if (prob.nu <= 0) Fail("$.nu", "must be positive");
  const Eigen::Index nx = prob.nx, nu = prob.nu;
  prob.initial_state = ReadVector(Field(j, "initial_state", "$"), nx, "$.initial_state");

  const json& stages = Field(j, "stages", "$");
  if (!stages.is_array() || stages.empty()) Fail("$.stages", "expected a non-empty array");
  for (size_t i = 0; i < stages.size(); ++i) {
    const std::string w = "$.stages[" + std::to_string(i) + "]";
    const json& st = stages[i];
    Stage s;
    s.state_weight = ReadMatrix(Field(st, "Q", w), nx, nx, w + ".Q");
    s.input_weight = ReadMatrix(Field(st, "R", w), nu, nu, w + ".R");
    s.state_matrix = ReadMatrix(Field(st, "A", w), nx, nx, w + ".A");
    s.input_matrix = ReadMatrix(Field(st, "B", w), nx, nu, w + ".B");
    s.offset = ReadVector(Field(st, "a", w), nx, w + ".a");
    s.constraint_state = ReadMatrix(Field(st, "C", w), -1, nx, w + ".C");
    const Eigen::Index nc = s.constraint_state.rows();
    s.constraint_input = ReadMatrix(Field(st, "D", w), nc, nu, w + ".D");
    s.constraint_lower = ReadVector(Field(st, "c_lower", w), nc, w + ".c_lower");
    s.constraint_upper = ReadVector(Field(st, "c_upper", w), nc, w + ".c_upper");
    s.input_lower = ReadVector(Field(st, "u_lower", w), nu, w + ".u_lower");
    s.input_upper = ReadVector(Field(st, "u_upper", w), nu, w + ".u_upper");
    const json& bin = Field(st, "binary", w);
    if (!bin.is_array()) Fail(w + ".binary", "expected an array");
    for (size_t k = 0; k < bin.size(); ++k) {
      s.binary_inputs.push_back(ReadInt(bin[k], w + ".binary[" + std::to_string(k) + "]"));
    }
    prob.stages.push_back(std::move(s));
  }
  const json& t = Field(j, "terminal", "$");
  prob.terminal.state_weight = ReadMatrix(Field(t, "P", "$.terminal"), nx, nx, "$.terminal.P");
  prob.terminal.constraint_state = ReadMatrix(Field(t, "C", "$.terminal"), -1, nx, "$.terminal.C");
  const Eigen::Index nt = prob.terminal.constraint_state.rows();
  prob.terminal.constraint_lower =
      ReadVector(Field(t, "c_lower", "$.terminal"), nt, "$.terminal.c_lower");
  prob.terminal.constraint_upper =
      ReadVector(Field(t, "c_upper", "$.terminal"), nt, "$.terminal.c_upper");

  const ValidationReport report = Validate(prob);
  if (!report.ok()) Fail("$", "invalid problem: " + report.summary());
  return prob;
}

OcpMiqp ReadProblem(const std::string& path) { return ParseProblem(ReadFile(path)); }

void WriteProblem(const std::string& path, const OcpMiqp& prob) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << SerializeProblem(prob);
}

std::string SerializeWarmStartPath(const WarmStartPath& path) {
  json j;
  j["nu"] = path.nu;
  j["horizon"] = path.horizon;
  json steps = json::array();
  for (const PathStep& s : path.steps) {
    json st;
    st["stage"] = s.var.stage;
    st["index"] = s.var.index;
    st["dir"] = s.dir == BranchDirection::kUp ? "up" : "down";
    if (s.relaxation) st["relaxation"] = Vector(*s.relaxation);
    steps.push_back(std::move(st));
  }
  j["steps"] = std::move(steps);
  if (path.incumbent) j["incumbent"] = Vector(*path.incumbent);
  return j.dump(1) + "\n";
}

WarmStartPath ParseWarmStartPath(const std::string& text) {
  const json j = ParseJson(text);
  WarmStartPath p;
  p.nu = ReadInt(Field(j, "nu", "$"), "$.nu");
  p.horizon = ReadInt(Field(j, "horizon", "$"), "$.horizon");
  const json& steps = Field(j, "steps", "$");
  if (!steps.is_array()) Fail("$.steps", "expected an array");
  for (size_t i = 0; i < steps.size(); ++i) {
    const std::string w = "$.steps[" + std::to_string(i) + "]";
    PathStep s;
    s.var.stage = ReadInt(Field(steps[i], "stage", w), w + ".stage");
    s.var.index = ReadInt(Field(steps[i], "index", w), w + ".index");
    const json& dir = Field(steps[i], "dir", w);
    if (dir == "up") {
      s.dir = BranchDirection::kUp;
    } else if (dir == "down") {
      s.dir = BranchDirection::kDown;
    } else {
      Fail(w + ".dir", "expected \"up\" or \"down\"");
    }
    if (steps[i].contains("relaxation")) {
      s.relaxation = ReadVector(steps[i]["relaxation"], -1, w + ".relaxation");
    }
    p.steps.push_back(std::move(s));
  }
  if (j.contains("incumbent")) p.incumbent = ReadVector(j["incumbent"], -1, "$.incumbent");
  return p;
}

}  // namespace mimpc
