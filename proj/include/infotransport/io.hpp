// Copyright 2026 The infotransport Authors.
//
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "infotransport/closed_forms.hpp"
#include "infotransport/linearized.hpp"
#include "infotransport/model.hpp"
#include "infotransport/oracle_discrete.hpp"
#include "infotransport/partition_solver.hpp"
#include "infotransport/priors.hpp"
#include "infotransport/verifier.hpp"

namespace infotransport {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;

struct SamplingConfig {
  Index n = 10000;
  std::uint64_t seed = 0;
};

struct OracleConfig {
  bool present = false;
  std::string name;
  // quadratic_elliptical
  Matrix H;
  Matrix sigma;  // defaults to the identity
  // spherical and cylinder; mu defaults to the standard gaussian profile
  Curve psi = Curve::constant(1.0);
  Curve mu = Curve::exponential(1.0, -0.5);
  Curve phi;
  Curve phi2;
  int L = 0;
  int L2 = 0;
  // dirichlet
  DirichletParams dirichlet;
};

Json to_json(const OracleConfig& oracle);

struct VerifyPolicyConfig {
  std::string source = "solution";  // solution | closed_form
  std::string path = "solution.json";
  std::string perturbation = "none";  // none | scale | displace | swap
};

struct LinearizeConfig {
  Vector start;  // defaults to zeros
  double step = 1e-3;
};

struct CompareConfig {
  double tolerance = 1e-9;
  double relative_tolerance = 0.03;
};

struct OutputConfig {
  std::string directory = ".";
  bool json = true;
  bool csv = true;
};

struct RunConfig {
  bool has_game = false;
  ProblemSpec problem;
  SamplingConfig sampling;
  SolverConfig solver;
  std::vector<int> K{1};
  VerifyConfig verify;
  VerifyPolicyConfig verify_policy;
  OracleConfig oracle;
  LinearizeConfig linearize;
  CompareConfig compare;
  OutputConfig output;
};

/// Parses and validates a config document. Unknown fields, type mismatches
/// and malformed JSON raise kInvalidSpec naming the line or field.
RunConfig parse_config(const std::string& text);

/// Builds the closed-form policy named in the oracle section.
ClosedFormPolicy build_oracle(const OracleConfig& oracle);

/// The problem to solve: the configured game, or the oracle's welfare and
/// moment map on the configured space and prior.
ProblemSpec resolve_problem(const RunConfig& config);

Curve curve_from_json(const Json& j, const std::string& path = "curve");
Json to_json(const Curve& curve);

Json to_json(const PartitionSolution& solution);
PartitionSolution solution_from_json(const Json& j);

Json to_json(const CheckResult& check);
Json to_json(const DiagnosticsReport& report);
Json to_json(const ClosedFormPolicy& policy);
Json to_json(const LinearizedModel& model);
Json to_json(const ExhaustiveResult& result);
Json to_json(const KantorovichReport& report);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Columns: index, omega_0.., g_0.., label, action_0..
void write_cells_csv(std::ostream& out, const SamplePool& pool, const Points& g,
                     const PartitionSolution& solution);

}  // namespace infotransport
