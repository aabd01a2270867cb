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

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"

#include "infotransport/error.hpp"
#include "infotransport/io.hpp"

using namespace infotransport;

namespace {

const char* kSaddle = R"({
  "schema_version": 1,
  "problem": {
    "space": {"domain": "euclidean", "dimension": 2},
    "prior": {"kind": "gaussian", "mean": [0, 0], "covariance": [[1, 0], [0, 1]]},
    "welfare": {"kind": "quadratic", "H": [[1, 0], [0, -1]]}
  },
  "sampling": {"n": 500, "seed": 4},
  "solver": {"K": [2, 4], "restarts": 2, "empty_cell_policy": "reseed_farthest"},
  "output": {"directory": "out", "formats": ["json"]}
})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidSpec);
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("parses a moment config") {
  const RunConfig cfg = parse_config(kSaddle);
  CHECK(cfg.has_game);
  CHECK(cfg.problem.is_moment());
  CHECK(cfg.sampling.n == 500);
  CHECK(cfg.sampling.seed == 4);
  CHECK(cfg.K == std::vector<int>{2, 4});
  CHECK(cfg.solver.restarts == 2);
  CHECK(cfg.solver.empty_cell_policy == SolverConfig::EmptyCellPolicy::kReseedFarthest);
  CHECK(cfg.output.json);
  CHECK_FALSE(cfg.output.csv);
}

TEST_CASE("config errors name the field or line") {
  CHECK(error_of(replace(kSaddle, "\"seed\": 4", "\"seed\": 4, \"extra\": true"))
            .find("config.sampling.extra") != std::string::npos);
  CHECK(error_of(replace(kSaddle, "\"restarts\": 2", "\"restarts\": \"two\""))
            .find("config.solver.restarts") != std::string::npos);
  CHECK(error_of(replace(kSaddle, "\"schema_version\": 1", "\"schema_version\": 2"))
            .find("schema_version") != std::string::npos);
  CHECK(error_of(replace(kSaddle, "\"kind\": \"quadratic\"", "\"kind\": \"cubic\""))
            .find("config.problem.welfare.kind") != std::string::npos);
  CHECK(error_of(replace(kSaddle, "[[1, 0], [0, -1]]", "[[1, 0], [0, -1, 2]]"))
            .find("config.problem.welfare.H") != std::string::npos);
  const std::string broken = replace(kSaddle, "\"sampling\": {", "\"sampling\": {,");
  CHECK(error_of(broken).find("config line 8") != std::string::npos);
  CHECK(error_of("{\"schema_version\": 1}").find("config.problem") != std::string::npos);
}

TEST_CASE("oracle configs resolve to problems") {
  const std::string text = R"({
    "schema_version": 1,
    "problem": {"space": {"domain": "euclidean", "dimension": 2},
                "prior": {"kind": "gaussian", "mean": [0, 0], "covariance": [[1, 0], [0, 1]]}},
    "oracle": {"name": "spherical", "L": 2,
               "phi": {"kind": "power", "coefficient": 1, "exponent": 0.5}}
  })";
  const RunConfig cfg = parse_config(text);
  CHECK_FALSE(cfg.has_game);
  const ProblemSpec p = resolve_problem(cfg);
  CHECK(p.is_moment());
  const auto cf = build_oracle(cfg.oracle);
  CHECK(cf.name == ClosedFormPolicy::Name::kSpherical);
  const Json back = to_json(cfg.oracle);
  CHECK(back["phi"]["exponent"] == 0.5);
}

TEST_CASE("general game config") {
  const std::string text = R"({
    "schema_version": 1,
    "problem": {"space": {"domain": "euclidean", "dimension": 1},
                "prior": {"kind": "gaussian", "mean": [0], "covariance": [[1]]},
                "game": {"action_dimension": 1, "map": {"kind": "cubic"},
                         "welfare": {"kind": "quadratic_joint", "H": [[1]], "b": [0],
                                     "R": [[0]], "S": [[1]]}}},
    "linearize": {"start": [0.5], "step": 0.002}
  })";
  const RunConfig cfg = parse_config(text);
  CHECK_FALSE(cfg.problem.is_moment());
  CHECK(cfg.linearize.step == 0.002);
  CHECK(cfg.linearize.start[0] == 0.5);
}

TEST_CASE("doubles round-trip through their text form") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23,
                   std::numeric_limits<double>::denorm_min()}) {
    const std::string text = format_double(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("curves round-trip") {
  for (const Curve& c : {Curve::polynomial({1.0, -2.0, 0.25}), Curve::power(2.0, 0.5),
                         Curve::exponential(1.0, -0.5)}) {
    const Curve back = curve_from_json(to_json(c));
    for (double y : {0.0, 0.3, 2.0}) CHECK(back(y) == c(y));
  }
}

TEST_CASE("solutions round-trip exactly") {
  const RunConfig cfg = parse_config(kSaddle);
  const auto pool = sample(cfg.problem.prior, cfg.problem.space, cfg.sampling.n, cfg.sampling.seed);
  const auto s = solve(cfg.problem, pool, 4, cfg.solver);
  const std::string text = to_json(s).dump();
  const PartitionSolution back = solution_from_json(Json::parse(text));
  CHECK(back.labels == s.labels);
  CHECK(back.actions == s.actions);
  CHECK(back.multipliers == s.multipliers);
  CHECK(back.welfare == s.welfare);
  CHECK(back.trace == s.trace);
  CHECK(back.restart_welfare == s.restart_welfare);
  CHECK(back.converged == s.converged);
  CHECK(to_json(back).dump() == text);
}

TEST_CASE("identical configs give identical output") {
  const RunConfig cfg = parse_config(kSaddle);
  auto run = [&] {
    const auto pool = sample(cfg.problem.prior, cfg.problem.space, cfg.sampling.n, cfg.sampling.seed);
    const auto s = solve(cfg.problem, pool, 4, cfg.solver);
    std::ostringstream csv;
    write_cells_csv(csv, pool, pool.points, s);
    return to_json(s).dump() + csv.str();
  };
  CHECK(run() == run());
}

TEST_CASE("cells csv layout") {
  Points pts(2, 2);
  pts << 0.0, 1.0, 2.0, 3.0;
  const auto pool = make_pool(pts, Vector::Constant(2, 0.5));
  PartitionSolution s;
  s.labels = {0, 0};
  s.actions = Matrix::Constant(1, 2, 1.5);
  s.multipliers = s.actions;
  std::ostringstream out;
  write_cells_csv(out, pool, pts, s);
  CHECK(out.str() ==
        "index,omega_0,omega_1,g_0,g_1,label,action_0,action_1\n"
        "0,0,1,0,1,0,1.5,1.5\n"
        "1,2,3,2,3,0,1.5,1.5\n");
}
