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

#include <cmath>

#include "doctest.h"

#include "infotransport/error.hpp"
#include "infotransport/oracle_discrete.hpp"
#include "infotransport/partition_solver.hpp"

using namespace infotransport;

TEST_CASE("partition counts are sums of Stirling numbers") {
  CHECK(count_partitions(4, 2) == 8.0);
  CHECK(count_partitions(5, 3) == 41.0);
  CHECK(count_partitions(10, 3) == 9842.0);
  CHECK(count_partitions(6, 6) == 203.0);
}

TEST_CASE("exhaustive search visits every partition") {
  Points pts(5, 1);
  pts << -1.0, 0.0, 0.5, 2.0, 3.0;
  const auto inst = make_instance("line", pts, Vector::Constant(5, 0.2),
                                  Welfare(QuadraticWelfare{Matrix::Identity(1, 1), Vector::Zero(1)}),
                                  IdentityMap{}, 3);
  const auto r = exhaustive_optimum(inst, 3);
  CHECK(static_cast<double>(r.partitions) == count_partitions(5, 3));
  // Convex welfare: more cells never hurt, so the best 3-partition beats any 2-partition.
  CHECK(r.welfare >= exhaustive_optimum(inst, 2).welfare);
}

TEST_CASE("too many points are refused") {
  Points pts = Points::Zero(13, 1);
  for (Index i = 0; i < 13; ++i) pts(i, 0) = static_cast<double>(i);
  const auto inst = make_instance("big", pts, Vector::Constant(13, 1.0 / 13.0),
                                  Welfare(QuadraticWelfare{Matrix::Identity(1, 1), Vector::Zero(1)}));
  try {
    exhaustive_optimum(inst, 2);
    FAIL("expected kTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTooLarge);
  }
}

TEST_CASE("simplex solver") {
  // min x1 + 2 x2 subject to x1 + x2 = 1.
  Matrix A(1, 2);
  A << 1.0, 1.0;
  Vector b(1), c(2);
  b << 1.0;
  c << 1.0, 2.0;
  auto r = solve_lp(A, b, c);
  CHECK(r.status == LpResult::Status::kOptimal);
  CHECK(r.objective == doctest::Approx(1.0));
  CHECK(r.x[0] == doctest::Approx(1.0));

  b << -1.0;
  CHECK(solve_lp(A, b, c).status == LpResult::Status::kInfeasible);

  Matrix U(1, 2);
  U << 1.0, -1.0;
  Vector zero(1), down(2);
  zero << 0.0;
  down << -1.0, 0.0;
  CHECK(solve_lp(U, zero, down).status == LpResult::Status::kUnbounded);

  // A redundant row.
  Matrix R(2, 2);
  R << 1.0, 1.0, 2.0, 2.0;
  Vector rb(2);
  rb << 1.0, 2.0;
  CHECK(solve_lp(R, rb, c).objective == doctest::Approx(1.0));
}

TEST_CASE("bundled suite") {
  const auto suite = discrete_suite();
  REQUIRE(suite.size() == 12);
  for (const auto& inst : suite) {
    CAPTURE(inst.name);
    CHECK(inst.size() >= 4);
    CHECK(inst.size() <= 10);
    CHECK(inst.weights.sum() == doctest::Approx(1.0));
    const auto best = exhaustive_optimum(inst, inst.K_max);
    const auto s = solve(inst.problem(), inst.pool(), inst.K_max, {});
    CHECK(std::abs(s.welfare - best.welfare) <= 1e-9);
    const auto k = kantorovich_compare(inst, s.labels);
    CHECK(k.feasible);
    CHECK(std::abs(k.gap) <= 1e-7);
    CHECK(std::abs(k.monge_cost - k.lp_cost) <= 1e-7);
  }
}
