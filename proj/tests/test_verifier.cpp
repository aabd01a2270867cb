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
#include <random>

#include "doctest.h"

#include "infotransport/closed_forms.hpp"
#include "infotransport/verifier.hpp"

using namespace infotransport;

namespace {

struct Instance {
  ClosedFormPolicy oracle;
  ProblemSpec problem;
  SamplePool pool;
};

Instance saddle(Index n) {
  Matrix H(2, 2);
  H << 1.0, 0.0, 0.0, -1.0;
  Instance inst{quadratic_elliptical(H, Matrix::Identity(2, 2)), {}, {}};
  const auto space = StateSpace::euclidean(2);
  const PriorSpec prior = GaussianPrior{Vector::Zero(2), Matrix::Identity(2, 2)};
  inst.problem = inst.oracle.problem(space, prior);
  inst.pool = sample(prior, space, n, 21);
  return inst;
}

VerifyConfig quick() {
  VerifyConfig c;
  c.n_probe = 1000;
  c.n_pairs = 500;
  c.n_tuples = 300;
  return c;
}

}  // namespace

TEST_CASE("oracle policy passes every check") {
  const auto inst = saddle(3000);
  const auto policy = evaluate_on(inst.oracle.policy(), inst.pool);
  const auto report = diagnose(policy, inst.problem, inst.pool, quick());
  CHECK(report.passed());
  CHECK(report.failed_checks().empty());
  REQUIRE(report.find("cyclical_monotonicity") != nullptr);
  CHECK(report.cyclical_violations == 0);
  CHECK(report.dim_bound == doctest::Approx(1.0));
}

TEST_CASE("perturbed policies fail named checks") {
  const auto inst = saddle(3000);
  const auto policy = evaluate_on(inst.oracle.policy(), inst.pool);
  for (const auto& bad : {scale_support(policy), displace_neighborhood(policy, inst.pool),
                          swap_neighborhoods(policy, inst.pool)}) {
    const auto report = diagnose(bad, inst.problem, inst.pool, quick());
    CHECK_FALSE(report.passed());
    CHECK_FALSE(report.failed_checks().empty());
  }
}

TEST_CASE("support points have nonpositive phi") {
  const auto inst = saddle(500);
  const auto policy = evaluate_on(inst.oracle.policy(), inst.pool);
  const auto& w = inst.oracle.welfare;
  for (Index i = 0; i < 50; ++i)
    CHECK(phi(policy.policy, w, policy.values.row(i).transpose()) <= 1e-12);
}

TEST_CASE("no information under convex welfare fails the pointwise cost check") {
  const auto space = StateSpace::euclidean(2);
  const PriorSpec prior = GaussianPrior{Vector::Zero(2), Matrix::Identity(2, 2)};
  ProblemSpec p{space, prior,
                MomentGame{Welfare(QuadraticWelfare{Matrix::Identity(2, 2), Vector::Zero(2)}),
                           IdentityMap{}}};
  const auto pool = sample(prior, space, 2000, 2);
  const auto s = solve(p, pool, 1, {});
  const auto report = diagnose(partition_policy(p, s), p, pool, quick());
  CHECK_FALSE(report.passed());
  const auto* pc = report.find("pointwise_cost");
  REQUIRE(pc != nullptr);
  CHECK_FALSE(pc->passed);
}

TEST_CASE("converged convex partitions are cyclically monotone") {
  const auto space = StateSpace::euclidean(2);
  const PriorSpec prior = GaussianPrior{Vector::Zero(2), Matrix::Identity(2, 2)};
  Matrix H(2, 2);
  H << 1.0, 0.2, 0.2, 0.4;
  ProblemSpec p{space, prior, MomentGame{Welfare(QuadraticWelfare{H, Vector::Zero(2)}), IdentityMap{}}};
  const auto pool = sample(prior, space, 3000, 5);
  const auto s = solve(p, pool, 8, {});
  REQUIRE(s.converged);
  const auto policy = partition_policy(p, s);
  CHECK(cyclical_monotonicity_check(policy, p, pool, quick()).count == 0);
  CHECK(pointwise_conditions_check(policy, p, pool, quick())[1].passed);
}

TEST_CASE("box counting dimension") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Points line(4096, 2), square(4096, 2);
  for (Index i = 0; i < 4096; ++i) {
    const double t = u(rng);
    line.row(i) << t, 0.5 * t;
    square.row(i) << u(rng), u(rng);
  }
  CHECK(std::abs(box_counting_dimension(line) - 1.0) < 0.15);
  CHECK(std::abs(box_counting_dimension(square) - 2.0) < 0.3);
}

TEST_CASE("mean consistency flags biased actions") {
  const auto inst = saddle(4000);
  auto policy = evaluate_on(inst.oracle.policy(), inst.pool);
  CHECK(mean_consistency_check(policy, inst.problem, inst.pool, quick()).passed);
  policy.values.col(0) *= 1.1;
  CHECK_FALSE(mean_consistency_check(policy, inst.problem, inst.pool, quick()).passed);
}
