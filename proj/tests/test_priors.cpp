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
#include <numbers>

#include "doctest.h"

#include "infotransport/error.hpp"
#include "infotransport/priors.hpp"

using namespace infotransport;

namespace {

GaussianPrior standard_gaussian(int d) {
  return {Vector::Zero(d), Matrix::Identity(d, d)};
}

}  // namespace

TEST_CASE("sampling is deterministic in the seed") {
  const auto space = StateSpace::euclidean(2);
  const auto a = sample(standard_gaussian(2), space, 500, 42);
  const auto b = sample(standard_gaussian(2), space, 500, 42);
  const auto c = sample(standard_gaussian(2), space, 500, 43);
  CHECK(a.points == b.points);
  CHECK(a.weights == b.weights);
  CHECK(a.points != c.points);
  CHECK(a.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gaussian moments") {
  Matrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  Vector mean(2);
  mean << 1.0, -2.0;
  const auto pool = sample(GaussianPrior{mean, cov}, StateSpace::euclidean(2), 40000, 5);
  const Vector m = weighted_mean(pool.points, pool.weights);
  CHECK((m - mean).norm() < 5.0 * std::sqrt(2.0 / 40000.0));
  const Points centered = pool.points.rowwise() - m.transpose();
  const Matrix emp = centered.transpose() * pool.weights.asDiagonal() * centered;
  CHECK((emp - cov).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("dirichlet samples lie on the simplex with the right mean") {
  Vector alpha(3);
  alpha << 1.0, 2.0, 3.0;
  const auto pool = sample(DirichletPrior{alpha}, StateSpace::simplex(3), 20000, 9);
  for (Index i = 0; i < pool.size(); ++i) {
    CHECK(pool.points.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pool.points.row(i).minCoeff() >= 0.0);
  }
  const Vector m = weighted_mean(pool.points, pool.weights);
  CHECK((m - alpha / alpha.sum()).norm() < 0.01);
}

TEST_CASE("uniform samples stay in the box") {
  Vector lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 1.0, 3.0;
  const auto pool = sample(UniformPrior{lo, hi}, StateSpace::box(lo, hi), 2000, 1);
  for (Index i = 0; i < pool.size(); ++i)
    CHECK(StateSpace::box(lo, hi).contains(pool.points.row(i).transpose()));
}

TEST_CASE("discrete prior pools the atoms with normalized weights") {
  Points pts(3, 1);
  pts << 0.0, 1.0, 5.0;
  Vector w(3);
  w << 1.0, 1.0, 2.0;
  const auto pool = sample(DiscretePrior{pts, w}, StateSpace::euclidean(1), 100, 0);
  REQUIRE(pool.size() == 3);
  CHECK(pool.weights[2] == doctest::Approx(0.5));
  CHECK(weighted_mean(pool.points, pool.weights)[0] == doctest::Approx(2.75));
}

TEST_CASE("masked means and empty cells") {
  Points pts(4, 1);
  pts << 1.0, 3.0, 10.0, 20.0;
  const auto pool = make_pool(pts, Vector::Constant(4, 0.25));
  Mask mask{true, true, false, false};
  CHECK(weighted_mean(pool.points, pool.weights, &mask)[0] == doctest::Approx(2.0));
  const auto square = [](const Vector& v) { return Vector(v.array().square()); };
  CHECK(conditional_expect(pool, mask, square)[0] == doctest::Approx(5.0));
  Mask none(4, false);
  try {
    conditional_expect(pool, none, square);
    FAIL("expected an empty-cell error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyCell);
  }
}

TEST_CASE("radial alpha matches the half-normal moments") {
  const auto mu = [](double y) { return std::exp(-0.5 * y); };
  const auto one = [](double) { return 1.0; };
  // E|r| for the radial law of a standard gaussian in L dimensions.
  CHECK(radial_alpha(mu, one, 1) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-9));
  CHECK(radial_alpha(mu, one, 2) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-9));
  CHECK(radial_alpha(mu, one, 3) == doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("pairwise summation is exact on integers") {
  Vector v(1001);
  for (Index i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  CHECK(pairwise_sum(v) == 500500.0);
}

TEST_CASE("invalid priors are rejected") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(validate(GaussianPrior{Vector::Zero(2), bad}, StateSpace::euclidean(2)), Error);
  Vector alpha(2);
  alpha << 1.0, 0.0;
  CHECK_THROWS_AS(validate(DirichletPrior{alpha}, StateSpace::simplex(2)), Error);
  CHECK_THROWS_AS(validate(standard_gaussian(3), StateSpace::euclidean(2)), Error);
}
