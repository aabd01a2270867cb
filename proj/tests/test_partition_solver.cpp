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
#include <limits>
#include <random>

#include "doctest.h"

#include "infotransport/error.hpp"
#include "infotransport/partition_solver.hpp"

using namespace infotransport;

namespace {

ProblemSpec moment_problem(const Welfare& w, int dim, PriorSpec prior) {
  ProblemSpec p;
  p.space = StateSpace::euclidean(dim);
  p.prior = std::move(prior);
  p.game = MomentGame{w, IdentityMap{}};
  return p;
}

Welfare quadratic(const Matrix& H) { return Welfare(QuadraticWelfare{H, Vector::Zero(H.rows())}); }

Welfare square_1d() { return quadratic(Matrix::Identity(1, 1)); }

SamplePool line_pool(std::initializer_list<double> xs) {
  Points pts(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return make_pool(pts, Vector::Constant(pts.rows(), 1.0 / pts.rows()));
}

Mask all(Index n) { return Mask(static_cast<size_t>(n), true); }

// Brute force over every labeling with at most K labels.
double brute_force(const ProblemSpec& p, const SamplePool& pool, int K) {
  const Index n = pool.size();
  const auto& w = p.moment().welfare;
  double best = -std::numeric_limits<double>::infinity();
  Labels labels(static_cast<size_t>(n), 0);
  const long total = static_cast<long>(std::pow(K, n));
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (Index i = 0; i < n; ++i, c /= K) labels[static_cast<size_t>(i)] = static_cast<int>(c % K);
    double value = 0.0;
    for (int k = 0; k < K; ++k) {
      Vector sum = Vector::Zero(pool.dimension());
      double mass = 0.0;
      for (Index i = 0; i < n; ++i)
        if (labels[static_cast<size_t>(i)] == k) {
          sum += pool.weights[i] * pool.points.row(i).transpose();
          mass += pool.weights[i];
        }
      if (mass > 0.0) value += mass * w.value(sum / mass);
    }
    best = std::max(best, value);
  }
  return best;
}

GaussianPrior gaussian(int d) { return {Vector::Zero(d), Matrix::Identity(d, d)}; }

}  // namespace

TEST_CASE("cell actions") {
  const auto p = moment_problem(square_1d(), 1, gaussian(1));
  const auto pool = line_pool({1.0, 3.0});
  CHECK(cell_action(p, pool, all(2))[0] == doctest::Approx(2.0));

  GeneralGameSpec game;
  game.map = CubicGame{};
  game.welfare = square_1d();
  ProblemSpec g{StateSpace::euclidean(1), gaussian(1), game};
  // a^3 + a = 1
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid + mid < 1.0 ? lo : hi) = mid;
  }
  CHECK(cell_action(g, line_pool({0.0, 2.0}), all(2))[0] == doctest::Approx(lo).epsilon(1e-9));
}

TEST_CASE("cell multipliers") {
  Matrix H(2, 2);
  H << 1.0, 0.5, 0.5, -2.0;
  const auto p = moment_problem(quadratic(H), 2, gaussian(2));
  Points pts(2, 2);
  pts << 1.0, 0.0, 0.0, 1.0;
  const auto pool = make_pool(pts, Vector::Constant(2, 0.5));
  Vector a(2);
  a << 0.5, 0.5;
  CHECK((cell_multiplier(p, pool, all(2), a) - 2.0 * H * a).norm() < 1e-12);

  const auto norm = moment_problem(Welfare(RadialWelfare{Curve::power(1.0, 0.5)}), 2, gaussian(2));
  Vector b(2);
  b << 1.3, 0.0;
  CHECK((cell_multiplier(norm, pool, all(2), b) - Vector::Unit(2, 0)).norm() < 1e-12);

  GeneralGameSpec game;
  game.action_dimension = 2;
  game.map = LinearGame{Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2)};
  game.welfare = quadratic(H);
  ProblemSpec g{StateSpace::euclidean(2), gaussian(2), game};
  // D_aG = -I, so x^T = E[grad W] (-I)^{-1}.
  CHECK((cell_multiplier(g, pool, all(2), a) + 2.0 * H * a).norm() < 1e-10);
}

TEST_CASE("assignment rules") {
  const auto p = moment_problem(square_1d(), 1, gaussian(1));
  const auto pool = line_pool({-2.0, -0.1, 0.1, 2.0});
  Matrix actions(2, 1);
  actions << -1.0, 1.0;
  const Labels l = assign(p, pool, actions, 2.0 * actions);
  CHECK(l == Labels{0, 0, 1, 1});

  Matrix b(2, 1);
  b << 0.5, 2.5;
  const Labels m = assign(p, line_pool({1.4, 1.6}), b, 2.0 * b);
  CHECK(m == Labels{0, 1});

  Matrix one(1, 1);
  one << 0.0;
  CHECK(assign(p, pool, one, one) == Labels{0, 0, 0, 0});

  Matrix tie(2, 1);
  tie << -1.0, 1.0;
  CHECK(assign(p, line_pool({0.0}), tie, 2.0 * tie) == Labels{0});
}

TEST_CASE("welfare of labelings") {
  const auto p = moment_problem(square_1d(), 1, gaussian(1));
  const auto pool = line_pool({0.0, 2.0});
  Matrix split(2, 1);
  split << 0.0, 2.0;
  CHECK(welfare(p, pool, {0, 1}, split) == doctest::Approx(2.0));
  Matrix pooled(1, 1);
  pooled << 1.0;
  CHECK(welfare(p, pool, {0, 0}, pooled) == doctest::Approx(1.0));
}

TEST_CASE("K = 1 gives no-information welfare") {
  Matrix H(2, 2);
  H << 1.0, 0.0, 0.0, -1.0;
  const auto p = moment_problem(quadratic(H), 2, gaussian(2));
  const auto pool = sample(p.prior, p.space, 3000, 2);
  const auto s = solve(p, pool, 1, {});
  const Vector m = weighted_mean(pool.points, pool.weights);
  CHECK(s.cell_count() == 1);
  CHECK(s.converged);
  CHECK(s.welfare == doctest::Approx(m.dot(H * m)).epsilon(1e-12));
}

TEST_CASE("strictly concave welfare collapses to one action") {
  const auto p = moment_problem(quadratic(-Matrix::Identity(2, 2)), 2, gaussian(2));
  const auto pool = sample(p.prior, p.space, 3000, 4);
  const Vector m = weighted_mean(pool.points, pool.weights);
  for (int K : {2, 8}) {
    const auto s = solve(p, pool, K, {});
    for (Index k = 0; k < s.actions.rows(); ++k)
      CHECK((s.actions.row(k).transpose() - m).norm() <= 1e-6);
  }
}

TEST_CASE("solution invariants on a convex instance") {
  Matrix H(2, 2);
  H << 1.0, 0.3, 0.3, 0.5;
  const auto p = moment_problem(quadratic(H), 2, gaussian(2));
  const auto pool = sample(p.prior, p.space, 4000, 8);
  const auto s = solve(p, pool, 6, {});
  REQUIRE(s.converged);
  CHECK(s.assign_changes == 0);
  CHECK(std::abs(s.welfare - welfare(p, pool, s.labels, s.actions)) <= 1e-10);
  for (int k = 0; k < s.cell_count(); ++k) {
    Mask mask(s.labels.size());
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = s.labels[i] == k;
    CHECK((weighted_mean(pool.points, pool.weights, &mask) - s.actions.row(k).transpose()).norm() < 1e-14);
    CHECK((s.multipliers.row(k).transpose() - 2.0 * H * s.actions.row(k).transpose()).norm() < 1e-12);
  }
  CHECK(assign(p, pool, s.actions, s.multipliers) == s.labels);
  for (size_t t = 1; t < s.trace.size(); ++t)
    CHECK(s.trace[t] >= s.trace[t - 1] - 1e-12 * std::max(1.0, std::abs(s.trace[t - 1])));
  CHECK(convex_cells_check(p, pool, s).violations == 0);
}

TEST_CASE("best welfare is nondecreasing in K") {
  Matrix H(2, 2);
  H << 1.0, 0.0, 0.0, -0.5;
  const auto p = moment_problem(quadratic(H), 2, gaussian(2));
  const auto pool = sample(p.prior, p.space, 2000, 3);
  double last = -std::numeric_limits<double>::infinity();
  for (int K : {1, 2, 4, 8}) {
    const double w = solve(p, pool, K, {}).welfare;
    CHECK(w >= last - 1e-12);
    last = w;
  }
}

TEST_CASE("thread count does not change the result") {
  const auto p = moment_problem(Welfare(RadialWelfare{Curve::power(1.0, 0.5)}), 2, gaussian(2));
  const auto pool = sample(p.prior, p.space, 2000, 6);
  SolverConfig one;
  SolverConfig many;
  many.threads = 3;
  const auto a = solve(p, pool, 8, one);
  const auto b = solve(p, pool, 8, many);
  CHECK(a.labels == b.labels);
  CHECK(a.actions == b.actions);
  CHECK(a.welfare == b.welfare);
  CHECK(a.restart_welfare == b.restart_welfare);
}

TEST_CASE("matches brute force on small pools") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  Matrix H(2, 2);
  H << 1.0, 0.4, 0.4, -1.0;
  for (int trial = 0; trial < 3; ++trial) {
    Points pts(7, 2);
    for (Index i = 0; i < pts.size(); ++i) pts.data()[i] = normal(rng);
    const auto pool = make_pool(pts, Vector::Constant(7, 1.0 / 7.0));
    const auto p = moment_problem(quadratic(H), 2, DiscretePrior{pts, Vector::Constant(7, 1.0)});
    for (int K : {2, 3})
      CHECK(solve(p, pool, K, {}).welfare == doctest::Approx(brute_force(p, pool, K)).epsilon(1e-9));
  }
}

TEST_CASE("general mode agrees with moment mode when G = omega - a") {
  Matrix H(2, 2);
  H << 1.0, 0.2, 0.2, 0.8;
  const auto m = moment_problem(quadratic(H), 2, gaussian(2));
  GeneralGameSpec game;
  game.action_dimension = 2;
  game.map = LinearGame{Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2)};
  game.welfare = quadratic(H);
  ProblemSpec g{m.space, m.prior, game};
  const auto pool = sample(m.prior, m.space, 2000, 12);
  const auto a = solve(m, pool, 3, {});
  const auto b = solve(g, pool, 3, {});
  CHECK(a.welfare == doctest::Approx(b.welfare).epsilon(1e-9));
}

TEST_CASE("config validation") {
  SolverConfig c;
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  SolverConfig d;
  d.damping = 0.0;
  CHECK_THROWS_AS(d.validate(), Error);
  const auto p = moment_problem(square_1d(), 1, gaussian(1));
  CHECK_THROWS_AS(solve(p, line_pool({1.0}), 0, {}), Error);
}
