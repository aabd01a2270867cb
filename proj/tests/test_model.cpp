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
#include "infotransport/model.hpp"

using namespace infotransport;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector fd_gradient(const Welfare& w, const Vector& a) {
  Vector g(a.size());
  for (Index i = 0; i < a.size(); ++i) {
    Vector up = a, dn = a;
    up[i] += 1e-6;
    dn[i] -= 1e-6;
    g[i] = (w.value(up) - w.value(dn)) / 2e-6;
  }
  return g;
}

// Root of x^3 + x = y by bisection.
double cubic_root(double y) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid + mid < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("quadratic bregman cost") {
  Matrix H(2, 2);
  H << 1.0, 0.2, 0.2, -1.0;
  const Welfare w(QuadraticWelfare{H, vec({0.3, -0.1})});
  const Vector a = vec({0.5, -1.0}), b = vec({-0.2, 0.7});
  CHECK(bregman_cost(w, a, b) == doctest::Approx((b - a).dot(H * (b - a))));
  CHECK(quadratic_bregman<double>(H, a, b) == doctest::Approx(bregman_cost(w, a, b)));
  CHECK(bregman_cost(w, a, a) == doctest::Approx(0.0));
}

TEST_CASE("analytic gradients agree with finite differences") {
  const Welfare radial(RadialWelfare{Curve::power(1.0, 0.5)});
  const Welfare cylinder(CylinderWelfare{2, Curve::power(1.0, 0.5), Curve::polynomial({0.0, -1.0})});
  for (const Vector& a : {vec({0.4, -1.3}), vec({2.0, 0.1})})
    CHECK((radial.gradient(a) - fd_gradient(radial, a)).norm() < 1e-6);
  const Vector c = vec({0.4, -1.3, 0.8});
  CHECK((cylinder.gradient(c) - fd_gradient(cylinder, c)).norm() < 1e-6);

  EntropySumWelfare e;
  e.split = 2;
  e.y1 = vec({0.5, 0.5});
  e.y2 = vec({0.3, 0.7});
  e.phi1 = Curve::polynomial({0.0, 1.0, -2.0});
  e.phi2 = Curve::identity();
  const Welfare entropy(e);
  const Vector p = vec({0.1, 0.3, 0.25, 0.35});
  CHECK((entropy.gradient(p) - fd_gradient(entropy, p)).norm() < 1e-6);
  CHECK(gradient_consistency(radial, 3, 20, 1) < 1e-6);
}

TEST_CASE("norm welfare gradient") {
  const Welfare w(RadialWelfare{Curve::power(1.0, 0.5)});
  CHECK(w.value(vec({3.0, 4.0})) == doctest::Approx(5.0));
  CHECK((w.gradient(vec({1.7, 0.0})) - vec({1.0, 0.0})).norm() < 1e-12);
}

TEST_CASE("entropy bregman cost is nonnegative") {
  EntropySumWelfare e;
  e.split = 2;
  e.y1 = vec({1.0, 1.0});
  e.y2 = vec({1.0, 1.0});
  e.phi1 = Curve::identity();
  e.phi2 = Curve::identity();
  const Welfare w(e);
  const Vector a = vec({0.1, 0.4, 0.2, 0.3}), b = vec({0.3, 0.1, 0.5, 0.1});
  CHECK(bregman_cost(w, a, b) >= 0.0);
  CHECK(bregman_cost(w, b, a) >= 0.0);
}

TEST_CASE("hessian of structured welfare") {
  Matrix H(2, 2);
  H << 2.0, 0.5, 0.5, -1.0;
  const Welfare w(QuadraticWelfare{H, Vector::Zero(2)});
  CHECK((hessian_W(w, vec({0.3, 0.1})) - 2.0 * H).norm() < 1e-10);
}

TEST_CASE("moment maps") {
  const Vector omega = vec({1.0, 2.0});
  CHECK(apply_moment_map(IdentityMap{}, omega) == omega);
  const Vector r = apply_moment_map(RadialScalingMap{Curve::polynomial({1.0, 1.0})}, omega);
  CHECK((r - 6.0 * omega).norm() < 1e-12);
  Matrix A(1, 2);
  A << 1.0, -1.0;
  CHECK(apply_moment_map(LinearMap{A}, omega)[0] == doctest::Approx(-1.0));
  CHECK(moment_dimension(LinearMap{A}, 2) == 1);
  BlockScalingMap b;
  b.split = 1;
  b.psi1 = Curve::constant(2.0);
  b.psi2 = Curve::constant(3.0);
  CHECK((apply_moment_map(b, omega) - vec({2.0, 6.0})).norm() < 1e-12);
}

TEST_CASE("state equilibrium of the cubic game") {
  GeneralGameSpec game;
  game.map = CubicGame{};
  game.welfare = Welfare(QuadraticWelfare{Matrix::Identity(1, 1), Vector::Zero(1)});
  for (double y : {-2.0, 0.0, 1.0, 3.5}) {
    const Vector a = solve_state_equilibrium(game, vec({y}), vec({0.0}));
    CHECK(a[0] == doctest::Approx(cubic_root(y)).epsilon(1e-10));
  }
}

TEST_CASE("transport cost reduces to bregman cost in moment mode") {
  ProblemSpec p;
  p.space = StateSpace::euclidean(2);
  p.prior = GaussianPrior{Vector::Zero(2), Matrix::Identity(2, 2)};
  const Welfare w(RadialWelfare{Curve::polynomial({0.0, 0.0, 1.0})});
  p.game = MomentGame{w, IdentityMap{}};
  const Vector a = vec({0.5, 0.2}), b = vec({-1.0, 0.4});
  CHECK(transport_cost(p, a, b, w.gradient(a)) == doctest::Approx(bregman_cost(w, a, b)));
}

TEST_CASE("problem validation") {
  ProblemSpec p;
  p.space = StateSpace::euclidean(2);
  p.prior = GaussianPrior{Vector::Zero(2), Matrix::Identity(2, 2)};
  p.game = MomentGame{Welfare(QuadraticWelfare{Matrix::Identity(3, 3), Vector::Zero(3)}),
                      IdentityMap{}};
  CHECK_THROWS_AS(validate(p), Error);
  p.game = MomentGame{Welfare(QuadraticWelfare{Matrix::Identity(2, 2), Vector::Zero(2)}),
                      IdentityMap{}};
  CHECK_NOTHROW(validate(p));
}
