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
#include <functional>
#include <string>

#include "infotransport/curve.hpp"
#include "infotransport/model.hpp"
#include "infotransport/priors.hpp"
#include "infotransport/types.hpp"
#include "infotransport/verifier.hpp"

namespace infotransport {

/// Grid maximum of a one-dimensional maximality inequality.
struct ConditionReport {
  double max_value = 0.0;
  double argmax = 0.0;
  double upper = 0.0;  // right end of the searched interval
  double tolerance = 1e-8;
  bool holds = true;
};

struct ClosedFormPolicy {
  enum class Name { kQuadraticElliptical, kSpherical, kCylinder, kDirichlet };

  Name name = Name::kQuadraticElliptical;
  Welfare welfare;
  MomentMapSpec map;
  std::function<Vector(const Vector&)> evaluate;
  std::function<Vector(const Vector&)> project;
  bool optimal = true;
  bool unique = false;
  std::string note;

  // quadratic_elliptical
  Matrix H;
  Matrix sigma;
  Matrix basis;       // columns span the support
  Matrix projection;  // a = projection * omega
  double schur_max = 0.0;

  // spherical and cylinder
  double alpha = 0.0;
  int split = 0;  // block-1 dimension (L for spherical)

  // dirichlet
  Vector gamma;
  Vector gamma_se;
  Vector gamma_quadrature;

  std::vector<ConditionReport> conditions;

  Policy policy() const;
  ProblemSpec problem(StateSpace space, PriorSpec prior) const;
};

std::string to_string(ClosedFormPolicy::Name name);

/// Maximizes f over [lo, hi] on a 2048-point grid, then refines by golden
/// section around the best grid point.
ConditionReport maximize_condition(const std::function<double(double)>& f,
                                   double lo, double hi, double tol = 1e-8);

ClosedFormPolicy quadratic_elliptical(const Matrix& H, const Matrix& sigma);

/// W(a) = phi(|a|^2), g(omega) = psi(|omega|^2) omega, density
/// mu(|omega|^2) on R^L.
ClosedFormPolicy spherical(const Curve& psi, const Curve& mu, const Curve& phi,
                           int L);

/// W(a) = phi1(|a_1|^2) + phi2(|a_2|^2), g(omega) = psi(|omega_1|^2) omega,
/// density mu1(|omega_1|^2) times an even law on omega_2.
ClosedFormPolicy cylinder(const Curve& psi, const Curve& mu1,
                          const Curve& phi1, const Curve& phi2, int L1,
                          int L2);

/// True when the odd moments of the omega_2 block (columns split onward) are
/// within sigmas standard errors of zero.
bool block_evenness_probe(const SamplePool& pool, int split,
                          double sigmas = 6.0);

struct DirichletParams {
  Vector alpha;
  int split = 1;
  Curve psi1 = Curve::constant(1.0);
  Curve psi2 = Curve::constant(1.0);
  double q1 = 1.0;
  double q2 = 1.0;
  Vector y1;  // defaults to ones
  Vector y2;
  Curve phi1 = Curve::identity();
  Curve phi2 = Curve::identity();
  Index samples = 200000;
  std::uint64_t seed = 0;
};

ClosedFormPolicy dirichlet_policy(const DirichletParams& params);

/// sum_i w_i W(a(omega_i)) over the pool.
double pool_welfare(const Welfare& welfare, const Points& values,
                    const Vector& weights);

}  // namespace infotransport
