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

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "infotransport/curve.hpp"
#include "infotransport/priors.hpp"
#include "infotransport/types.hpp"

namespace infotransport {

// ------------------------------------------------------------------ welfare

/// W(a) = a^T H a + b^T a.
struct QuadraticWelfare {
  Matrix H;
  Vector b;
};

/// W(a) = phi(|a|^2).
struct RadialWelfare {
  Curve phi;
};

/// W(a) = phi1(|a1|^2) + phi2(|a2|^2) with a = (a1, a2), a1 of length split.
struct CylinderWelfare {
  int split = 1;
  Curve phi1;
  Curve phi2;
};

/// W(a) = sum_i q_i E_i(a_i) + phi_i(1^T a_i) with E_i(a) = sum_j a_j
/// log(a_j / y_ij) and 0 log 0 = 0. Blocks a_1 = a[0, split), a_2 the rest.
struct EntropySumWelfare {
  int split = 1;
  double q1 = 1.0;
  double q2 = 1.0;
  Vector y1;
  Vector y2;
  Curve phi1;
  Curve phi2;
};

/// Arbitrary welfare. Missing derivatives fall back to central differences.
struct CustomWelfare {
  int dimension = 1;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

using WelfareSpec = std::variant<QuadraticWelfare, RadialWelfare,
                                 CylinderWelfare, EntropySumWelfare,
                                 CustomWelfare>;

/// Welfare over actions with analytic derivatives for every structured kind.
class Welfare {
 public:
  Welfare() = default;
  explicit Welfare(WelfareSpec spec);

  double value(const Vector& a) const;
  Vector gradient(const Vector& a) const;
  Matrix hessian(const Vector& a) const;

  /// Fixed action dimension, or -1 when any dimension is accepted.
  int dimension() const;
  const WelfareSpec& spec() const { return spec_; }

 private:
  WelfareSpec spec_;
};

/// Bregman cost c(a, b) = W(b) - W(a) + grad W(a)^T (a - b).
double bregman_cost(const Welfare& welfare, const Vector& a, const Vector& b);

/// Hessian of W: analytic for structured kinds, symmetrized central
/// differences with step 1e-4 (1 + |a|) otherwise.
Matrix hessian_W(const Welfare& welfare, const Vector& a);

/// Bregman cost of a quadratic form, written directly: (b - a)^T H (b - a).
template <typename Scalar>
Scalar quadratic_bregman(const MatrixX<Scalar>& H, const VectorX<Scalar>& a,
                         const VectorX<Scalar>& b) {
  const VectorX<Scalar> d = b - a;
  return d.dot(H * d);
}

// --------------------------------------------------------------- moment map

struct IdentityMap {};

struct LinearMap {
  Matrix A;  // M x L
};

/// g(omega) = omega * psi(|omega|^2).
struct RadialScalingMap {
  Curve psi;
};

/// Blockwise g = (psi1(s1) omega_1, psi2(s2) omega_2), where s is the block sum
/// (simplex priors) or the block squared norm.
struct BlockScalingMap {
  enum class Statistic { kSum, kSquaredNorm };
  int split = 1;
  Statistic statistic = Statistic::kSum;
  Curve psi1;
  Curve psi2;
};

struct CustomMap {
  int output_dimension = 1;
  bool injective = false;
  std::function<Vector(const Vector&)> map;
};

using MomentMapSpec = std::variant<IdentityMap, LinearMap, RadialScalingMap,
                                   BlockScalingMap, CustomMap>;

Vector apply_moment_map(const MomentMapSpec& map, const Vector& omega);
int moment_dimension(const MomentMapSpec& map, int state_dimension);
bool is_declared_injective(const MomentMapSpec& map);

/// Applies g to every pool point (n x M).
Points moment_values(const MomentMapSpec& map, const SamplePool& pool);

// ------------------------------------------------------------- general game

/// G(a, omega) = B omega - C a + c.
struct LinearGame {
  Matrix B;
  Matrix C;
  Vector c;
};

/// G(a, omega) = omega - a^3 - a, coordinatewise.
struct CubicGame {};

struct CustomGame {
  std::function<Vector(const Vector&, const Vector&)> G;
  std::function<Matrix(const Vector&, const Vector&)> jacobian_action;
  std::function<Matrix(const Vector&, const Vector&)> jacobian_state;
};

using GameMapSpec = std::variant<LinearGame, CubicGame, CustomGame>;

/// W(a, omega) = a^T H a + b^T a + a^T R omega + omega^T S omega.
struct QuadraticJointWelfare {
  Matrix H;
  Vector b;
  Matrix R;
  Matrix S;
};

struct CustomJointWelfare {
  std::function<double(const Vector&, const Vector&)> value;
  std::function<Vector(const Vector&, const Vector&)> gradient_action;
};

/// Welfare of the general game: an action-only welfare or a joint one.
using JointWelfareSpec =
    std::variant<Welfare, QuadraticJointWelfare, CustomJointWelfare>;

struct GeneralGameSpec {
  int action_dimension = 1;
  GameMapSpec map;
  JointWelfareSpec welfare;
  double epsilon = 1.0;  // declared monotonicity constant

  Vector G(const Vector& a, const Vector& omega) const;
  Matrix jacobian_action(const Vector& a, const Vector& omega) const;
  Matrix jacobian_state(const Vector& a, const Vector& omega) const;
  double W(const Vector& a, const Vector& omega) const;
  Vector gradient_W(const Vector& a, const Vector& omega) const;
};

/// Unique a with G(a, omega) = 0: damped Newton, then the contraction
/// a <- a + epsilon G(a, omega).
Vector solve_state_equilibrium(const GeneralGameSpec& game, const Vector& omega,
                               const Vector& start, double tol = 1e-12);

// ------------------------------------------------------------------ problem

struct MomentGame {
  Welfare welfare;
  MomentMapSpec map;
};

struct ProblemSpec {
  StateSpace space;
  PriorSpec prior;
  std::variant<MomentGame, GeneralGameSpec> game;

  bool is_moment() const { return std::holds_alternative<MomentGame>(game); }
  const MomentGame& moment() const { return std::get<MomentGame>(game); }
  const GeneralGameSpec& general() const {
    return std::get<GeneralGameSpec>(game);
  }
  int action_dimension() const;
};

/// Checks dimensions, welfare parameters, gradients against finite
/// differences, and (general mode) the monotonicity probe.
void validate(const ProblemSpec& problem, std::uint64_t probe_seed = 0);

/// c(a, omega; x) = W(a*(omega), omega) - W(a, omega) + x^T G(a, omega).
/// Moment mode uses G = a - g(omega), so x = grad W(a) gives the Bregman cost.
double transport_cost(const ProblemSpec& problem, const Vector& a,
                      const Vector& omega, const Vector& x);

/// Largest relative gap between analytic and central-difference gradients
/// over random probes.
double gradient_consistency(const Welfare& welfare, int dimension, int probes,
                            std::uint64_t seed, double scale = 1.0);

}  // namespace infotransport
