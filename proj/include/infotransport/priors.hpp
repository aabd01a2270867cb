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
#include <variant>
#include <vector>

#include "infotransport/curve.hpp"
#include "infotransport/types.hpp"

namespace infotransport {

using Index = Eigen::Index;
using Mask = std::vector<bool>;

struct StateSpace {
  enum class Domain { kEuclidean, kBox, kBall, kSimplex };

  int dimension = 1;
  Domain domain = Domain::kEuclidean;
  Vector lower;  // box only
  Vector upper;  // box only
  double radius = 0.0;  // ball only

  static StateSpace euclidean(int dimension);
  static StateSpace box(Vector lower, Vector upper);
  static StateSpace ball(int dimension, double radius);
  static StateSpace simplex(int dimension);

  void validate() const;
  bool contains(const Eigen::Ref<const Vector>& omega, double tol = 1e-12) const;
};

struct GaussianPrior {
  Vector mean;
  Matrix covariance;
};

// Density proportional to radial_density(omega^T sigma^{-1} omega).
struct EllipticalPrior {
  Matrix sigma;
  Curve radial_density;
};

struct DirichletPrior {
  Vector alpha;
};

struct UniformPrior {
  Vector lower;
  Vector upper;
};

// A finite prior; sampling returns the atoms themselves.
struct DiscretePrior {
  Points points;
  Vector weights;
};

// Rejection sampling against the constant envelope density_bound on a box.
struct CustomPrior {
  std::function<double(const Vector&)> density;
  Vector lower;
  Vector upper;
  double density_bound = 1.0;
};

using PriorSpec = std::variant<GaussianPrior, EllipticalPrior, DirichletPrior,
                               UniformPrior, DiscretePrior, CustomPrior>;

int prior_dimension(const PriorSpec& prior);
void validate(const PriorSpec& prior, const StateSpace& space);

/// Weighted point cloud standing in for the prior. Immutable once built.
struct SamplePool {
  Points points;
  Vector weights;
  std::uint64_t seed = 0;

  Index size() const { return points.rows(); }
  Index dimension() const { return points.cols(); }
};

SamplePool make_pool(Points points, Vector weights, std::uint64_t seed = 0);

/// Draws n equal-weight points. Bit-for-bit deterministic in (prior, n, seed).
SamplePool sample(const PriorSpec& prior, const StateSpace& space, Index n,
                  std::uint64_t seed);

using VectorField = std::function<Vector(const Vector&)>;

/// Weighted mean of f over the pool, using pairwise summation.
Vector expect(const SamplePool& pool, const VectorField& f);

/// Weighted mean of f over the masked points; throws kEmptyCell if the mask
/// carries no weight.
Vector conditional_expect(const SamplePool& pool, const Mask& mask,
                          const VectorField& f);

/// Row-weighted mean of precomputed values (n x d), optionally masked.
Vector weighted_mean(const Points& values, const Vector& weights,
                     const Mask* mask = nullptr);

/// Ratio of the radial integrals int r^L mu(r^2) psi(r^2) dr and
/// int r^(L-1) mu(r^2) dr over [0, inf).
double radial_alpha(const std::function<double(double)>& radial_density,
                    const std::function<double(double)>& scaling, int dimension);

/// Radius past which r^(L-1) mu(r^2) has fallen below 1e-14 of its peak.
double radial_cutoff(const std::function<double(double)>& radial_density,
                     int dimension);

/// Integral of f over [0, inf) with the tail cut where f < 1e-14 * peak.
double integrate_half_line(const std::function<double(double)>& f);

namespace detail {

// Deterministic pairwise summation of n values spaced by stride.
double pairwise_sum(const double* data, Index n, Index stride = 1);

}  // namespace detail

template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& v) {
  const auto eval = v.derived().eval();
  static_assert(std::is_same_v<typename Derived::Scalar, double>);
  return detail::pairwise_sum(eval.data(), eval.size(), 1);
}

}  // namespace infotransport
