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
#include <string>
#include <vector>

#include "infotransport/model.hpp"
#include "infotransport/priors.hpp"
#include "infotransport/types.hpp"

namespace infotransport {

constexpr Index kMaxDiscretePoints = 12;

/// A finite moment-persuasion instance small enough to enumerate.
struct DiscreteInstance {
  std::string name;
  Points points;
  Vector weights;  // sums to 1
  Points g;        // moment values, n x M
  Welfare welfare;
  MomentMapSpec map;
  int K_max = 1;

  Index size() const { return points.rows(); }
  SamplePool pool() const;
  ProblemSpec problem() const;
};

DiscreteInstance make_instance(std::string name, Points points, Vector weights,
                               Welfare welfare, MomentMapSpec map = IdentityMap{},
                               int K_max = 2);

/// Number of set partitions of n items into at most K blocks.
double count_partitions(int n, int K);

struct ExhaustiveResult {
  double welfare = 0.0;
  Labels labels;
  Matrix actions;
  std::uint64_t partitions = 0;
};

/// Best welfare over all set partitions with at most K blocks.
ExhaustiveResult exhaustive_optimum(const DiscreteInstance& instance, int K);

/// min c^T x subject to A x = b, x >= 0.
struct LpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
  Status status = Status::kOptimal;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

std::string to_string(LpResult::Status status);

/// Two-phase dense tableau simplex with Bland's rule.
LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c,
                  double tol = 1e-11);

struct KantorovichReport {
  bool feasible = true;
  std::string status;
  double lp_cost = 0.0;
  double monge_cost = 0.0;
  double gap = 0.0;  // monge - lp
  Matrix coupling;   // cells x n
  int iterations = 0;
};

/// Optimal coupling of the prior with the labeling's action law under the
/// conditional-mean constraint, against the labeling's own transport cost.
KantorovichReport kantorovich_compare(const DiscreteInstance& instance,
                                      const Labels& labels);

/// The bundled suite; each instance's K_max is the K it is solved at.
std::vector<DiscreteInstance> discrete_suite();

}  // namespace infotransport
