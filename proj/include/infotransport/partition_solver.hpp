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
#include <vector>

#include "infotransport/model.hpp"
#include "infotransport/priors.hpp"
#include "infotransport/types.hpp"

namespace infotransport {

struct SolverConfig {
  enum class EmptyCellPolicy { kDrop, kReseedFarthest };

  int max_iterations = 500;
  // Fraction of points allowed to change label at convergence.
  double tol_assignment = 0.0;
  // Relative residual for per-cell equilibrium solves.
  double tol_eq = 1e-9;
  int restarts = 8;
  EmptyCellPolicy empty_cell_policy = EmptyCellPolicy::kDrop;
  // Initial multiplier step; halved whenever a proposal lowers welfare.
  double damping = 1.0;
  // Merge and single-point transfer moves once plain alternation stalls.
  bool local_moves = true;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

/// A K-cell partition of the pool. Cells are compacted: labels index rows of
/// actions, and every row is a nonempty cell.
struct PartitionSolution {
  Labels labels;
  Matrix actions;      // cells x M
  Matrix multipliers;  // cells x M
  double welfare = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;

  int requested_cells = 0;
  int best_restart = 0;
  std::vector<double> restart_welfare;
  // Labels that one more assignment pass would change.
  Index assign_changes = 0;

  int cell_count() const { return static_cast<int>(actions.rows()); }
};

/// Equilibrium action of the masked cell: the conditional g-mean in moment
/// mode, otherwise the root of E[G(a, omega) | mask] by damped Newton with a
/// contraction fallback.
Vector cell_action(const ProblemSpec& problem, const SamplePool& pool,
                   const Mask& mask, double tol_eq = 1e-9,
                   const Vector* start = nullptr);

/// x^T = (int D_aW)(int D_aG)^{-1} over the cell; grad W(a) in moment mode.
Vector cell_multiplier(const ProblemSpec& problem, const SamplePool& pool,
                       const Mask& mask, const Vector& action);

/// argmax_k W(a_k, omega) - x_k^T G(a_k, omega); ties go to the lowest index.
Labels assign(const ProblemSpec& problem, const SamplePool& pool,
              const Matrix& actions, const Matrix& multipliers);

/// sum_i w_i W(a_{label_i}, omega_i).
double welfare(const ProblemSpec& problem, const SamplePool& pool,
               const Labels& labels, const Matrix& actions);

PartitionSolution solve(const ProblemSpec& problem, const SamplePool& pool,
                        int K, const SolverConfig& config = {});

/// k-means++ seed indices on the rows of points, weighted by weights.
std::vector<Index> kmeanspp_seeds(const Points& points, const Vector& weights,
                                  int K, std::uint64_t seed);

struct ConvexCellsReport {
  Index pairs_tested = 0;
  Index violations = 0;
  double violation_fraction = 0.0;
  bool passed = true;
};

/// Midpoints of same-cell g-value pairs must be assigned to that cell.
ConvexCellsReport convex_cells_check(const ProblemSpec& problem,
                                     const SamplePool& pool,
                                     const PartitionSolution& solution,
                                     Index pairs_per_cell = 200,
                                     std::uint64_t seed = 0,
                                     double tie_tol = 1e-9);

}  // namespace infotransport
