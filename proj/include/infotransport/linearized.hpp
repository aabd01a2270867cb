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

#include "infotransport/model.hpp"
#include "infotransport/partition_solver.hpp"
#include "infotransport/priors.hpp"
#include "infotransport/types.hpp"

namespace infotransport {

/// Small-uncertainty expansion of a general game around the steady state.
struct LinearizedModel {
  Vector a0;
  Matrix calG;    // (D_aG)^{-1} D_omegaG at (a0, 0), M x L
  Matrix D0;      // information relevance matrix, L x L
  Matrix D0_raw;  // before symmetrization
  Vector eigenvalues;
  bool degenerate = false;  // |D0| < 1e-12

  bool negative_semidefinite(double tol = 1e-10) const {
    return eigenvalues.size() == 0 || eigenvalues.maxCoeff() <= tol;
  }
  /// The quadratic moment problem m -> m^T D0 m / 2 with g = omega.
  ProblemSpec limit_problem(StateSpace space, PriorSpec prior) const;
};

/// Solves G(a0, 0) = 0 from start, then differentiates the composite
/// omega -> W(a*(omega), omega) by central differences with the given step.
LinearizedModel build(const GeneralGameSpec& game, int state_dimension,
                      const Vector& start, double step = 1e-3);

/// Lloyd iteration on the half-space scores
/// s_k(omega) = M_k^T D0 omega - M_k^T D0 M_k / 2. Negative semidefinite D0
/// gives the single-cell solution.
PartitionSolution limit_partition(const LinearizedModel& model,
                                  const SamplePool& pool, int K,
                                  const SolverConfig& config = {});

struct HalfspaceAudit {
  Index tested = 0;
  Index violations = 0;
  double worst = 0.0;  // largest score deficit against another cell
  bool passed = true;
};

/// Every point must satisfy the pairwise half-space inequalities of its cell,
/// up to tol relative to the score magnitude.
HalfspaceAudit halfspace_audit(const LinearizedModel& model,
                               const SamplePool& pool,
                               const PartitionSolution& solution,
                               double tol = 1e-9);

}  // namespace infotransport
