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

#include "infotransport/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "infotransport/error.hpp"

namespace infotransport {

ProblemSpec LinearizedModel::limit_problem(StateSpace space,
                                           PriorSpec prior) const {
  ProblemSpec spec;
  spec.space = std::move(space);
  spec.prior = std::move(prior);
  spec.game = MomentGame{
      Welfare(QuadraticWelfare{0.5 * D0, Vector::Zero(D0.rows())}), IdentityMap{}};
  return spec;
}

LinearizedModel build(const GeneralGameSpec& game, int state_dimension,
                      const Vector& start, double step) {
  if (state_dimension < 1)
    throw Error(ErrorKind::kInvalidSpec, "state dimension must be >= 1");
  const Index L = state_dimension;
  LinearizedModel model;
  const Vector origin = Vector::Zero(L);
  try {
    model.a0 = solve_state_equilibrium(game, origin, start, 1e-12);
  } catch (const Error& e) {
    throw Error(ErrorKind::kBuildFailure,
                std::string("steady state solve failed: ") + e.what());
  }
  if (game.G(model.a0, origin).norm() > 1e-10)
    throw Error(ErrorKind::kBuildFailure, "steady state residual above 1e-10");

  const Matrix Ja = game.jacobian_action(model.a0, origin);
  const Matrix Jw = game.jacobian_state(model.a0, origin);
  Eigen::FullPivLU<Matrix> lu(Ja);
  if (!lu.isInvertible())
    throw Error(ErrorKind::kBuildFailure, "D_aG(a0, 0) is singular");
  model.calG = lu.solve(Jw);

  const Vector a0 = model.a0;
  auto composite = [&](const Vector& omega) {
    const Vector a = solve_state_equilibrium(game, omega, a0, 1e-12);
    return game.W(a, omega);
  };
  auto direct = [&](const Vector& omega) { return game.W(a0, omega); };
  auto hessian = [&](const auto& f) {
    Matrix Hf(L, L);
    const double h = step;
    for (Index i = 0; i < L; ++i) {
      for (Index j = i; j < L; ++j) {
        Vector ei = Vector::Zero(L), ej = Vector::Zero(L);
        ei[i] = h;
        ej[j] = h;
        const double v = (f(ei + ej) - f(ei - ej) - f(ej - ei) + f(-ei - ej)) /
                         (4.0 * h * h);
        Hf(i, j) = Hf(j, i) = v;
      }
    }
    return Hf;
  };
  model.D0_raw = hessian(composite) - hessian(direct);
  model.D0 = 0.5 * (model.D0_raw + model.D0_raw.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(model.D0, Eigen::EigenvaluesOnly);
  model.eigenvalues = eig.eigenvalues();
  model.degenerate = model.D0.norm() < 1e-12;
  return model;
}

namespace {

struct LimitState {
  Labels labels;
  Matrix means;
  double welfare = 0.0;
};

}  // namespace

PartitionSolution limit_partition(const LinearizedModel& model,
                                  const SamplePool& pool, int K,
                                  const SolverConfig& config) {
  config.validate();
  if (K < 1) throw Error(ErrorKind::kInvalidSpec, "K must be >= 1");
  if (pool.dimension() != model.D0.rows())
    throw Error(ErrorKind::kInvalidSpec, "pool dimension must match D0");
  const ProblemSpec problem =
      model.limit_problem(StateSpace::euclidean(static_cast<int>(pool.dimension())),
                          GaussianPrior{});
  const Matrix& D = model.D0;
  const Index n = pool.size();

  auto finish = [&](Labels labels) {
    PartitionSolution sol;
    sol.requested_cells = K;
    std::vector<int> remap;
    int next = 0;
    for (auto& label : labels) {
      const auto k = static_cast<size_t>(label);
      if (k >= remap.size()) remap.resize(k + 1, -1);
      if (remap[k] < 0) remap[k] = next++;
      label = remap[k];
    }
    sol.labels = std::move(labels);
    sol.actions.resize(next, pool.dimension());
    for (int k = 0; k < next; ++k) {
      Mask mask(sol.labels.size());
      for (size_t i = 0; i < mask.size(); ++i) mask[i] = sol.labels[i] == k;
      sol.actions.row(k) = weighted_mean(pool.points, pool.weights, &mask).transpose();
    }
    sol.multipliers = sol.actions * D;
    sol.welfare = welfare(problem, pool, sol.labels, sol.actions);
    return sol;
  };

  if (model.negative_semidefinite()) {
    PartitionSolution sol = finish(Labels(static_cast<size_t>(n), 0));
    sol.converged = true;
    sol.trace.push_back(sol.welfare);
    sol.restart_welfare.push_back(sol.welfare);
    return sol;
  }

  auto scores_of = [&](const Matrix& means) {
    Vector offset(means.rows());
    for (Index k = 0; k < means.rows(); ++k)
      offset[k] = -0.5 * means.row(k).dot(D * means.row(k).transpose());
    return std::pair<Vector, Matrix>(offset, means * D);
  };
  auto relabel = [&](const Matrix& means) {
    const auto [offset, slope] = scores_of(means);
    Labels labels(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      (offset + slope * pool.points.row(i).transpose()).maxCoeff(&best);
      labels[static_cast<size_t>(i)] = static_cast<int>(best);
    }
    return labels;
  };

  PartitionSolution best;
  bool have = false;
  std::vector<double> restart_welfare;
  for (int r = 0; r < config.restarts; ++r) {
    const auto seeds = kmeanspp_seeds(pool.points, pool.weights, K,
                                      config.seed + static_cast<std::uint64_t>(r));
    Labels labels(static_cast<size_t>(n), 0);
    for (Index i = 0; i < n; ++i) {
      double top = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < seeds.size(); ++k) {
        const double d = (pool.points.row(i) - pool.points.row(seeds[k])).squaredNorm();
        if (d < top) {
          top = d;
          labels[static_cast<size_t>(i)] = static_cast<int>(k);
        }
      }
    }
    PartitionSolution current = finish(labels);
    current.trace.push_back(current.welfare);
    int it = 0;
    for (; it < config.max_iterations; ++it) {
      Labels proposal = relabel(current.actions);
      if (proposal == current.labels) break;
      PartitionSolution next = finish(std::move(proposal));
      if (next.welfare < current.welfare - 1e-12 * std::max(1.0, std::abs(current.welfare)))
        break;
      next.trace = std::move(current.trace);
      next.trace.push_back(next.welfare);
      current = std::move(next);
    }
    current.iterations = it;
    const Labels again = relabel(current.actions);
    current.assign_changes = 0;
    for (size_t i = 0; i < again.size(); ++i)
      if (again[i] != current.labels[i]) ++current.assign_changes;
    current.converged = static_cast<double>(current.assign_changes) <=
                        config.tol_assignment * static_cast<double>(n);
    restart_welfare.push_back(current.welfare);
    if (!have || current.welfare > best.welfare) {
      best = std::move(current);
      best.best_restart = r;
      have = true;
    }
  }
  best.requested_cells = K;
  best.restart_welfare = std::move(restart_welfare);
  return best;
}

HalfspaceAudit halfspace_audit(const LinearizedModel& model,
                               const SamplePool& pool,
                               const PartitionSolution& solution, double tol) {
  HalfspaceAudit audit;
  const Matrix& D = model.D0;
  const Matrix& M = solution.actions;
  Vector offset(M.rows());
  for (Index k = 0; k < M.rows(); ++k)
    offset[k] = -0.5 * M.row(k).dot(D * M.row(k).transpose());
  const Matrix slope = M * D;
  for (Index i = 0; i < pool.size(); ++i) {
    const int k = solution.labels[static_cast<size_t>(i)];
    const Vector s = offset + slope * pool.points.row(i).transpose();
    const double deficit = s.maxCoeff() - s[k];
    audit.worst = std::max(audit.worst, deficit);
    if (deficit > tol * (1.0 + s.cwiseAbs().maxCoeff())) ++audit.violations;
    ++audit.tested;
  }
  audit.passed = audit.violations == 0;
  return audit;
}

}  // namespace infotransport
