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

#include "infotransport/oracle_discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "infotransport/error.hpp"
#include "infotransport/partition_solver.hpp"

namespace infotransport {

SamplePool DiscreteInstance::pool() const { return make_pool(points, weights); }

ProblemSpec DiscreteInstance::problem() const {
  ProblemSpec spec;
  spec.space = StateSpace::euclidean(static_cast<int>(points.cols()));
  spec.prior = DiscretePrior{points, weights};
  spec.game = MomentGame{welfare, map};
  return spec;
}

DiscreteInstance make_instance(std::string name, Points points, Vector weights,
                               Welfare welfare, MomentMapSpec map, int K_max) {
  if (points.rows() == 0 || points.rows() != weights.size())
    throw Error(ErrorKind::kInvalidSpec, "points and weights must match");
  if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "weights must be nonnegative");
  DiscreteInstance inst;
  inst.name = std::move(name);
  inst.weights = weights / weights.sum();
  inst.points = std::move(points);
  inst.welfare = std::move(welfare);
  inst.map = std::move(map);
  inst.K_max = K_max;
  inst.g = moment_values(inst.map, inst.pool());
  return inst;
}

double count_partitions(int n, int K) {
  // Stirling numbers of the second kind, summed over block counts <= K.
  std::vector<std::vector<double>> S(static_cast<size_t>(n) + 1,
                                     std::vector<double>(static_cast<size_t>(n) + 1, 0.0));
  S[0][0] = 1.0;
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= i; ++k)
      S[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          k * S[static_cast<size_t>(i) - 1][static_cast<size_t>(k)] +
          S[static_cast<size_t>(i) - 1][static_cast<size_t>(k) - 1];
  double total = 0.0;
  for (int k = 1; k <= std::min(n, K); ++k)
    total += S[static_cast<size_t>(n)][static_cast<size_t>(k)];
  return total;
}

ExhaustiveResult exhaustive_optimum(const DiscreteInstance& instance, int K) {
  const Index n = instance.size();
  if (n > kMaxDiscretePoints) {
    std::ostringstream msg;
    msg << "exhaustive enumeration refused for n = " << n << " (limit "
        << kMaxDiscretePoints << "): about "
        << count_partitions(static_cast<int>(n), K) << " partitions";
    throw Error(ErrorKind::kTooLarge, msg.str());
  }
  if (K < 1 || K > n)
    throw Error(ErrorKind::kInvalidSpec, "K must lie in [1, n]");
  const Index m = instance.g.cols();
  ExhaustiveResult best;
  best.welfare = -std::numeric_limits<double>::infinity();

  // Restricted growth strings: rgs[0] = 0, rgs[i] <= max(rgs[0..i-1]) + 1.
  std::vector<int> rgs(static_cast<size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<size_t>(n), 0);
  std::vector<double> P(static_cast<size_t>(K));
  Matrix S(K, m);
  for (;;) {
    std::fill(P.begin(), P.end(), 0.0);
    S.setZero();
    for (Index i = 0; i < n; ++i) {
      const int k = rgs[static_cast<size_t>(i)];
      P[static_cast<size_t>(k)] += instance.weights[i];
      S.row(k) += instance.weights[i] * instance.g.row(i);
    }
    double value = 0.0;
    for (int k = 0; k < K; ++k)
      if (P[static_cast<size_t>(k)] > 0.0)
        value += P[static_cast<size_t>(k)] *
                 instance.welfare.value(S.row(k).transpose() / P[static_cast<size_t>(k)]);
    ++best.partitions;
    if (value > best.welfare) {
      best.welfare = value;
      best.labels.assign(rgs.begin(), rgs.end());
    }
    // Next string.
    Index i = n - 1;
    while (i > 0) {
      const auto is = static_cast<size_t>(i);
      if (rgs[is] < K - 1 && rgs[is] <= prefix_max[is - 1]) {
        ++rgs[is];
        prefix_max[is] = std::max(prefix_max[is - 1], rgs[is]);
        for (Index j = i + 1; j < n; ++j) {
          rgs[static_cast<size_t>(j)] = 0;
          prefix_max[static_cast<size_t>(j)] = prefix_max[is];
        }
        break;
      }
      --i;
    }
    if (i == 0) break;
  }

  const int cells = *std::max_element(best.labels.begin(), best.labels.end()) + 1;
  best.actions.resize(cells, m);
  for (int k = 0; k < cells; ++k) {
    Mask mask(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i)
      mask[static_cast<size_t>(i)] = best.labels[static_cast<size_t>(i)] == k;
    best.actions.row(k) = weighted_mean(instance.g, instance.weights, &mask).transpose();
  }
  best.welfare = welfare(instance.problem(), instance.pool(), best.labels, best.actions);
  return best;
}

std::string to_string(LpResult::Status status) {
  switch (status) {
    case LpResult::Status::kOptimal:
      return "optimal";
    case LpResult::Status::kInfeasible:
      return "infeasible";
    case LpResult::Status::kUnbounded:
      return "unbounded";
    case LpResult::Status::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

// Tableau with the objective in the last row: T(m, j) is the reduced cost of
// column j and T(m, last) is minus the objective value.
class Tableau {
 public:
  Tableau(Matrix T, std::vector<Index> basis, double tol)
      : T_(std::move(T)), basis_(std::move(basis)), tol_(tol) {}

  // Minimizes over columns [0, active); returns false when unbounded.
  LpResult::Status optimize(Index active, int* iterations) {
    const Index m = T_.rows() - 1;
    const Index rhs = T_.cols() - 1;
    for (int it = 0; it < 10000; ++it) {
      Index enter = -1;
      for (Index j = 0; j < active; ++j) {
        if (T_(m, j) < -tol_) {
          enter = j;  // Bland: lowest index
          break;
        }
      }
      if (enter < 0) return LpResult::Status::kOptimal;
      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        if (T_(i, enter) > tol_) {
          const double r = T_(i, rhs) / T_(i, enter);
          if (r < ratio - tol_ ||
              (std::abs(r - ratio) <= tol_ && basis_[static_cast<size_t>(i)] <
                                                  basis_[static_cast<size_t>(leave)])) {
            ratio = r;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpResult::Status::kUnbounded;
      pivot(leave, enter);
      ++*iterations;
    }
    return LpResult::Status::kIterationLimit;
  }

  void pivot(Index row, Index col) {
    T_.row(row) /= T_(row, col);
    for (Index i = 0; i < T_.rows(); ++i) {
      if (i == row) continue;
      const double f = T_(i, col);
      if (f != 0.0) T_.row(i) -= f * T_.row(row);
    }
    basis_[static_cast<size_t>(row)] = col;
  }

  void remove_row(Index row) {
    const Index last = T_.rows() - 1;
    Matrix next(T_.rows() - 1, T_.cols());
    next.topRows(row) = T_.topRows(row);
    next.bottomRows(last - row) = T_.bottomRows(last - row);
    T_ = std::move(next);
    basis_.erase(basis_.begin() + row);
  }

  Matrix& table() { return T_; }
  std::vector<Index>& basis() { return basis_; }

 private:
  Matrix T_;
  std::vector<Index> basis_;
  double tol_;
};

}  // namespace

LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, double tol) {
  const Index m = A.rows(), N = A.cols();
  if (b.size() != m || c.size() != N)
    throw Error(ErrorKind::kInvalidSpec, "LP dimensions do not match");
  LpResult result;
  // Phase 1: columns [x | artificials | rhs], objective sum of artificials.
  Matrix T = Matrix::Zero(m + 1, N + m + 1);
  std::vector<Index> basis(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const double s = b[i] < 0.0 ? -1.0 : 1.0;
    T.row(i).head(N) = s * A.row(i);
    T(i, N + i) = 1.0;
    T(i, N + m) = s * b[i];
    basis[static_cast<size_t>(i)] = N + i;
  }
  for (Index i = 0; i < m; ++i) T.row(m) -= T.row(i);
  for (Index i = 0; i < m; ++i) T(m, N + i) = 0.0;
  Tableau tab(std::move(T), std::move(basis), tol);
  LpResult::Status st = tab.optimize(N + m, &result.iterations);
  if (st != LpResult::Status::kOptimal) {
    result.status = st;
    return result;
  }
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  if (-tab.table()(tab.table().rows() - 1, N + m) > 1e-9 * scale) {
    result.status = LpResult::Status::kInfeasible;
    return result;
  }
  // Drive artificials out of the basis; rows with no pivot are redundant.
  for (Index i = 0; i < static_cast<Index>(tab.basis().size());) {
    if (tab.basis()[static_cast<size_t>(i)] < N) {
      ++i;
      continue;
    }
    Index col = -1;
    for (Index j = 0; j < N; ++j) {
      if (std::abs(tab.table()(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
      ++i;
    } else {
      tab.remove_row(i);
    }
  }
  // Phase 2 on the original costs; artificial columns are never re-entered.
  Matrix& P = tab.table();
  const Index rows = P.rows() - 1;
  P.row(rows).setZero();
  P.row(rows).head(N) = c.transpose();
  for (Index i = 0; i < rows; ++i) {
    const Index j = tab.basis()[static_cast<size_t>(i)];
    const double f = P(rows, j);
    if (f != 0.0) P.row(rows) -= f * P.row(i);
  }
  st = tab.optimize(N, &result.iterations);
  result.status = st;
  if (st != LpResult::Status::kOptimal) return result;
  result.x = Vector::Zero(N);
  for (Index i = 0; i < rows; ++i) {
    const Index j = tab.basis()[static_cast<size_t>(i)];
    if (j < N) result.x[j] = P(i, P.cols() - 1);
  }
  result.objective = c.dot(result.x);
  return result;
}

KantorovichReport kantorovich_compare(const DiscreteInstance& instance,
                                      const Labels& labels) {
  const Index n = instance.size();
  if (labels.size() != static_cast<size_t>(n))
    throw Error(ErrorKind::kInvalidSpec, "labels must match the instance");
  const int cells = *std::max_element(labels.begin(), labels.end()) + 1;
  const Index m = instance.g.cols();
  Matrix actions(cells, m);
  Vector nu = Vector::Zero(cells);
  for (int k = 0; k < cells; ++k) {
    Mask mask(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) {
      mask[static_cast<size_t>(i)] = labels[static_cast<size_t>(i)] == k;
      if (mask[static_cast<size_t>(i)]) nu[k] += instance.weights[i];
    }
    if (!(nu[k] > 0.0))
      throw Error(ErrorKind::kInvalidSpec, "labels must be compact");
    actions.row(k) = weighted_mean(instance.g, instance.weights, &mask).transpose();
  }
  auto var = [n](int k, Index i) { return static_cast<Index>(k) * n + i; };
  const Index N = cells * n;
  const Index rows = n + cells + cells * m;
  Matrix A = Matrix::Zero(rows, N);
  Vector b = Vector::Zero(rows);
  Vector cost(N);
  for (int k = 0; k < cells; ++k) {
    for (Index i = 0; i < n; ++i) {
      const Index v = var(k, i);
      cost[v] = bregman_cost(instance.welfare, actions.row(k).transpose(),
                             instance.g.row(i).transpose());
      A(i, v) = 1.0;
      A(n + k, v) = 1.0;
      for (Index j = 0; j < m; ++j)
        A(n + cells + k * m + j, v) = instance.g(i, j) - actions(k, j);
    }
  }
  b.head(n) = instance.weights;
  b.segment(n, cells) = nu;

  KantorovichReport rep;
  Vector monge(n);
  for (Index i = 0; i < n; ++i)
    monge[i] = instance.weights[i] * cost[var(labels[static_cast<size_t>(i)], i)];
  rep.monge_cost = pairwise_sum(monge);
  const LpResult lp = solve_lp(A, b, cost);
  rep.status = to_string(lp.status);
  rep.iterations = lp.iterations;
  if (lp.status != LpResult::Status::kOptimal) {
    rep.feasible = lp.status != LpResult::Status::kInfeasible;
    return rep;
  }
  rep.lp_cost = lp.objective;
  rep.gap = rep.monge_cost - rep.lp_cost;
  rep.coupling.resize(cells, n);
  for (int k = 0; k < cells; ++k)
    for (Index i = 0; i < n; ++i) rep.coupling(k, i) = lp.x[var(k, i)];
  return rep;
}

namespace {

DiscreteInstance random_instance(const std::string& name, Index n, int dim,
                                 Welfare welfare, int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  Points points(n, dim);
  Vector weights(n);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) points(i, j) = normal(rng);
    weights[i] = unit(rng);
  }
  return make_instance(name, std::move(points), std::move(weights),
                       std::move(welfare), IdentityMap{}, K);
}

Welfare quadratic(Matrix H, Vector b) {
  return Welfare(QuadraticWelfare{std::move(H), std::move(b)});
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

}  // namespace

std::vector<DiscreteInstance> discrete_suite() {
  const Matrix one = Matrix::Identity(1, 1);
  std::vector<DiscreteInstance> suite;
  suite.push_back(random_instance("convex_1d_square", 4, 1,
                                  quadratic(one, Vector::Zero(1)), 2, 101));
  suite.push_back(random_instance("convex_1d_shifted", 6, 1,
                                  quadratic(one, Vector::Constant(1, 0.3)), 3, 102));
  suite.push_back(random_instance("concave_1d", 5, 1,
                                  quadratic(-one, Vector::Zero(1)), 2, 103));
  suite.push_back(random_instance("concave_2d", 7, 2,
                                  quadratic(-Matrix::Identity(2, 2), Vector::Zero(2)),
                                  3, 104));
  suite.push_back(random_instance("saddle_2d_diagonal", 8, 2,
                                  quadratic(mat2(1, 0, 0, -1), Vector::Zero(2)), 2, 105));
  suite.push_back(random_instance("saddle_2d_coupled", 10, 2,
                                  quadratic(mat2(1, 0.4, 0.4, -0.6), Vector::Zero(2)),
                                  3, 106));
  suite.push_back(random_instance("norm_2d", 9, 2,
                                  Welfare(RadialWelfare{Curve::power(1.0, 0.5)}), 3, 107));
  suite.push_back(random_instance("convex_2d_coupled", 10, 2,
                                  quadratic(mat2(2, 0.5, 0.5, 1), Vector::Zero(2)), 2, 108));
  suite.push_back(random_instance("double_well_1d", 8, 1,
                                  Welfare(RadialWelfare{Curve::polynomial({0, -1, 1})}),
                                  3, 109));
  suite.push_back(random_instance("concave_quartic_1d", 6, 1,
                                  Welfare(RadialWelfare{Curve::polynomial({0, -1, 0.2})}),
                                  2, 110));
  suite.push_back(random_instance("gaussian_bump_2d", 9, 2,
                                  Welfare(RadialWelfare{Curve::exponential(1.0, -1.0)}),
                                  3, 111));
  Vector tilt(2);
  tilt << 0.3, -0.2;
  suite.push_back(random_instance("saddle_2d_tilted", 10, 2,
                                  quadratic(mat2(-1, 0, 0, 0.5), tilt), 3, 112));
  return suite;
}

}  // namespace infotransport
