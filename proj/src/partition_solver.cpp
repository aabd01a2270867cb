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

#include "infotransport/partition_solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "infotransport/error.hpp"

namespace infotransport {

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::kInvalidSpec, what);
  };
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(tol_assignment >= 0.0 && tol_assignment < 1.0,
          "tol_assignment must lie in [0, 1)");
  require(tol_eq > 0.0, "tol_eq must be positive");
  require(restarts >= 1, "restarts must be >= 1");
  require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
  require(threads >= 1, "threads must be >= 1");
}

// -------------------------------------------------------------- primitives

namespace {

Mask label_mask(const Labels& labels, int cell) {
  Mask mask(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) mask[i] = labels[i] == cell;
  return mask;
}

double masked_weight(const SamplePool& pool, const Mask& mask) {
  double total = 0.0;
  for (Index i = 0; i < pool.size(); ++i)
    if (mask[static_cast<size_t>(i)]) total += pool.weights[i];
  return total;
}

// Average of G and D_aG over the mask, weights renormalized.
void cell_residual(const GeneralGameSpec& game, const SamplePool& pool,
                   const Mask& mask, double total, const Vector& a,
                   Vector* residual, Matrix* jacobian) {
  const Index m = a.size();
  residual->setZero(m);
  if (jacobian) jacobian->setZero(m, m);
  for (Index i = 0; i < pool.size(); ++i) {
    if (!mask[static_cast<size_t>(i)] || pool.weights[i] == 0.0) continue;
    const Vector omega = pool.points.row(i).transpose();
    const double w = pool.weights[i] / total;
    *residual += w * game.G(a, omega);
    if (jacobian) *jacobian += w * game.jacobian_action(a, omega);
  }
}

}  // namespace

Vector cell_action(const ProblemSpec& problem, const SamplePool& pool,
                   const Mask& mask, double tol_eq, const Vector* start) {
  if (problem.is_moment()) {
    const MomentMapSpec& map = problem.moment().map;
    return conditional_expect(pool, mask, [&](const Vector& omega) {
      return apply_moment_map(map, omega);
    });
  }
  const GeneralGameSpec& game = problem.general();
  const double total = masked_weight(pool, mask);
  if (!(total > 0.0))
    throw Error(ErrorKind::kEmptyCell, "mask selects no positive weight");
  const Index m = game.action_dimension;

  Vector a;
  if (start) {
    a = *start;
  } else {
    // Surrogate start: mean pointwise equilibrium over a few cell members.
    a = Vector::Zero(m);
    int used = 0;
    for (Index i = 0; i < pool.size() && used < 64; ++i) {
      if (!mask[static_cast<size_t>(i)]) continue;
      a += solve_state_equilibrium(game, pool.points.row(i).transpose(),
                                   Vector::Zero(m), 1e-10);
      ++used;
    }
    a /= std::max(used, 1);
  }

  Vector r;
  Matrix J;
  cell_residual(game, pool, mask, total, a, &r, &J);
  auto done = [&](const Vector& res, const Vector& at) {
    return res.norm() <= tol_eq * (1.0 + at.norm());
  };
  for (int it = 0; it < 200 && !done(r, a); ++it) {
    const Vector step = J.fullPivLu().solve(-r);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      const Vector trial = a + t * step;
      Vector tr;
      Matrix tj;
      cell_residual(game, pool, mask, total, trial, &tr, &tj);
      if (tr.allFinite() && tr.norm() < r.norm()) {
        a = trial;
        r = tr;
        J = tj;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  // Contraction a <- a + delta E[G | cell] with delta below the monotonicity
  // constant.
  for (int it = 0; it < 200 && !done(r, a); ++it) {
    a = a + game.epsilon * r;
    cell_residual(game, pool, mask, total, a, &r, nullptr);
  }
  if (!done(r, a) || !a.allFinite()) {
    std::ostringstream msg;
    msg << "cell equilibrium residual " << r.norm() << " after Newton and "
        << "contraction steps";
    throw EquilibriumError(msg.str(), r.norm());
  }
  return a;
}

Vector cell_multiplier(const ProblemSpec& problem, const SamplePool& pool,
                       const Mask& mask, const Vector& action) {
  if (problem.is_moment()) return problem.moment().welfare.gradient(action);
  const GeneralGameSpec& game = problem.general();
  const Index m = action.size();
  Vector mean_dw = Vector::Zero(m);
  Matrix mean_dg = Matrix::Zero(m, m);
  const double total = masked_weight(pool, mask);
  if (!(total > 0.0))
    throw Error(ErrorKind::kEmptyCell, "mask selects no positive weight");
  for (Index i = 0; i < pool.size(); ++i) {
    if (!mask[static_cast<size_t>(i)] || pool.weights[i] == 0.0) continue;
    const Vector omega = pool.points.row(i).transpose();
    const double w = pool.weights[i] / total;
    mean_dw += w * game.gradient_W(action, omega);
    mean_dg += w * game.jacobian_action(action, omega);
  }
  Eigen::JacobiSVD<Matrix> svd(mean_dg);
  const auto& s = svd.singularValues();
  const double cond = s[0] / s[s.size() - 1];
  if (!(cond < 1e12))
    throw Error(ErrorKind::kMultiplierFailure,
                "averaged action Jacobian is singular (condition number " +
                    std::to_string(cond) + ")");
  // x^T = Dw^T Dg^{-1}  <=>  Dg^T x = Dw.
  return mean_dg.transpose().fullPivLu().solve(mean_dw);
}

namespace {

// Linear score table for moment mode: score_k(b) = offset_k + slope_k . b.
struct LinearScores {
  Vector offset;
  Matrix slope;  // K x M

  double score(int k, const Eigen::Ref<const Vector>& b) const {
    return offset[k] + slope.row(k).dot(b);
  }
};

LinearScores moment_scores(const Welfare& welfare, const Matrix& actions,
                           const Matrix& multipliers) {
  const Index K = actions.rows();
  LinearScores s;
  s.offset.resize(K);
  s.slope = multipliers;
  for (Index k = 0; k < K; ++k) {
    const Vector a = actions.row(k).transpose();
    s.offset[k] = welfare.value(a) - multipliers.row(k).dot(a);
  }
  return s;
}

int best_linear(const LinearScores& s, const Eigen::Ref<const Vector>& b,
                double* best_score = nullptr) {
  int best = 0;
  double top = s.score(0, b);
  for (int k = 1; k < s.offset.size(); ++k) {
    const double v = s.score(k, b);
    if (v > top) {
      top = v;
      best = k;
    }
  }
  if (best_score) *best_score = top;
  return best;
}

double general_score(const GeneralGameSpec& game, const Vector& a,
                     const Vector& x, const Vector& omega) {
  return game.W(a, omega) - x.dot(game.G(a, omega));
}

}  // namespace

Labels assign(const ProblemSpec& problem, const SamplePool& pool,
              const Matrix& actions, const Matrix& multipliers) {
  const Index K = actions.rows();
  if (K < 1) throw Error(ErrorKind::kInvalidSpec, "assign needs K >= 1");
  Labels labels(static_cast<size_t>(pool.size()), 0);
  if (K == 1) return labels;
  if (problem.is_moment()) {
    const MomentGame& game = problem.moment();
    const Points g = moment_values(game.map, pool);
    const LinearScores scores =
        moment_scores(game.welfare, actions, multipliers);
    for (Index i = 0; i < pool.size(); ++i)
      labels[static_cast<size_t>(i)] =
          best_linear(scores, g.row(i).transpose());
    return labels;
  }
  const GeneralGameSpec& game = problem.general();
  for (Index i = 0; i < pool.size(); ++i) {
    const Vector omega = pool.points.row(i).transpose();
    int best = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < K; ++k) {
      const double v = general_score(game, actions.row(k).transpose(),
                                     multipliers.row(k).transpose(), omega);
      if (v > top) {
        top = v;
        best = static_cast<int>(k);
      }
    }
    labels[static_cast<size_t>(i)] = best;
  }
  return labels;
}

double welfare(const ProblemSpec& problem, const SamplePool& pool,
               const Labels& labels, const Matrix& actions) {
  if (labels.size() != static_cast<size_t>(pool.size()))
    throw Error(ErrorKind::kInvalidSpec, "labels must match the pool");
  Vector terms(pool.size());
  std::vector<double> cached;
  if (problem.is_moment()) {
    const Welfare& W = problem.moment().welfare;
    cached.resize(static_cast<size_t>(actions.rows()));
    for (Index k = 0; k < actions.rows(); ++k)
      cached[static_cast<size_t>(k)] = W.value(actions.row(k).transpose());
  }
  for (Index i = 0; i < pool.size(); ++i) {
    const int k = labels[static_cast<size_t>(i)];
    if (k < 0 || k >= actions.rows())
      throw Error(ErrorKind::kInvalidSpec, "label out of range at point " +
                                               std::to_string(i));
    const double w = pool.weights[i];
    if (w == 0.0) {
      terms[i] = 0.0;
      continue;
    }
    const double value =
        problem.is_moment()
            ? cached[static_cast<size_t>(k)]
            : problem.general().W(actions.row(k).transpose(),
                                  pool.points.row(i).transpose());
    terms[i] = w * value;
  }
  return pairwise_sum(terms);
}

std::vector<Index> kmeanspp_seeds(const Points& points, const Vector& weights,
                                  int K, std::uint64_t seed) {
  const Index n = points.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const Vector& mass) -> Index {
    const double total = mass.sum();
    double u = unit(rng) * total;
    for (Index i = 0; i < n; ++i) {
      u -= mass[i];
      if (u < 0.0 && mass[i] > 0.0) return i;
    }
    for (Index i = n - 1; i >= 0; --i)
      if (mass[i] > 0.0) return i;
    return 0;
  };
  std::vector<Index> seeds;
  seeds.push_back(draw(weights));
  Vector dist2(n);
  for (Index i = 0; i < n; ++i)
    dist2[i] = (points.row(i) - points.row(seeds[0])).squaredNorm();
  while (static_cast<int>(seeds.size()) < K) {
    const Vector mass = weights.cwiseProduct(dist2);
    if (!(mass.sum() > 0.0)) break;  // fewer distinct points than K
    const Index next = draw(mass);
    seeds.push_back(next);
    for (Index i = 0; i < n; ++i)
      dist2[i] = std::min(dist2[i],
                          (points.row(i) - points.row(next)).squaredNorm());
  }
  return seeds;
}

// ------------------------------------------------------------------- solver

namespace {

constexpr double kMinDamping = 1.0 / 64.0;

// Sufficient statistics of a moment-mode partition: per-cell weight and
// weighted g-sum. Empty cells keep weight 0.
struct MomentCells {
  std::vector<double> weight;
  Matrix sum;  // K x M
};

class MomentSolver {
 public:
  MomentSolver(const ProblemSpec& problem, const SamplePool& pool,
               const Points& g, const SolverConfig& config)
      : welfare_(problem.moment().welfare),
        pool_(pool),
        g_(g),
        config_(config),
        n_(pool.size()),
        m_(g.cols()) {}

  PartitionSolution run(int K, std::uint64_t seed) {
    PartitionSolution sol;
    sol.requested_cells = K;
    const std::vector<Index> seeds =
        kmeanspp_seeds(g_, pool_.weights, K, seed);
    labels_.assign(static_cast<size_t>(n_), 0);
    K_ = static_cast<int>(seeds.size());
    for (Index i = 0; i < n_; ++i) {
      int best = 0;
      double top = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K_; ++k) {
        const double d = (g_.row(i) - g_.row(seeds[static_cast<size_t>(k)]))
                             .squaredNorm();
        if (d < top) {
          top = d;
          best = k;
        }
      }
      labels_[static_cast<size_t>(i)] = best;
    }
    cells_ = stats(labels_);
    double current = total_welfare(cells_);
    sol.trace.push_back(current);
    sol.iterations = descend(&current, &sol.trace);
    if (config_.local_moves && n_ <= kKickMaxPoints) kick(seed, &current, &sol);
    finish(&sol);
    return sol;
  }

 private:
  static constexpr Index kKickMaxPoints = 128;
  static constexpr int kKicks = 200;

  // Random relabelings of a few points followed by a fresh descent; kept
  // only when the result beats the incumbent.
  void kick(std::uint64_t seed, double* current, PartitionSolution* sol) {
    std::mt19937_64 rng(seed ^ 0x6b1c6b1c6b1cULL);
    std::uniform_int_distribution<Index> point(0, n_ - 1);
    std::uniform_int_distribution<int> cell(0, K_ - 1);
    std::uniform_int_distribution<Index> size(1, n_);
    for (int t = 0; t < kKicks; ++t) {
      const Index moves = size(rng);
      const Labels saved_labels = labels_;
      const MomentCells saved_cells = cells_;
      const double saved = *current;
      for (Index j = 0; j < moves; ++j)
        labels_[static_cast<size_t>(point(rng))] = cell(rng);
      cells_ = stats(labels_);
      double value = total_welfare(cells_);
      std::vector<double> trace;
      const int its = descend(&value, &trace);
      if (value > saved + tolerance(saved)) {
        *current = value;
        sol->iterations += its;
        sol->trace.push_back(value);
      } else {
        labels_ = saved_labels;
        cells_ = saved_cells;
        *current = saved;
      }
    }
  }

  // Lloyd proposals with damped fallbacks and local moves until nothing
  // improves. Returns the iteration count.
  int descend(double* value, std::vector<double>* trace) {
    double& current = *value;
    int it = 0;
    for (; it < config_.max_iterations; ++it) {
      merge_duplicates();
      const Matrix actions = means(cells_);
      const LinearScores scores = active_scores(actions);
      Labels proposal(labels_.size());
      std::vector<std::pair<double, Index>> changed;
      for (Index i = 0; i < n_; ++i) {
        double top = 0.0;
        const int best = active_[static_cast<size_t>(
            best_linear(scores, g_.row(i).transpose(), &top))];
        proposal[static_cast<size_t>(i)] = best;
        if (best != labels_[static_cast<size_t>(i)]) {
          const int pos = position(labels_[static_cast<size_t>(i)]);
          const double gain = top - scores.score(pos, g_.row(i).transpose());
          changed.emplace_back(gain * pool_.weights[i], i);
        }
      }
      if (static_cast<double>(changed.size()) <=
          config_.tol_assignment * static_cast<double>(n_)) {
        if (config_.local_moves && local_moves(&current)) {
          trace->push_back(current);
          continue;
        }
        break;
      }
      bool accepted = try_labels(proposal, &current);
      if (!accepted) {
        // Partial update: move only the points with the largest score gain.
        std::sort(changed.begin(), changed.end(),
                  [](const auto& a, const auto& b) {
                    return a.first > b.first ||
                           (a.first == b.first && a.second < b.second);
                  });
        for (double d = 0.5 * config_.damping;
             !accepted && d * static_cast<double>(changed.size()) >= 1.0;
             d *= 0.5) {
          Labels partial = labels_;
          const auto count =
              static_cast<size_t>(std::ceil(d * static_cast<double>(changed.size())));
          for (size_t j = 0; j < count; ++j) {
            const auto i = static_cast<size_t>(changed[j].second);
            partial[i] = proposal[i];
          }
          accepted = try_labels(partial, &current);
        }
      }
      if (!accepted && config_.local_moves) accepted = local_moves(&current);
      if (!accepted) break;
      trace->push_back(current);
    }
    return it;
  }

  double cell_value(double weight, const Eigen::Ref<const Vector>& sum) const {
    if (weight <= 0.0) return 0.0;
    return weight * welfare_.value(sum / weight);
  }

  MomentCells stats(const Labels& labels) const {
    MomentCells c;
    c.weight.assign(static_cast<size_t>(K_), 0.0);
    c.sum = Matrix::Zero(K_, m_);
    for (Index i = 0; i < n_; ++i) {
      const int k = labels[static_cast<size_t>(i)];
      c.weight[static_cast<size_t>(k)] += pool_.weights[i];
      c.sum.row(k) += pool_.weights[i] * g_.row(i);
    }
    return c;
  }

  double total_welfare(const MomentCells& c) const {
    double total = 0.0;
    for (int k = 0; k < K_; ++k)
      total += cell_value(c.weight[static_cast<size_t>(k)],
                          c.sum.row(k).transpose());
    return total;
  }

  Matrix means(const MomentCells& c) {
    active_.clear();
    for (int k = 0; k < K_; ++k)
      if (c.weight[static_cast<size_t>(k)] > 0.0) active_.push_back(k);
    Matrix out(static_cast<Index>(active_.size()), m_);
    for (size_t j = 0; j < active_.size(); ++j) {
      const int k = active_[j];
      out.row(static_cast<Index>(j)) =
          c.sum.row(k) / c.weight[static_cast<size_t>(k)];
    }
    return out;
  }

  int position(int cell) const {
    const auto it = std::find(active_.begin(), active_.end(), cell);
    return static_cast<int>(it - active_.begin());
  }

  LinearScores active_scores(const Matrix& actions) const {
    Matrix mult(actions.rows(), m_);
    for (Index k = 0; k < actions.rows(); ++k)
      mult.row(k) = welfare_.gradient(actions.row(k).transpose()).transpose();
    return moment_scores(welfare_, actions, mult);
  }

  double tolerance(double value) const {
    return 1e-12 * std::max(1.0, std::abs(value));
  }

  bool try_labels(const Labels& proposal, double* current) {
    MomentCells c = stats(proposal);
    const double value = total_welfare(c);
    if (!(value > *current + tolerance(*current))) return false;
    labels_ = proposal;
    cells_ = std::move(c);
    *current = value;
    if (config_.empty_cell_policy ==
        SolverConfig::EmptyCellPolicy::kReseedFarthest)
      reseed(current);
    return true;
  }

  void merge_duplicates() {
    for (int k = 0; k < K_; ++k) {
      const double wk = cells_.weight[static_cast<size_t>(k)];
      if (wk <= 0.0) continue;
      const Vector mk = cells_.sum.row(k) / wk;
      for (int l = k + 1; l < K_; ++l) {
        const double wl = cells_.weight[static_cast<size_t>(l)];
        if (wl <= 0.0) continue;
        const Vector ml = cells_.sum.row(l) / wl;
        if ((mk - ml).norm() <= 1e-12 * (1.0 + mk.norm())) {
          for (auto& label : labels_)
            if (label == l) label = k;
          cells_ = stats(labels_);
        }
      }
    }
  }

  // Fills empty cells with the point of largest transport cost when that
  // raises welfare.
  void reseed(double* current) {
    for (int k = 0; k < K_; ++k) {
      if (cells_.weight[static_cast<size_t>(k)] > 0.0) continue;
      Index worst = -1;
      double top = -std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n_; ++i) {
        const int l = labels_[static_cast<size_t>(i)];
        const double wl = cells_.weight[static_cast<size_t>(l)];
        if (wl <= pool_.weights[i]) continue;
        const Vector a = cells_.sum.row(l).transpose() / wl;
        const double c = bregman_cost(welfare_, a, g_.row(i).transpose());
        if (c > top) {
          top = c;
          worst = i;
        }
      }
      if (worst < 0) return;
      Labels trial = labels_;
      trial[static_cast<size_t>(worst)] = k;
      MomentCells c = stats(trial);
      const double value = total_welfare(c);
      if (value > *current + tolerance(*current)) {
        labels_ = std::move(trial);
        cells_ = std::move(c);
        *current = value;
      }
    }
  }

  // Exact-gain moves: best pairwise merge, then single-point transfers.
  bool local_moves(double* current) {
    bool improved = false;
    for (;;) {
      int bk = -1, bl = -1;
      double best = tolerance(*current);
      for (int k = 0; k < K_; ++k) {
        const double wk = cells_.weight[static_cast<size_t>(k)];
        if (wk <= 0.0) continue;
        const double fk = cell_value(wk, cells_.sum.row(k).transpose());
        for (int l = k + 1; l < K_; ++l) {
          const double wl = cells_.weight[static_cast<size_t>(l)];
          if (wl <= 0.0) continue;
          const double fl = cell_value(wl, cells_.sum.row(l).transpose());
          const double gain =
              cell_value(wk + wl, (cells_.sum.row(k) + cells_.sum.row(l))
                                      .transpose()) -
              fk - fl;
          if (gain > best) {
            best = gain;
            bk = k;
            bl = l;
          }
        }
      }
      if (bk < 0) break;
      for (auto& label : labels_)
        if (label == bl) label = bk;
      cells_ = stats(labels_);
      *current = total_welfare(cells_);
      improved = true;
    }

    for (int pass = 0; pass < 50; ++pass) {
      bool moved = false;
      std::vector<double> value(static_cast<size_t>(K_));
      for (int k = 0; k < K_; ++k)
        value[static_cast<size_t>(k)] = cell_value(
            cells_.weight[static_cast<size_t>(k)], cells_.sum.row(k).transpose());
      for (Index i = 0; i < n_; ++i) {
        const double w = pool_.weights[i];
        if (w == 0.0) continue;
        const int k = labels_[static_cast<size_t>(i)];
        const auto ks = static_cast<size_t>(k);
        const Vector gi = g_.row(i).transpose();
        const double rest_weight = cells_.weight[ks] - w;
        const Vector rest_sum = cells_.sum.row(k).transpose() - w * gi;
        const double rest =
            rest_weight <= 1e-15 ? 0.0 : cell_value(rest_weight, rest_sum);
        int target = -1;
        double best = tolerance(*current);
        for (int l = 0; l < K_; ++l) {
          const auto ls = static_cast<size_t>(l);
          if (l == k) continue;
          // An empty target opens a singleton cell.
          const double gain =
              rest +
              cell_value(cells_.weight[ls] + w,
                         cells_.sum.row(l).transpose() + w * gi) -
              value[ks] - value[ls];
          if (gain > best) {
            best = gain;
            target = l;
          }
        }
        if (target < 0) continue;
        const auto ts = static_cast<size_t>(target);
        cells_.weight[ks] = rest_weight <= 1e-15 ? 0.0 : rest_weight;
        if (rest_weight <= 1e-15) {
          cells_.sum.row(k).setZero();
        } else {
          cells_.sum.row(k) = rest_sum.transpose();
        }
        cells_.weight[ts] += w;
        cells_.sum.row(target) += w * gi.transpose();
        value[ks] = rest;
        value[ts] = cell_value(cells_.weight[ts], cells_.sum.row(target).transpose());
        labels_[static_cast<size_t>(i)] = target;
        moved = true;
      }
      if (!moved) break;
      cells_ = stats(labels_);
      const double value_now = total_welfare(cells_);
      if (value_now > *current) improved = true;
      *current = value_now;
    }
    if (split_move(current)) improved = true;
    return improved;
  }

  // Splits one cell by the best threshold along a set of directions when a
  // cell slot is free.
  bool split_move(double* current) {
    int empty = -1;
    for (int k = 0; k < K_ && empty < 0; ++k)
      if (cells_.weight[static_cast<size_t>(k)] <= 0.0) empty = k;
    if (empty < 0) return false;

    std::vector<std::vector<Index>> members(static_cast<size_t>(K_));
    for (Index i = 0; i < n_; ++i)
      if (pool_.weights[i] > 0.0)
        members[static_cast<size_t>(labels_[static_cast<size_t>(i)])].push_back(i);

    std::vector<Vector> directions;
    for (Index j = 0; j < m_; ++j) directions.push_back(Vector::Unit(m_, j));
    std::mt19937_64 rng(0x5eedULL + static_cast<std::uint64_t>(n_));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int d = 0; d < 64 && m_ > 1; ++d) {
      Vector v(m_);
      for (Index j = 0; j < m_; ++j) v[j] = normal(rng);
      directions.push_back(v.normalized());
    }

    double best_gain = tolerance(*current);
    int best_cell = -1;
    std::vector<Index> best_side;
    for (int k = 0; k < K_; ++k) {
      const auto& cell = members[static_cast<size_t>(k)];
      if (cell.size() < 2) continue;
      const double wk = cells_.weight[static_cast<size_t>(k)];
      const Vector sk = cells_.sum.row(k).transpose();
      const double base = cell_value(wk, sk);
      std::vector<Vector> local = directions;
      const Matrix H = hessian_W(welfare_, sk / wk);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (H + H.transpose()));
      for (Index j = 0; j < m_; ++j) local.push_back(eig.eigenvectors().col(j));
      if (m_ == 2 && cell.size() <= 64) {
        // Lines through pairs of members, tilted slightly either way.
        for (size_t a = 0; a < cell.size(); ++a) {
          for (size_t b = a + 1; b < cell.size(); ++b) {
            const Vector d = (g_.row(cell[b]) - g_.row(cell[a])).transpose();
            if (!(d.norm() > 0.0)) continue;
            for (double tilt : {-1e-7, 1e-7}) {
              Vector normal(2);
              normal << -d[1] + tilt * d[0], d[0] + tilt * d[1];
              local.push_back(normal.normalized());
            }
          }
        }
      }
      std::vector<std::pair<double, Index>> order(cell.size());
      for (const Vector& dir : local) {
        for (size_t j = 0; j < cell.size(); ++j)
          order[j] = {g_.row(cell[j]).dot(dir), cell[j]};
        std::sort(order.begin(), order.end());
        double w = 0.0;
        Vector sum = Vector::Zero(m_);
        for (size_t j = 0; j + 1 < order.size(); ++j) {
          const Index i = order[j].second;
          w += pool_.weights[i];
          sum += pool_.weights[i] * g_.row(i).transpose();
          if (order[j + 1].first == order[j].first) continue;
          const double gain =
              cell_value(w, sum) + cell_value(wk - w, sk - sum) - base;
          if (gain > best_gain) {
            best_gain = gain;
            best_cell = k;
            best_side.clear();
            for (size_t t = 0; t <= j; ++t) best_side.push_back(order[t].second);
          }
        }
      }
    }
    if (best_cell < 0) return false;
    for (Index i : best_side) labels_[static_cast<size_t>(i)] = empty;
    cells_ = stats(labels_);
    *current = total_welfare(cells_);
    return true;
  }

  void finish(PartitionSolution* sol) {
    // Compact labels onto the nonempty cells in ascending cell order.
    std::vector<int> remap(static_cast<size_t>(K_), -1);
    int next = 0;
    for (Index i = 0; i < n_; ++i) {
      const auto k = static_cast<size_t>(labels_[static_cast<size_t>(i)]);
      if (remap[k] < 0 && pool_.weights[i] > 0.0) remap[k] = next++;
    }
    for (Index i = 0; i < n_; ++i) {
      const auto k = static_cast<size_t>(labels_[static_cast<size_t>(i)]);
      if (remap[k] < 0) remap[k] = next++;
    }
    sol->labels.resize(labels_.size());
    for (size_t i = 0; i < labels_.size(); ++i)
      sol->labels[i] = remap[static_cast<size_t>(labels_[i])];
    sol->actions.resize(next, m_);
    sol->multipliers.resize(next, m_);
    for (int k = 0; k < next; ++k) {
      const Mask mask = label_mask(sol->labels, k);
      sol->actions.row(k) = weighted_mean(g_, pool_.weights, &mask).transpose();
      sol->multipliers.row(k) =
          welfare_.gradient(sol->actions.row(k).transpose()).transpose();
    }
    const LinearScores scores =
        moment_scores(welfare_, sol->actions, sol->multipliers);
    Index changes = 0;
    for (Index i = 0; i < n_; ++i)
      if (best_linear(scores, g_.row(i).transpose()) !=
          sol->labels[static_cast<size_t>(i)])
        ++changes;
    sol->assign_changes = changes;
    sol->converged = static_cast<double>(changes) <=
                     config_.tol_assignment * static_cast<double>(n_);
  }

  const Welfare& welfare_;
  const SamplePool& pool_;
  const Points& g_;
  const SolverConfig& config_;
  Index n_;
  Index m_;
  int K_ = 0;
  Labels labels_;
  MomentCells cells_;
  std::vector<int> active_;
};

class GeneralSolver {
 public:
  GeneralSolver(const ProblemSpec& problem, const SamplePool& pool,
                const SolverConfig& config)
      : problem_(problem),
        game_(problem.general()),
        pool_(pool),
        config_(config),
        n_(pool.size()) {}

  PartitionSolution run(int K, std::uint64_t seed) {
    PartitionSolution sol;
    sol.requested_cells = K;
    const std::vector<Index> seeds =
        kmeanspp_seeds(pool_.points, pool_.weights, K, seed);
    Labels labels(static_cast<size_t>(n_), 0);
    for (Index i = 0; i < n_; ++i) {
      double top = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < seeds.size(); ++k) {
        const double d =
            (pool_.points.row(i) - pool_.points.row(seeds[k])).squaredNorm();
        if (d < top) {
          top = d;
          labels[static_cast<size_t>(i)] = static_cast<int>(k);
        }
      }
    }
    State state = evaluate(compact(labels), nullptr);
    Matrix x_prev = state.target;
    sol.trace.push_back(state.welfare);

    int it = 0;
    for (; it < config_.max_iterations; ++it) {
      bool accepted = false;
      bool stable = false;
      for (double d = config_.damping; d >= kMinDamping && !accepted; d *= 0.5) {
        const Matrix x_used = x_prev + d * (state.target - x_prev);
        const Labels proposal = assign(problem_, pool_, state.actions, x_used);
        if (proposal == state.labels) {
          stable = d == config_.damping;
          if (stable) break;
          continue;
        }
        State next = evaluate(compact(proposal), &state);
        if (next.welfare > state.welfare + tolerance(state.welfare)) {
          state = std::move(next);
          x_prev = x_used;
          accepted = true;
        }
      }
      if (stable) {
        if (config_.local_moves && merge(&state)) {
          x_prev = state.target;
          sol.trace.push_back(state.welfare);
          continue;
        }
        break;
      }
      if (!accepted && config_.local_moves && merge(&state)) {
        x_prev = state.target;
        accepted = true;
      }
      if (!accepted) break;
      sol.trace.push_back(state.welfare);
    }
    sol.iterations = it;
    sol.labels = state.labels;
    sol.actions = state.actions;
    sol.multipliers = state.target;
    sol.welfare = welfare(problem_, pool_, sol.labels, sol.actions);
    const Labels again = assign(problem_, pool_, sol.actions, sol.multipliers);
    Index changes = 0;
    for (size_t i = 0; i < again.size(); ++i)
      if (again[i] != sol.labels[i]) ++changes;
    sol.assign_changes = changes;
    sol.converged = static_cast<double>(changes) <=
                    config_.tol_assignment * static_cast<double>(n_);
    return sol;
  }

 private:
  struct State {
    Labels labels;
    Matrix actions;
    Matrix target;
    double welfare = 0.0;
  };

  double tolerance(double value) const {
    return 1e-12 * std::max(1.0, std::abs(value));
  }

  static Labels compact(const Labels& labels) {
    std::vector<int> remap;
    Labels out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
      const auto k = static_cast<size_t>(labels[i]);
      if (k >= remap.size()) remap.resize(k + 1, -1);
      if (remap[k] < 0)
        remap[k] = static_cast<int>(
            std::count_if(remap.begin(), remap.end(), [](int r) { return r >= 0; }));
      out[i] = remap[k];
    }
    return out;
  }

  State evaluate(const Labels& labels, const State* previous) const {
    State s;
    s.labels = labels;
    const int cells = *std::max_element(labels.begin(), labels.end()) + 1;
    const Index m = game_.action_dimension;
    s.actions.resize(cells, m);
    s.target.resize(cells, m);
    for (int k = 0; k < cells; ++k) {
      const Mask mask = label_mask(labels, k);
      // Warm start from the previous action of the cell holding most of the
      // new members.
      const Vector* start = nullptr;
      Vector warm;
      if (previous) {
        std::vector<int> votes(static_cast<size_t>(previous->actions.rows()), 0);
        for (size_t i = 0; i < labels.size(); ++i)
          if (mask[i]) ++votes[static_cast<size_t>(previous->labels[i])];
        const auto top = std::max_element(votes.begin(), votes.end());
        warm = previous->actions.row(top - votes.begin()).transpose();
        start = &warm;
      }
      s.actions.row(k) =
          cell_action(problem_, pool_, mask, config_.tol_eq, start).transpose();
      s.target.row(k) =
          cell_multiplier(problem_, pool_, mask, s.actions.row(k).transpose())
              .transpose();
    }
    s.welfare = welfare(problem_, pool_, s.labels, s.actions);
    return s;
  }

  bool merge(State* state) const {
    const int cells = static_cast<int>(state->actions.rows());
    State best;
    best.welfare = state->welfare + tolerance(state->welfare);
    bool found = false;
    for (int k = 0; k < cells; ++k) {
      for (int l = k + 1; l < cells; ++l) {
        Labels merged = state->labels;
        for (auto& label : merged)
          if (label == l) label = k;
        State candidate = evaluate(compact(merged), state);
        if (candidate.welfare > best.welfare) {
          best = std::move(candidate);
          found = true;
        }
      }
    }
    if (found) *state = std::move(best);
    return found;
  }

  const ProblemSpec& problem_;
  const GeneralGameSpec& game_;
  const SamplePool& pool_;
  const SolverConfig& config_;
  Index n_;
};

}  // namespace

PartitionSolution solve(const ProblemSpec& problem, const SamplePool& pool,
                        int K, const SolverConfig& config) {
  config.validate();
  if (K < 1) throw Error(ErrorKind::kInvalidSpec, "K must be >= 1");
  Points g;
  if (problem.is_moment()) g = moment_values(problem.moment().map, pool);

  auto run_one = [&](int r) -> PartitionSolution {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
    if (problem.is_moment()) {
      MomentSolver solver(problem, pool, g, config);
      return solver.run(K, seed);
    }
    GeneralSolver solver(problem, pool, config);
    return solver.run(K, seed);
  };

  std::vector<PartitionSolution> results(static_cast<size_t>(config.restarts));
  std::vector<std::string> failures(static_cast<size_t>(config.restarts));
  std::vector<bool> ok(static_cast<size_t>(config.restarts), false);
  auto guarded = [&](int r) {
    try {
      results[static_cast<size_t>(r)] = run_one(r);
      ok[static_cast<size_t>(r)] = true;
    } catch (const Error& e) {
      failures[static_cast<size_t>(r)] = e.what();
    }
  };
  // Each restart owns its slot, so the result does not depend on threads.
  for (int r = 0; r < config.restarts; r += config.threads) {
    std::vector<std::future<void>> batch;
    for (int t = 0; t < config.threads && r + t < config.restarts; ++t) {
      if (config.threads == 1) {
        guarded(r + t);
      } else {
        batch.push_back(std::async(std::launch::async, guarded, r + t));
      }
    }
    for (auto& f : batch) f.get();
  }

  int best = -1;
  std::vector<double> restart_welfare;
  for (int r = 0; r < config.restarts; ++r) {
    const auto rs = static_cast<size_t>(r);
    if (!ok[rs]) continue;
    if (problem.is_moment())
      results[rs].welfare =
          welfare(problem, pool, results[rs].labels, results[rs].actions);
    restart_welfare.push_back(results[rs].welfare);
    if (best < 0 || results[rs].welfare > results[static_cast<size_t>(best)].welfare)
      best = r;
  }
  if (best < 0) {
    std::ostringstream msg;
    msg << "all " << config.restarts << " restarts failed:";
    for (int r = 0; r < config.restarts; ++r)
      msg << " [restart " << r << "] " << failures[static_cast<size_t>(r)];
    throw Error(ErrorKind::kSolveFailure, msg.str());
  }
  PartitionSolution out = std::move(results[static_cast<size_t>(best)]);
  out.best_restart = best;
  out.restart_welfare = std::move(restart_welfare);
  return out;
}

// ----------------------------------------------------------- convexity check

ConvexCellsReport convex_cells_check(const ProblemSpec& problem,
                                     const SamplePool& pool,
                                     const PartitionSolution& solution,
                                     Index pairs_per_cell, std::uint64_t seed,
                                     double tie_tol) {
  if (!problem.is_moment())
    throw Error(ErrorKind::kInvalidSpec, "convexity check needs moment mode");
  const MomentGame& game = problem.moment();
  if (problem.action_dimension() > problem.space.dimension ||
      !is_declared_injective(game.map))
    throw Error(ErrorKind::kInvalidSpec,
                "convexity check needs an injective moment map with M <= L");
  ConvexCellsReport report;
  const Points g = moment_values(game.map, pool);
  const LinearScores scores =
      moment_scores(game.welfare, solution.actions, solution.multipliers);
  std::vector<std::vector<Index>> members(
      static_cast<size_t>(solution.cell_count()));
  for (size_t i = 0; i < solution.labels.size(); ++i)
    members[static_cast<size_t>(solution.labels[i])].push_back(
        static_cast<Index>(i));
  std::mt19937_64 rng(seed);
  for (int k = 0; k < solution.cell_count(); ++k) {
    const auto& cell = members[static_cast<size_t>(k)];
    if (cell.size() < 2) continue;
    std::uniform_int_distribution<size_t> pick(0, cell.size() - 1);
    for (Index p = 0; p < pairs_per_cell; ++p) {
      const Vector mid =
          0.5 * (g.row(cell[pick(rng)]) + g.row(cell[pick(rng)])).transpose();
      double top = 0.0;
      best_linear(scores, mid, &top);
      const double own = scores.score(k, mid);
      ++report.pairs_tested;
      if (top - own > tie_tol * (1.0 + std::abs(own))) ++report.violations;
    }
  }
  report.violation_fraction =
      report.pairs_tested == 0
          ? 0.0
          : static_cast<double>(report.violations) /
                static_cast<double>(report.pairs_tested);
  report.passed = report.violations == 0;
  return report;
}

}  // namespace infotransport
