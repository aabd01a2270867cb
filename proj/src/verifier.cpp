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

#include "infotransport/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "infotransport/error.hpp"

namespace infotransport {

std::string to_string(Policy::Kind kind) {
  switch (kind) {
    case Policy::Kind::kPartition:
      return "partition";
    case Policy::Kind::kClosedForm:
      return "closed_form";
    case Policy::Kind::kCustom:
      return "custom";
  }
  return "custom";
}

PolicyOnPool evaluate_on(Policy policy, const SamplePool& pool) {
  if (!policy.evaluate)
    throw Error(ErrorKind::kInvalidSpec, "policy has no evaluate function");
  PolicyOnPool out;
  const Index n = pool.size();
  for (Index i = 0; i < n; ++i) {
    const Vector a = policy.evaluate(pool.points.row(i).transpose());
    if (i == 0) out.values.resize(n, a.size());
    out.values.row(i) = a.transpose();
  }
  if (policy.support.rows() == 0)
    policy.support = out.values.topRows(std::min(n, kSupportCap));
  out.policy = std::move(policy);
  return out;
}

PolicyOnPool partition_policy(const ProblemSpec& problem,
                              const PartitionSolution& solution) {
  if (!problem.is_moment())
    throw Error(ErrorKind::kInvalidSpec, "partition policy needs moment mode");
  PolicyOnPool out;
  out.policy.kind = Policy::Kind::kPartition;
  out.policy.name = "partition(K=" + std::to_string(solution.cell_count()) + ")";
  out.policy.support = solution.actions;
  const MomentMapSpec map = problem.moment().map;
  const Welfare welfare = problem.moment().welfare;
  const Matrix actions = solution.actions;
  Vector offset(actions.rows());
  Matrix slope(actions.rows(), actions.cols());
  for (Index k = 0; k < actions.rows(); ++k) {
    const Vector a = actions.row(k).transpose();
    const Vector grad = welfare.gradient(a);
    slope.row(k) = grad.transpose();
    offset[k] = welfare.value(a) - grad.dot(a);
  }
  out.policy.evaluate = [map, actions, offset, slope](const Vector& omega) {
    const Vector g = apply_moment_map(map, omega);
    Index best = 0;
    (offset + slope * g).maxCoeff(&best);
    return Vector(actions.row(best).transpose());
  };
  out.values.resize(static_cast<Index>(solution.labels.size()), actions.cols());
  for (size_t i = 0; i < solution.labels.size(); ++i)
    out.values.row(static_cast<Index>(i)) = actions.row(solution.labels[i]);
  return out;
}

bool DiagnosticsReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.informational || c.passed;
  });
}

std::vector<std::string> DiagnosticsReport::failed_checks() const {
  std::vector<std::string> names;
  for (const auto& c : checks)
    if (!c.informational && !c.passed) names.push_back(c.name);
  return names;
}

const CheckResult* DiagnosticsReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

void require_moment(const ProblemSpec& problem) {
  if (!problem.is_moment())
    throw Error(ErrorKind::kInvalidSpec, "verifier checks need moment mode");
}

// c(a, b) = W(b) - (offset_a + slope_a . b) for every support point a.
struct SupportScores {
  Vector offset;
  Matrix slope;  // S x M

  SupportScores(const Points& support, const Welfare& welfare)
      : offset(support.rows()), slope(support.rows(), support.cols()) {
    for (Index s = 0; s < support.rows(); ++s) {
      const Vector a = support.row(s).transpose();
      const Vector grad = welfare.gradient(a);
      slope.row(s) = grad.transpose();
      offset[s] = welfare.value(a) - grad.dot(a);
    }
  }

  // Largest score, and the runner-up over support points distinct from the
  // winner.
  double best(const Vector& b, Index* arg = nullptr) const {
    Index k = 0;
    const double top = (offset + slope * b).maxCoeff(&k);
    if (arg) *arg = k;
    return top;
  }
};

double phi_with(const Policy& policy, const Welfare& welfare,
                const SupportScores& scores, const Vector& b) {
  const double wb = welfare.value(b);
  double value = scores.offset.size() > 0
                     ? wb - scores.best(b)
                     : std::numeric_limits<double>::infinity();
  if (policy.project)
    value = std::min(value, bregman_cost(welfare, policy.project(b), b));
  return value;
}

Points probes(const SamplePool& pool, const Points& g, Index count,
              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, pool.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Points out(count, g.cols());
  for (Index p = 0; p < count; ++p) {
    const double t = unit(rng);
    out.row(p) = t * g.row(pick(rng)) + (1.0 - t) * g.row(pick(rng));
  }
  return out;
}

std::vector<std::pair<Index, Index>> support_pairs(Index size, Index limit,
                                                   std::uint64_t seed) {
  std::vector<std::pair<Index, Index>> pairs;
  if (size < 2) return pairs;
  if (size * (size - 1) / 2 <= limit) {
    for (Index i = 0; i < size; ++i)
      for (Index j = i + 1; j < size; ++j) pairs.emplace_back(i, j);
    return pairs;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, size - 1);
  while (static_cast<Index>(pairs.size()) < limit) {
    const Index i = pick(rng), j = pick(rng);
    if (i != j) pairs.emplace_back(i, j);
  }
  return pairs;
}

}  // namespace

double phi(const Policy& policy, const Welfare& welfare, const Vector& b) {
  return phi_with(policy, welfare, SupportScores(policy.support, welfare), b);
}

CheckResult maximality_check(const PolicyOnPool& policy,
                             const ProblemSpec& problem,
                             const SamplePool& pool,
                             const VerifyConfig& config) {
  require_moment(problem);
  const Welfare& welfare = problem.moment().welfare;
  const Points g = moment_values(problem.moment().map, pool);
  const Points b = probes(pool, g, config.n_probe, config.seed);
  const SupportScores scores(policy.policy.support, welfare);
  CheckResult r;
  r.name = "maximality";
  r.tolerance = config.tol_max;
  r.value = -std::numeric_limits<double>::infinity();
  for (Index p = 0; p < b.rows(); ++p) {
    const double v = phi_with(policy.policy, welfare, scores, b.row(p).transpose());
    r.value = std::max(r.value, v);
    if (v > config.tol_max) ++r.count;
  }
  r.tested = b.rows();
  r.passed = r.count == 0;
  return r;
}

CheckResult w_monotone_check(const Policy& policy, const Welfare& welfare,
                             const VerifyConfig& config) {
  CheckResult r;
  r.name = "w_monotone";
  r.tolerance = config.tol_cost;
  const auto pairs = support_pairs(policy.support.rows(), config.n_pairs,
                                   config.seed + 1);
  for (const auto& [i, j] : pairs) {
    const Vector a = policy.support.row(i).transpose();
    const Vector b = policy.support.row(j).transpose();
    for (const double c : {bregman_cost(welfare, a, b), bregman_cost(welfare, b, a)}) {
      r.value = std::min(r.value, c);
      const double tol = config.tol_cost * std::max(1.0, std::abs(welfare.value(b)));
      if (c < -tol) ++r.count;
    }
  }
  r.tested = static_cast<Index>(pairs.size());
  r.passed = r.count == 0;
  return r;
}

CheckResult w_convex_check(const Policy& policy, const Welfare& welfare,
                           const VerifyConfig& config) {
  CheckResult r;
  r.name = "w_convex";
  r.tolerance = config.tol_cost;
  const auto pairs = support_pairs(policy.support.rows(), config.n_pairs,
                                   config.seed + 2);
  for (const auto& [i, j] : pairs) {
    const Vector a = policy.support.row(i).transpose();
    const Vector b = policy.support.row(j).transpose();
    const double wa = welfare.value(a), wb = welfare.value(b);
    for (int s = 1; s <= config.n_t; ++s) {
      const double t = static_cast<double>(s) / (config.n_t + 1);
      const double chord = t * wa + (1.0 - t) * wb;
      const double gap = welfare.value(t * a + (1.0 - t) * b) - chord;
      r.value = std::max(r.value, gap);
      if (gap > config.tol_cost * std::max(1.0, std::abs(chord))) ++r.count;
    }
  }
  r.tested = static_cast<Index>(pairs.size()) * config.n_t;
  r.passed = r.count == 0;
  return r;
}

std::vector<CheckResult> pointwise_conditions_check(
    const PolicyOnPool& policy, const ProblemSpec& problem,
    const SamplePool& pool, const VerifyConfig& config) {
  require_moment(problem);
  const Welfare& welfare = problem.moment().welfare;
  const Points g = moment_values(problem.moment().map, pool);
  const SupportScores scores(policy.policy.support, welfare);
  CheckResult cost;
  cost.name = "pointwise_cost";
  cost.tolerance = config.tol_cost;
  cost.value = -std::numeric_limits<double>::infinity();
  CheckResult mismatch;
  mismatch.name = "argmin_mismatch";
  mismatch.tolerance = config.tol_mismatch_fraction;
  for (Index i = 0; i < pool.size(); ++i) {
    const Vector a = policy.values.row(i).transpose();
    const Vector b = g.row(i).transpose();
    const double c = bregman_cost(welfare, a, b);
    const double tol = config.tol_cost * std::max(1.0, std::abs(welfare.value(b)));
    cost.value = std::max(cost.value, c);
    if (c > tol) ++cost.count;
    if (c > phi_with(policy.policy, welfare, scores, b) + tol) ++mismatch.count;
  }
  cost.tested = mismatch.tested = pool.size();
  cost.passed = cost.count == 0;
  mismatch.value = pool.size() == 0 ? 0.0
                                    : static_cast<double>(mismatch.count) /
                                          static_cast<double>(pool.size());
  mismatch.passed = mismatch.value <= config.tol_mismatch_fraction;
  return {cost, mismatch};
}

CheckResult cyclical_monotonicity_check(const PolicyOnPool& policy,
                                        const ProblemSpec& problem,
                                        const SamplePool& pool,
                                        const VerifyConfig& config) {
  require_moment(problem);
  if (config.tuple_size < 2 || config.tuple_size > 4)
    throw Error(ErrorKind::kInvalidSpec, "tuple_size must lie in [2, 4]");
  const Welfare& welfare = problem.moment().welfare;
  const Points g = moment_values(problem.moment().map, pool);
  CheckResult r;
  r.name = "cyclical_monotonicity";
  r.tolerance = config.tol_cyclical;
  r.value = std::numeric_limits<double>::infinity();
  const Index n = pool.size();
  const int m = config.tuple_size;
  if (n < m) {
    r.value = 0.0;
    return r;
  }
  std::mt19937_64 rng(config.seed + 3);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<Index> idx(static_cast<size_t>(m));
  Matrix C(m, m);
  std::vector<int> perm(static_cast<size_t>(m));
  for (Index t = 0; t < config.n_tuples; ++t) {
    for (int j = 0; j < m; ++j) {
      Index candidate;
      do {
        candidate = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + j, candidate) !=
               idx.begin() + j);
      idx[static_cast<size_t>(j)] = candidate;
    }
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l)
        C(j, l) = bregman_cost(welfare,
                               policy.values.row(idx[static_cast<size_t>(j)]).transpose(),
                               g.row(idx[static_cast<size_t>(l)]).transpose());
    const double identity = C.trace();
    std::iota(perm.begin(), perm.end(), 0);
    double worst = 0.0;
    while (std::next_permutation(perm.begin(), perm.end())) {
      double total = 0.0;
      for (int l = 0; l < m; ++l) total += C(perm[static_cast<size_t>(l)], l);
      worst = std::min(worst, total - identity);
    }
    r.value = std::min(r.value, worst);
    if (worst < -config.tol_cyclical * std::max(1.0, std::abs(identity)))
      ++r.count;
  }
  r.tested = config.n_tuples;
  r.passed = r.count == 0;
  return r;
}

CheckResult mean_consistency_check(const PolicyOnPool& policy,
                                   const ProblemSpec& problem,
                                   const SamplePool& pool,
                                   const VerifyConfig& config) {
  require_moment(problem);
  const Points g = moment_values(problem.moment().map, pool);
  const Index n = pool.size();
  const Index m = g.cols();
  const Vector w = pool.weights / pool.weights.sum();
  CheckResult r;
  r.name = "mean_consistency";
  r.tolerance = config.mean_sigmas;
  double worst_z = 0.0;
  Vector x(n);
  for (Index j = 0; j < m; ++j) {
    for (Index k = 0; k <= m; ++k) {
      for (Index i = 0; i < n; ++i) {
        const double h = k == 0 ? 1.0 : policy.values(i, k - 1);
        x[i] = (g(i, j) - policy.values(i, j)) * h;
      }
      const double mean = w.dot(x);
      const double se =
          std::sqrt((w.array().square() * (x.array() - mean).square()).sum());
      const double excess = std::abs(mean) - config.mean_sigmas * se;
      r.value = std::max(r.value, std::abs(mean));
      if (se > 0.0) worst_z = std::max(worst_z, std::abs(mean) / se);
      if (excess > 1e-9) ++r.count;
      ++r.tested;
    }
  }
  std::ostringstream note;
  note << "max |z| = " << worst_z;
  r.note = note.str();
  r.passed = r.count == 0;
  return r;
}

UniquenessReport uniqueness_probe(const PolicyOnPool& policy,
                                  const ProblemSpec& problem,
                                  const SamplePool& pool,
                                  const VerifyConfig& config) {
  require_moment(problem);
  const Welfare& welfare = problem.moment().welfare;
  const SupportScores scores(policy.policy.support, welfare);
  UniquenessReport rep;
  for (Index s = 0; s < policy.policy.support.rows(); ++s) {
    const Vector a = policy.policy.support.row(s).transpose();
    rep.support_phi_max = std::max(
        rep.support_phi_max, std::abs(phi_with(policy.policy, welfare, scores, a)));
  }
  rep.support_in_q = rep.support_phi_max <= config.tol_max;
  const Points g = moment_values(problem.moment().map, pool);
  const Points b = probes(pool, g, std::min<Index>(config.n_probe, 1000),
                          config.seed + 4);
  Index ties = 0;
  const Index S = policy.policy.support.rows();
  for (Index p = 0; p < b.rows() && S > 1; ++p) {
    const Vector bp = b.row(p).transpose();
    const Vector sc = scores.offset + scores.slope * bp;
    Index arg = 0;
    const double top = sc.maxCoeff(&arg);
    for (Index s = 0; s < S; ++s) {
      if (s == arg) continue;
      const double gap = (policy.policy.support.row(s) -
                          policy.policy.support.row(arg)).norm();
      if (gap > 1e-9 && top - sc[s] <= config.tol_cost * (1.0 + std::abs(top))) {
        ++ties;
        break;
      }
    }
  }
  rep.probes = b.rows();
  rep.non_singleton_fraction =
      rep.probes == 0 ? 0.0
                      : static_cast<double>(ties) / static_cast<double>(rep.probes);
  return rep;
}

double box_counting_dimension(const Points& points, int levels) {
  const Index n = points.rows();
  if (n < 2) return 0.0;
  const Vector lo = points.colwise().minCoeff().transpose();
  const Vector hi = points.colwise().maxCoeff().transpose();
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0)) return 0.0;
  int J = levels;
  if (J <= 0)
    J = std::max(3, static_cast<int>(std::floor(
                        std::log2(static_cast<double>(n) / 4.0) / 2.0)));
  if (J < 2)
    throw Error(ErrorKind::kEstimation, "box counting needs at least two scales");
  Vector xs(J), ys(J);
  std::vector<std::int64_t> key(static_cast<size_t>(points.cols()));
  for (int j = 1; j <= J; ++j) {
    const double cells = std::ldexp(1.0, j);
    const double side = extent / cells;
    std::set<std::vector<std::int64_t>> boxes;
    for (Index i = 0; i < n; ++i) {
      for (Index c = 0; c < points.cols(); ++c) {
        const double u = std::floor((points(i, c) - lo[c]) / side);
        key[static_cast<size_t>(c)] =
            static_cast<std::int64_t>(std::min(u, cells - 1.0));
      }
      boxes.insert(key);
    }
    xs[j - 1] = std::log(cells);
    ys[j - 1] = std::log(static_cast<double>(boxes.size()));
  }
  const double mx = xs.mean(), my = ys.mean();
  const double sxx = (xs.array() - mx).square().sum();
  return ((xs.array() - mx) * (ys.array() - my)).sum() / sxx;
}

DimensionReport dimension_check(const Policy& policy, const Welfare& welfare,
                                const VerifyConfig& config) {
  DimensionReport rep;
  const Points& S = policy.support;
  int bound = 0;
  for (Index s = 0; s < S.rows(); ++s) {
    const Matrix H = hessian_W(welfare, S.row(s).transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (H + H.transpose()),
                                              Eigen::EigenvaluesOnly);
    bound = std::max(bound,
                     static_cast<int>((eig.eigenvalues().array() >= -1e-10).count()));
  }
  rep.bound = bound;
  rep.estimate = box_counting_dimension(S);
  rep.estimated = S.rows() >= config.min_dimension_points;
  rep.passed = !rep.estimated || rep.estimate <= rep.bound + config.dim_slack;
  return rep;
}

DiagnosticsReport diagnose(const PolicyOnPool& policy,
                           const ProblemSpec& problem, const SamplePool& pool,
                           const VerifyConfig& config) {
  require_moment(problem);
  if (policy.values.rows() != pool.size())
    throw Error(ErrorKind::kInvalidSpec, "policy values must cover the pool");
  if (policy.policy.support.rows() == 0)
    throw Error(ErrorKind::kInvalidSpec, "policy support sample is empty");
  const Welfare& welfare = problem.moment().welfare;
  DiagnosticsReport rep;
  rep.policy_name = policy.policy.name;

  CheckResult max = maximality_check(policy, problem, pool, config);
  rep.max_phi = max.value;
  rep.checks.push_back(max);

  CheckResult mono = w_monotone_check(policy.policy, welfare, config);
  rep.monotone_violations = mono.count;
  rep.monotone_worst = mono.value;
  rep.checks.push_back(mono);

  CheckResult convex = w_convex_check(policy.policy, welfare, config);
  rep.convexity_violations = convex.count;
  rep.checks.push_back(convex);

  const auto pointwise = pointwise_conditions_check(policy, problem, pool, config);
  rep.pointwise_cost_max = pointwise[0].value;
  rep.argmin_mismatch_fraction = pointwise[1].value;
  rep.checks.insert(rep.checks.end(), pointwise.begin(), pointwise.end());

  CheckResult cyc = cyclical_monotonicity_check(policy, problem, pool, config);
  rep.cyclical_violations = cyc.count;
  rep.checks.push_back(cyc);

  CheckResult mean = mean_consistency_check(policy, problem, pool, config);
  rep.mean_residual_max = mean.value;
  rep.checks.push_back(mean);

  const UniquenessReport uniq = uniqueness_probe(policy, problem, pool, config);
  CheckResult u;
  u.name = "uniqueness_probe";
  u.informational = true;
  u.passed = uniq.support_in_q;
  u.value = uniq.non_singleton_fraction;
  u.tested = uniq.probes;
  std::ostringstream note;
  note << "support phi max " << uniq.support_phi_max
       << ", non-singleton argmin fraction " << uniq.non_singleton_fraction;
  u.note = note.str();
  rep.checks.push_back(u);

  const DimensionReport dim = dimension_check(policy.policy, welfare, config);
  rep.dim_estimate = dim.estimate;
  rep.dim_bound = dim.bound;
  CheckResult d;
  d.name = "dimension";
  d.passed = dim.passed;
  d.value = dim.estimate;
  d.tolerance = dim.bound + config.dim_slack;
  d.tested = policy.policy.support.rows();
  if (!dim.estimated)
    d.note = "warning: support has fewer than " +
             std::to_string(config.min_dimension_points) +
             " points, estimate not enforced";
  rep.checks.push_back(d);
  return rep;
}

// ------------------------------------------------------------ perturbations

namespace {

std::vector<Index> nearest(const SamplePool& pool, Index center, Index count) {
  std::vector<Index> order(static_cast<size_t>(pool.size()));
  std::iota(order.begin(), order.end(), 0);
  Vector d(pool.size());
  for (Index i = 0; i < pool.size(); ++i)
    d[i] = (pool.points.row(i) - pool.points.row(center)).squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return d[a] < d[b]; });
  order.resize(static_cast<size_t>(count));
  return order;
}

Index neighborhood_size(const SamplePool& pool, double fraction) {
  return std::max<Index>(
      1, static_cast<Index>(std::ceil(fraction * static_cast<double>(pool.size()))));
}

}  // namespace

PolicyOnPool scale_support(const PolicyOnPool& policy, double factor) {
  PolicyOnPool out;
  out.policy.kind = policy.policy.kind;
  out.policy.name = policy.policy.name + " scaled";
  out.policy.support = factor * policy.policy.support;
  out.values = factor * policy.values;
  if (policy.policy.evaluate) {
    auto inner = policy.policy.evaluate;
    out.policy.evaluate = [inner, factor](const Vector& omega) {
      return Vector(factor * inner(omega));
    };
  }
  return out;
}

PolicyOnPool displace_neighborhood(const PolicyOnPool& policy,
                                   const SamplePool& pool, double fraction,
                                   double shift, std::uint64_t seed) {
  PolicyOnPool out = policy;
  out.policy.name = policy.policy.name + " displaced";
  out.policy.project = nullptr;
  out.policy.evaluate = nullptr;
  std::mt19937_64 rng(seed);
  const Index center = std::uniform_int_distribution<Index>(0, pool.size() - 1)(rng);
  const std::vector<Index> hood = nearest(pool, center, neighborhood_size(pool, fraction));
  const double scale =
      std::sqrt(policy.values.rowwise().squaredNorm().mean());
  Vector step = Vector::Zero(policy.values.cols());
  step[0] = shift * (scale > 0.0 ? scale : 1.0);
  for (Index i : hood) out.values.row(i) += step.transpose();
  const Index extra = std::min<Index>(static_cast<Index>(hood.size()), 200);
  Points support(policy.policy.support.rows() + extra, policy.values.cols());
  support.topRows(policy.policy.support.rows()) = policy.policy.support;
  for (Index j = 0; j < extra; ++j)
    support.row(policy.policy.support.rows() + j) =
        out.values.row(hood[static_cast<size_t>(j)]);
  out.policy.support = std::move(support);
  return out;
}

PolicyOnPool swap_neighborhoods(const PolicyOnPool& policy,
                                const SamplePool& pool, double fraction,
                                std::uint64_t seed) {
  PolicyOnPool out = policy;
  out.policy.name = policy.policy.name + " swapped";
  out.policy.evaluate = nullptr;
  std::mt19937_64 rng(seed);
  const Index first = std::uniform_int_distribution<Index>(0, pool.size() - 1)(rng);
  Index second = 0;
  (policy.values.rowwise() - policy.values.row(first))
      .rowwise()
      .squaredNorm()
      .maxCoeff(&second);
  const Index count = neighborhood_size(pool, fraction);
  const std::vector<Index> a = nearest(pool, first, count);
  std::vector<Index> b = nearest(pool, second, count);
  std::set<Index> in_a(a.begin(), a.end());
  b.erase(std::remove_if(b.begin(), b.end(),
                         [&](Index i) { return in_a.count(i) > 0; }),
          b.end());
  for (size_t j = 0; j < std::min(a.size(), b.size()); ++j) {
    out.values.row(a[j]) = policy.values.row(b[j]);
    out.values.row(b[j]) = policy.values.row(a[j]);
  }
  return out;
}

}  // namespace infotransport
