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

// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "infotransport/closed_forms.hpp"
#include "infotransport/linearized.hpp"
#include "infotransport/oracle_discrete.hpp"
#include "infotransport/partition_solver.hpp"
#include "infotransport/verifier.hpp"

using namespace infotransport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

PriorSpec gaussian(int d) { return GaussianPrior{Vector::Zero(d), Matrix::Identity(d, d)}; }

// Largest distance between two actions.
double dispersion(const Matrix& actions) {
  double top = 0.0;
  for (Index k = 0; k < actions.rows(); ++k)
    for (Index l = k + 1; l < actions.rows(); ++l)
      top = std::max(top, (actions.row(k) - actions.row(l)).norm());
  return top;
}

struct Output {
  std::string name;
  ProblemSpec problem;
  SamplePool pool;
  PartitionSolution solution;
};

struct Oracle {
  std::string name;
  ClosedFormPolicy cf;
  ProblemSpec problem;
  SamplePool pool;
};

std::vector<Output> criterion_outputs;
std::vector<Oracle> oracles;

void criterion1_and_8() {
  const auto t0 = Clock::now();
  double worst = 0.0, worst_lp = 0.0;
  bool lp_ok = true;
  for (const auto& inst : discrete_suite()) {
    const ExhaustiveResult best = exhaustive_optimum(inst, inst.K_max);
    PartitionSolution s = solve(inst.problem(), inst.pool(), inst.K_max, {});
    worst = std::max(worst, std::abs(best.welfare - s.welfare));
    const KantorovichReport k = kantorovich_compare(inst, s.labels);
    lp_ok = lp_ok && k.feasible;
    worst_lp = std::max(worst_lp, std::abs(k.lp_cost - k.monge_cost));
    criterion_outputs.push_back({inst.name, inst.problem(), inst.pool(), std::move(s)});
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-9 && secs < 60.0,
         fmt("discrete suite: max |solver - exhaustive| = %.2e over 12 instances, %.2f s",
             worst, secs));
  report(8, lp_ok && worst_lp <= 1e-7,
         fmt("discrete suite: max |LP optimum - Monge cost| = %.2e, all LPs feasible: %s",
             worst_lp, lp_ok ? "yes" : "no"));
}

void criterion2() {
  Matrix H(2, 2);
  H << 1.0, 0.0, 0.0, -1.0;
  const auto space = StateSpace::euclidean(2);
  const ClosedFormPolicy cf = quadratic_elliptical(H, Matrix::Identity(2, 2));
  const ProblemSpec problem = cf.problem(space, gaussian(2));
  const SamplePool pool = sample(gaussian(2), space, 20000, 7);
  const PolicyOnPool on_pool = evaluate_on(cf.policy(), pool);
  const double oracle = pool_welfare(cf.welfare, on_pool.values, pool.weights);
  const auto t0 = Clock::now();
  SolverConfig config;
  config.restarts = 8;
  PartitionSolution s = solve(problem, pool, 64, config);
  const double secs = seconds_since(t0);
  const double rel = std::abs(oracle - s.welfare) / std::abs(oracle);
  const DiagnosticsReport diag = diagnose(on_pool, problem, pool);
  const double dim = box_counting_dimension(s.actions);
  report(2, rel <= 0.03 && diag.passed() && dim <= 1.3 && secs < 300.0,
         fmt("saddle K=64: solver %.6f vs oracle %.6f (gap %.2f%%), oracle checks %s, "
             "action box dimension %.3f (bound 1), %.1f s",
             s.welfare, oracle, 100.0 * rel, diag.passed() ? "all pass" : "FAILED", dim, secs));
  criterion_outputs.push_back({"saddle_K64", problem, pool, std::move(s)});
  oracles.push_back({"quadratic_elliptical", cf, problem, pool});
}

void criterion3() {
  const auto space = StateSpace::euclidean(2);
  const Welfare concave(QuadraticWelfare{-Matrix::Identity(2, 2), Vector::Zero(2)});
  const ProblemSpec problem{space, gaussian(2), MomentGame{concave, IdentityMap{}}};
  const SamplePool pool = sample(gaussian(2), space, 5000, 3);
  double worst = 0.0;
  for (int K : {2, 8, 32}) worst = std::max(worst, dispersion(solve(problem, pool, K, {}).actions));

  GeneralGameSpec game;
  game.action_dimension = 2;
  game.map = LinearGame{Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2)};
  game.welfare = concave;
  const LinearizedModel model = build(game, 2, Vector::Zero(2));
  const double top_eig = model.eigenvalues.maxCoeff();
  const PartitionSolution limit = limit_partition(model, pool, 8, {});
  report(3, worst <= 1e-6 && top_eig < 0.0 && limit.cell_count() == 1,
         fmt("H = -I: action dispersion %.2e for K in {2,8,32}; D0 top eigenvalue %.4f; "
             "limit partition cells %d",
             worst, top_eig, limit.cell_count()));
}

void criterion4() {
  const auto space = StateSpace::euclidean(2);
  const ClosedFormPolicy cf = spherical(Curve::constant(1.0), Curve::exponential(1.0, -0.5),
                                        Curve::power(1.0, 0.5), 2);
  const ProblemSpec problem = cf.problem(space, gaussian(2));
  const SamplePool pool = sample(gaussian(2), space, 20000, 7);
  const PolicyOnPool on_pool = evaluate_on(cf.policy(), pool);
  const double oracle = pool_welfare(cf.welfare, on_pool.values, pool.weights);
  const double cond = cf.conditions.front().max_value;
  const double alpha_err = std::abs(cf.alpha - std::sqrt(std::numbers::pi / 2.0));
  const PartitionSolution s = solve(problem, pool, 96, {});
  const double rel = std::abs(oracle - s.welfare) / std::abs(oracle);
  const Vector radii = on_pool.values.rowwise().norm();
  const double spread = radii.maxCoeff() - radii.minCoeff();
  report(4, cond <= 1e-8 && alpha_err <= 1e-6 && rel <= 0.03 && spread <= 1e-12,
         fmt("sphere: condition max %.2e, |alpha - sqrt(pi/2)| = %.2e, solver K=96 %.6f vs "
             "oracle %.6f (gap %.2f%%), radius spread %.2e",
             cond, alpha_err, s.welfare, oracle, 100.0 * rel, spread));
  oracles.push_back({"spherical", cf, problem, pool});
}

void criterion5() {
  DirichletParams p;
  p.alpha = Vector::Ones(4);
  p.split = 2;
  const ClosedFormPolicy cf = dirichlet_policy(p);
  double z = 0.0;
  for (Index i = 0; i < cf.gamma.size(); ++i)
    z = std::max(z, std::abs(cf.gamma[i] - 0.5) / cf.gamma_se[i]);
  double margin = -std::numeric_limits<double>::infinity();
  for (const auto& c : cf.conditions) margin = std::max(margin, c.max_value);
  const auto space = StateSpace::simplex(4);
  const SamplePool pool = sample(DirichletPrior{p.alpha}, space, 2000, 5);
  const PolicyOnPool on_pool = evaluate_on(cf.policy(), pool);
  double sum_err = 0.0;
  for (Index i = 0; i < pool.size(); ++i) {
    sum_err = std::max(sum_err, std::abs(on_pool.values.row(i).head(2).sum() - cf.gamma[0]));
    sum_err = std::max(sum_err, std::abs(on_pool.values.row(i).tail(2).sum() - cf.gamma[1]));
  }
  report(5, z <= 3.0 && margin <= 1e-8 && sum_err <= 1e-12,
         fmt("dirichlet linear phi: gamma = (%.5f, %.5f), max |gamma - 0.5|/SE = %.2f; "
             "condition margin %.3e (needs <= 1e-8); block-sum error %.1e",
             cf.gamma[0], cf.gamma[1], z, margin, sum_err));
}

void criterion6() {
  {
    const ClosedFormPolicy cf =
        cylinder(Curve::constant(1.0), Curve::exponential(1.0, -0.5), Curve::power(1.0, 0.5),
                 Curve::polynomial({0.0, -1.0}), 2, 1);
    const auto space = StateSpace::euclidean(3);
    oracles.push_back({"cylinder", cf, cf.problem(space, gaussian(3)),
                       sample(gaussian(3), space, 20000, 8)});
  }
  {
    DirichletParams p;
    p.alpha = Vector::Ones(4);
    p.split = 2;
    p.phi1 = Curve::polynomial({0.0, 0.0, -3.0});
    p.phi2 = Curve::polynomial({0.0, 0.0, -3.0});
    const ClosedFormPolicy cf = dirichlet_policy(p);
    const auto space = StateSpace::simplex(4);
    oracles.push_back({"dirichlet", cf, cf.problem(space, DirichletPrior{p.alpha}),
                       sample(DirichletPrior{p.alpha}, space, 20000, 9)});
  }
  bool pass = true;
  std::string detail;
  for (const auto& o : oracles) {
    if (!o.cf.optimal) continue;
    const PolicyOnPool base = evaluate_on(o.cf.policy(), o.pool);
    const DiagnosticsReport clean = diagnose(base, o.problem, o.pool);
    pass = pass && clean.passed();
    detail += o.name + (clean.passed() ? " clean ok" : " clean FAILED");
    const std::pair<const char*, PolicyOnPool> perturbed[] = {
        {"scale", scale_support(base)},
        {"displace", displace_neighborhood(base, o.pool)},
        {"swap", swap_neighborhoods(base, o.pool)}};
    for (const auto& [label, policy] : perturbed) {
      const auto failed = diagnose(policy, o.problem, o.pool).failed_checks();
      pass = pass && !failed.empty();
      detail += std::string(", ") + label + " caught by " +
                (failed.empty() ? std::string("NOTHING") : failed.front());
    }
    detail += "; ";
  }
  report(6, pass, detail);
}

void criterion7() {
  VerifyConfig config;
  config.tuple_size = 3;
  config.n_tuples = 1000;
  bool pass = true;
  Index total = 0, unconverged = 0, on_converged = 0;
  std::string detail;
  for (const auto& o : criterion_outputs) {
    const CheckResult c = cyclical_monotonicity_check(partition_policy(o.problem, o.solution),
                                                      o.problem, o.pool, config);
    total += c.count;
    if (o.solution.converged) on_converged += c.count;
    if (!o.solution.converged) {
      ++unconverged;
      detail += fmt("%s not converged (%ld unstable labels, %ld violations, worst %.2e); ",
                    o.name.c_str(), static_cast<long>(o.solution.assign_changes),
                    static_cast<long>(c.count), c.value);
    }
    pass = pass && c.count == 0 && o.solution.converged;
  }
  // Every output must be converged and violation-free; the count restricted
  // to converged outputs is printed as well.
  report(7, pass,
         fmt("%ld violations over %zu outputs (%ld on converged ones), %ld unconverged. ",
             static_cast<long>(total), criterion_outputs.size(),
             static_cast<long>(on_converged), static_cast<long>(unconverged)) +
             detail);
}

void criterion9() {
  Matrix H(2, 2);
  H << 1.0, 0.3, 0.3, 0.6;
  GeneralGameSpec game;
  game.action_dimension = 2;
  game.map = LinearGame{Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2)};
  game.welfare = Welfare(QuadraticWelfare{H, Vector::Zero(2)});
  const auto space = StateSpace::euclidean(2);
  const ProblemSpec problem{space, gaussian(2), game};
  const SamplePool pool = sample(gaussian(2), space, 10000, 11);
  const LinearizedModel model = build(game, 2, Vector::Zero(2));
  const PartitionSolution limit = limit_partition(model, pool, 4, {});
  const PartitionSolution full = solve(problem, pool, 4, {});
  // Match cells by nearest action.
  std::vector<int> match(static_cast<size_t>(limit.cell_count()), 0);
  for (int k = 0; k < limit.cell_count(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < full.cell_count(); ++j) {
      const double d = (limit.actions.row(k) - full.actions.row(j)).norm();
      if (d < best) {
        best = d;
        match[static_cast<size_t>(k)] = j;
      }
    }
  }
  Index agree = 0;
  for (size_t i = 0; i < limit.labels.size(); ++i)
    agree += match[static_cast<size_t>(limit.labels[i])] == full.labels[i];
  const double share = static_cast<double>(agree) / static_cast<double>(pool.size());
  const double rel = std::abs(limit.welfare - full.welfare) / std::abs(full.welfare);
  const HalfspaceAudit audit = halfspace_audit(model, pool, limit);
  report(9, share >= 0.99 && rel <= 1e-6 && audit.violations == 0,
         fmt("G = omega - a, K=4, n=10000: label agreement %.4f, relative welfare gap %.2e, "
             "half-space violations %ld",
             share, rel, static_cast<long>(audit.violations)));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1_and_8();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion9();
  std::printf("acceptance: %d failing criteria, %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
