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
#include <string>
#include <vector>

#include "infotransport/model.hpp"
#include "infotransport/partition_solver.hpp"
#include "infotransport/priors.hpp"
#include "infotransport/types.hpp"

namespace infotransport {

/// A state-to-action rule together with a finite sample of its support.
struct Policy {
  enum class Kind { kPartition, kClosedForm, kCustom };

  Kind kind = Kind::kCustom;
  std::string name;
  std::function<Vector(const Vector&)> evaluate;
  Points support;
  // Exact minimizer of c(., b) over the support when one is known.
  std::function<Vector(const Vector&)> project;
};

std::string to_string(Policy::Kind kind);

/// Policy values on the pool plus the policy itself. Perturbations act on both.
struct PolicyOnPool {
  Policy policy;
  Points values;  // n x M
};

constexpr Index kSupportCap = 2000;

/// Evaluates the policy on every pool point and fills an empty support with
/// the first kSupportCap values.
PolicyOnPool evaluate_on(Policy policy, const SamplePool& pool);

/// The partition as a policy: values follow the labels, support is the
/// action set, evaluate uses the assign rule.
PolicyOnPool partition_policy(const ProblemSpec& problem,
                              const PartitionSolution& solution);

struct VerifyConfig {
  Index n_probe = 4000;
  Index n_pairs = 2000;
  int n_t = 9;
  int tuple_size = 3;
  Index n_tuples = 1000;
  double tol_max = 1e-6;
  double tol_cost = 1e-9;
  double tol_mismatch_fraction = 1e-3;
  double tol_cyclical = 1e-9;
  double mean_sigmas = 6.0;
  double dim_slack = 0.3;
  Index min_dimension_points = 100;
  std::uint64_t seed = 0;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  bool informational = false;
  double value = 0.0;      // worst margin or statistic
  double tolerance = 0.0;
  Index count = 0;         // violations
  Index tested = 0;
  std::string note;
};

struct DiagnosticsReport {
  std::string policy_name;
  double max_phi = 0.0;
  Index monotone_violations = 0;
  double monotone_worst = 0.0;
  Index convexity_violations = 0;
  double pointwise_cost_max = 0.0;
  double argmin_mismatch_fraction = 0.0;
  Index cyclical_violations = 0;
  double mean_residual_max = 0.0;
  double dim_estimate = 0.0;
  double dim_bound = 0.0;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::vector<std::string> failed_checks() const;
  const CheckResult* find(const std::string& name) const;
};

/// inf over the support of c(a, b).
double phi(const Policy& policy, const Welfare& welfare, const Vector& b);

CheckResult maximality_check(const PolicyOnPool& policy,
                             const ProblemSpec& problem,
                             const SamplePool& pool,
                             const VerifyConfig& config = {});
CheckResult w_monotone_check(const Policy& policy, const Welfare& welfare,
                             const VerifyConfig& config = {});
CheckResult w_convex_check(const Policy& policy, const Welfare& welfare,
                           const VerifyConfig& config = {});
/// Returns the pointwise cost check followed by the argmin mismatch check.
std::vector<CheckResult> pointwise_conditions_check(
    const PolicyOnPool& policy, const ProblemSpec& problem,
    const SamplePool& pool, const VerifyConfig& config = {});
CheckResult cyclical_monotonicity_check(const PolicyOnPool& policy,
                                        const ProblemSpec& problem,
                                        const SamplePool& pool,
                                        const VerifyConfig& config = {});
/// Empirical E[(g - a) h(a)] for h = (1, a_1, ..., a_M), against its
/// standard error.
CheckResult mean_consistency_check(const PolicyOnPool& policy,
                                   const ProblemSpec& problem,
                                   const SamplePool& pool,
                                   const VerifyConfig& config = {});

struct UniquenessReport {
  bool support_in_q = true;
  double support_phi_max = 0.0;
  double non_singleton_fraction = 0.0;
  Index probes = 0;
};

UniquenessReport uniqueness_probe(const PolicyOnPool& policy,
                                  const ProblemSpec& problem,
                                  const SamplePool& pool,
                                  const VerifyConfig& config = {});

/// Box-counting slope over the scales E / 2^j, j = 1..J, with E the largest
/// bounding-box side. J = max(3, floor(log2(N / 4) / 2)) when levels <= 0.
double box_counting_dimension(const Points& points, int levels = 0);

struct DimensionReport {
  double estimate = 0.0;
  double bound = 0.0;
  bool estimated = false;  // false when the support is too small
  bool passed = true;
};

DimensionReport dimension_check(const Policy& policy, const Welfare& welfare,
                                const VerifyConfig& config = {});

/// Runs every check.
DiagnosticsReport diagnose(const PolicyOnPool& policy,
                           const ProblemSpec& problem, const SamplePool& pool,
                           const VerifyConfig& config = {});

// Perturbations used to test that the checks discriminate.
PolicyOnPool scale_support(const PolicyOnPool& policy, double factor = 1.1);
PolicyOnPool displace_neighborhood(const PolicyOnPool& policy,
                                   const SamplePool& pool,
                                   double fraction = 0.02,
                                   double shift = 0.5,
                                   std::uint64_t seed = 0);
PolicyOnPool swap_neighborhoods(const PolicyOnPool& policy,
                                const SamplePool& pool,
                                double fraction = 0.02,
                                std::uint64_t seed = 0);

}  // namespace infotransport
