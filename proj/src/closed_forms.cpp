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

#include "infotransport/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "infotransport/error.hpp"

namespace infotransport {

std::string to_string(ClosedFormPolicy::Name name) {
  switch (name) {
    case ClosedFormPolicy::Name::kQuadraticElliptical:
      return "quadratic_elliptical";
    case ClosedFormPolicy::Name::kSpherical:
      return "spherical";
    case ClosedFormPolicy::Name::kCylinder:
      return "cylinder";
    case ClosedFormPolicy::Name::kDirichlet:
      return "dirichlet";
  }
  return "unknown";
}

Policy ClosedFormPolicy::policy() const {
  Policy p;
  p.kind = Policy::Kind::kClosedForm;
  p.name = to_string(name);
  p.evaluate = evaluate;
  p.project = project;
  return p;
}

ProblemSpec ClosedFormPolicy::problem(StateSpace space, PriorSpec prior) const {
  ProblemSpec spec;
  spec.space = std::move(space);
  spec.prior = std::move(prior);
  spec.game = MomentGame{welfare, map};
  return spec;
}

ConditionReport maximize_condition(const std::function<double(double)>& f,
                                   double lo, double hi, double tol) {
  constexpr int kGrid = 2048;
  ConditionReport rep;
  rep.upper = hi;
  rep.tolerance = tol;
  rep.max_value = -std::numeric_limits<double>::infinity();
  int best = 0;
  const double h = (hi - lo) / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i) {
    const double x = i == kGrid - 1 ? hi : lo + i * h;
    const double v = f(x);
    if (!std::isfinite(v))
      throw Error(ErrorKind::kEvaluation,
                  "condition is not finite at " + std::to_string(x));
    if (v > rep.max_value) {
      rep.max_value = v;
      rep.argmax = x;
      best = i;
    }
  }
  // Golden section on the bracket around the grid maximum.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo + std::max(best - 1, 0) * h;
  double b = std::min(lo + (best + 1) * h, hi);
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  for (const auto& [x, v] : {std::pair{c, fc}, std::pair{d, fd}}) {
    if (std::isfinite(v) && v > rep.max_value) {
      rep.max_value = v;
      rep.argmax = x;
    }
  }
  rep.holds = rep.max_value <= tol;
  return rep;
}

namespace {

Matrix symmetric_sqrt(const Matrix& S, bool inverse) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::kInvalidSpec, "sigma must be symmetric positive definite");
  Vector d = eig.eigenvalues().cwiseSqrt();
  if (inverse) d = d.cwiseInverse();
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

// sup of x psi(x^2) over [0, limit].
double scaled_radius_bound(const Curve& psi, double limit) {
  const ConditionReport r = maximize_condition(
      [&](double x) { return x * psi(x * x); }, 0.0, limit,
      std::numeric_limits<double>::infinity());
  return r.max_value;
}

}  // namespace

ClosedFormPolicy quadratic_elliptical(const Matrix& H, const Matrix& sigma) {
  if (H.rows() != H.cols() || sigma.rows() != sigma.cols() ||
      H.rows() != sigma.rows())
    throw Error(ErrorKind::kInvalidSpec,
                "H and sigma must be square of the same size");
  if ((H - H.transpose()).norm() > 1e-12 * (1.0 + H.norm()))
    throw Error(ErrorKind::kInvalidSpec, "H must be symmetric");
  const Index m = H.rows();
  ClosedFormPolicy cf;
  cf.name = ClosedFormPolicy::Name::kQuadraticElliptical;
  cf.H = H;
  cf.sigma = sigma;
  cf.welfare = Welfare(QuadraticWelfare{H, Vector::Zero(m)});
  cf.map = IdentityMap{};

  const Matrix root = symmetric_sqrt(sigma, false);
  const Matrix root_inv = symmetric_sqrt(sigma, true);
  const Matrix V = root * H * root;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (V + V.transpose()));
  std::vector<Index> positive;
  for (Index i = 0; i < m; ++i)
    if (eig.eigenvalues()[i] > 1e-12) positive.push_back(i);
  Matrix Q(m, static_cast<Index>(positive.size()));
  for (size_t j = 0; j < positive.size(); ++j)
    Q.col(static_cast<Index>(j)) = eig.eigenvectors().col(positive[j]);

  cf.basis = root * Q;
  if (positive.empty()) {
    cf.projection = Matrix::Zero(m, m);
    cf.note = "no positive eigenvalues: no information is revealed";
  } else {
    cf.projection =
        root * Q * (Q.transpose() * Q).inverse() * Q.transpose() * root_inv;
  }
  const Matrix P = cf.projection;
  cf.evaluate = [P](const Vector& omega) { return Vector(P * omega); };

  Matrix schur = H;
  if (!positive.empty()) {
    const Matrix U = cf.basis;
    const Matrix gram = U.transpose() * H * U;
    const Matrix solve = gram.ldlt().solve(U.transpose() * H);
    cf.project = [U, solve](const Vector& b) { return Vector(U * (solve * b)); };
    schur = H - H * U * solve;
  } else {
    cf.project = [m](const Vector&) { return Vector(Vector::Zero(m)); };
  }
  Eigen::SelfAdjointEigenSolver<Matrix> s(0.5 * (schur + schur.transpose()),
                                          Eigen::EigenvaluesOnly);
  cf.schur_max = s.eigenvalues().maxCoeff();
  ConditionReport cond;
  cond.max_value = cf.schur_max;
  cond.tolerance = 1e-10;
  cond.holds = cf.schur_max <= 1e-10;
  cf.conditions.push_back(cond);
  cf.optimal = cond.holds;
  cf.unique = std::abs(H.determinant()) > 1e-12;
  return cf;
}

ClosedFormPolicy spherical(const Curve& psi, const Curve& mu, const Curve& phi,
                           int L) {
  if (L < 1) throw Error(ErrorKind::kInvalidSpec, "L must be >= 1");
  ClosedFormPolicy cf;
  cf.name = ClosedFormPolicy::Name::kSpherical;
  cf.split = L;
  cf.welfare = Welfare(RadialWelfare{phi});
  cf.map = RadialScalingMap{psi};
  const double alpha = radial_alpha(mu, psi, L);
  cf.alpha = alpha;
  cf.evaluate = [alpha](const Vector& omega) {
    const double r = omega.norm();
    Vector a = Vector::Zero(omega.size());
    if (r > 0.0) {
      a = (alpha / r) * omega;
    } else {
      a[0] = alpha;
    }
    return a;
  };
  cf.project = cf.evaluate;
  const double bound = scaled_radius_bound(psi, radial_cutoff(mu, L));
  const double a2 = alpha * alpha;
  const double slope = phi.derivative(a2);
  cf.conditions.push_back(maximize_condition(
      [&](double b) {
        return phi(b * b) - phi(a2) + 2.0 * slope * alpha * (alpha - b);
      },
      0.0, bound));
  cf.optimal = cf.conditions.back().holds;
  std::ostringstream note;
  note << "condition searched on [0, " << bound << "]";
  cf.note = note.str();
  return cf;
}

ClosedFormPolicy cylinder(const Curve& psi, const Curve& mu1,
                          const Curve& phi1, const Curve& phi2, int L1,
                          int L2) {
  if (L1 < 1 || L2 < 0)
    throw Error(ErrorKind::kInvalidSpec, "need L1 >= 1 and L2 >= 0");
  ClosedFormPolicy cf;
  cf.name = ClosedFormPolicy::Name::kCylinder;
  cf.split = L1;
  cf.welfare = Welfare(CylinderWelfare{L1, phi1, phi2});
  if (psi.kind() == Curve::Kind::kPolynomial && psi.coefficients().size() <= 1) {
    const double c = psi.coefficients().empty() ? 0.0 : psi.coefficients()[0];
    cf.map = LinearMap{c * Matrix::Identity(L1 + L2, L1 + L2)};
  } else {
    cf.map = CustomMap{L1 + L2, false, [psi, L1](const Vector& omega) {
                         return Vector(psi(omega.head(L1).squaredNorm()) * omega);
                       }};
  }
  const double alpha = radial_alpha(mu1, psi, L1);
  cf.alpha = alpha;
  cf.evaluate = [alpha, L1](const Vector& omega) {
    Vector a = Vector::Zero(omega.size());
    const double r = omega.head(L1).norm();
    if (r > 0.0) {
      a.head(L1) = (alpha / r) * omega.head(L1);
    } else {
      a[0] = alpha;
    }
    return a;
  };
  cf.project = cf.evaluate;
  const double a2 = alpha * alpha;
  const double slope = phi1.derivative(a2);
  const double bound = scaled_radius_bound(psi, radial_cutoff(mu1, L1));
  cf.conditions.push_back(maximize_condition(
      [&](double b) {
        return phi1(b * b) - phi1(a2) + 2.0 * slope * alpha * (alpha - b);
      },
      0.0, bound));
  // phi(y1, y2) <= phi(y1, 0) on the block-2 range.
  cf.conditions.push_back(maximize_condition(
      [&](double y) { return phi2(y) - phi2(0.0); }, 0.0, bound * bound));
  cf.optimal = slope > 0.0 && cf.conditions[0].holds && cf.conditions[1].holds;
  std::ostringstream note;
  note << "separable welfare; condition searched on [0, " << bound << "]";
  if (!(slope > 0.0)) note << "; phi1'(alpha^2) is not positive";
  cf.note = note.str();
  return cf;
}

bool block_evenness_probe(const SamplePool& pool, int split, double sigmas) {
  const Index n = pool.size();
  if (n < 2) return true;
  const Vector w = pool.weights / pool.weights.sum();
  for (Index c = split; c < pool.dimension(); ++c) {
    for (int power : {1, 3}) {
      const Vector x = pool.points.col(c).array().pow(power);
      const double mean = w.dot(x);
      const double se =
          std::sqrt((w.array().square() * (x.array() - mean).square()).sum());
      if (std::abs(mean) > sigmas * se + 1e-12) return false;
    }
  }
  return true;
}

ClosedFormPolicy dirichlet_policy(const DirichletParams& p) {
  const Index m = p.alpha.size();
  if (p.split < 1 || p.split >= m)
    throw Error(ErrorKind::kInvalidSpec, "split must lie in [1, M)");
  if ((p.alpha.array() <= 0.0).any())
    throw Error(ErrorKind::kInvalidSpec, "alpha must be positive");
  if (!(p.q1 > 0.0 && p.q2 > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "q must be positive");
  const int s = p.split;
  const Index r = m - s;
  const Vector y1 = p.y1.size() ? p.y1 : Vector(Vector::Ones(s));
  const Vector y2 = p.y2.size() ? p.y2 : Vector(Vector::Ones(r));
  if (y1.size() != s || y2.size() != r)
    throw Error(ErrorKind::kInvalidSpec, "y blocks must match the split");

  ClosedFormPolicy cf;
  cf.name = ClosedFormPolicy::Name::kDirichlet;
  cf.split = s;
  cf.welfare = Welfare(EntropySumWelfare{s, p.q1, p.q2, y1, y2, p.phi1, p.phi2});
  cf.map = BlockScalingMap{s, BlockScalingMap::Statistic::kSum, p.psi1, p.psi2};

  // Monte Carlo estimate of gamma_i = E[psi_i(s_i) s_i].
  const SamplePool mc =
      sample(DirichletPrior{p.alpha}, StateSpace::simplex(static_cast<int>(m)),
             p.samples, p.seed);
  cf.gamma.resize(2);
  cf.gamma_se.resize(2);
  cf.gamma_quadrature.resize(2);
  const Curve* psis[2] = {&p.psi1, &p.psi2};
  const double total = p.alpha.sum();
  const double block_alpha[2] = {p.alpha.head(s).sum(), p.alpha.tail(r).sum()};
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (int b = 0; b < 2; ++b) {
    Vector x(mc.size());
    for (Index i = 0; i < mc.size(); ++i) {
      const double sum = b == 0 ? mc.points.row(i).head(s).sum()
                                : mc.points.row(i).tail(r).sum();
      x[i] = (*psis[b])(sum) * sum;
    }
    const double mean = pairwise_sum(x) / static_cast<double>(x.size());
    const double var = (x.array() - mean).square().sum() /
                       static_cast<double>(std::max<Index>(x.size() - 1, 1));
    cf.gamma[b] = mean;
    cf.gamma_se[b] = std::sqrt(var / static_cast<double>(x.size()));
    const double a = block_alpha[b], c = total - block_alpha[b];
    const double norm = boost::math::beta(a, c);
    const Curve& psi = *psis[b];
    cf.gamma_quadrature[b] = integrator.integrate(
        [&](double u) {
          return psi(u) * u * std::pow(u, a - 1.0) * std::pow(1.0 - u, c - 1.0) /
                 norm;
        },
        0.0, 1.0);
  }

  const double g1 = cf.gamma[0], g2 = cf.gamma[1];
  cf.evaluate = [s, r, g1, g2](const Vector& omega) {
    Vector a(omega.size());
    const double s1 = omega.head(s).sum(), s2 = omega.tail(r).sum();
    if (s1 > 0.0) {
      a.head(s) = (g1 / s1) * omega.head(s);
    } else {
      a.head(s).setConstant(g1 / static_cast<double>(s));
    }
    if (s2 > 0.0) {
      a.tail(r) = (g2 / s2) * omega.tail(r);
    } else {
      a.tail(r).setConstant(g2 / static_cast<double>(r));
    }
    return a;
  };
  cf.project = cf.evaluate;

  const double qs[2] = {p.q1, p.q2};
  const Curve* phis[2] = {&p.phi1, &p.phi2};
  bool holds = true;
  for (int b = 0; b < 2; ++b) {
    const double gamma = cf.gamma[b], q = qs[b];
    const Curve& phi = *phis[b];
    const Curve& psi = *psis[b];
    const double bound =
        maximize_condition([&](double x) { return psi(x) * x; }, 0.0, 1.0,
                           std::numeric_limits<double>::infinity())
            .max_value;
    cf.conditions.push_back(maximize_condition(
        [&](double bb) {
          const double entropy =
              bb > 0.0 ? bb * std::log(gamma / bb) - gamma + bb : -gamma;
          return phi(bb) - phi(gamma) + phi.derivative(gamma) * (gamma - bb) -
                 q * entropy;
        },
        0.0, bound));
    holds = holds && cf.conditions.back().holds;
  }
  cf.optimal = holds;
  cf.note = "gamma by Monte Carlo on " + std::to_string(p.samples) +
            " draws, Beta quadrature cross-check";
  return cf;
}

double pool_welfare(const Welfare& welfare, const Points& values,
                    const Vector& weights) {
  Vector terms(values.rows());
  for (Index i = 0; i < values.rows(); ++i)
    terms[i] = weights[i] == 0.0 ? 0.0
                                 : weights[i] * welfare.value(values.row(i).transpose());
  return pairwise_sum(terms);
}

}  // namespace infotransport
