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

#include "infotransport/priors.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "infotransport/error.hpp"

namespace infotransport {

namespace {

constexpr int kRadialKnots = 1024;
constexpr double kTailRatio = 1e-14;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidSpec, what);
}

void require_spd(const Matrix& m, const std::string& name) {
  require(m.rows() == m.cols() && m.rows() > 0, name + " must be square");
  require((m - m.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * (1.0 + m.cwiseAbs().maxCoeff()),
          name + " must be symmetric");
  Eigen::LLT<Matrix> llt(m);
  require(llt.info() == Eigen::Success, name + " must be positive definite");
}

double gk_integrate(const std::function<double(double)>& f, double a, double b,
                    double* error) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 20, 1e-13, error);
}

// Peak-relative cutoff for a nonnegative integrand on [0, inf).
// Returns a negative value when the integrand vanishes on the probe grid.
double find_cutoff(const std::function<double(double)>& f) {
  double radius = 1.0;
  double peak = 0.0;
  auto scan = [&](double lo, double hi) {
    double tail_max = 0.0;
    for (int i = 0; i <= 256; ++i) {
      const double r = lo + (hi - lo) * i / 256.0;
      const double v = std::abs(f(r));
      if (!std::isfinite(v))
        throw Error(ErrorKind::kQuadratureFailure,
                    "non-finite integrand at r=" + std::to_string(r));
      peak = std::max(peak, v);
      if (i >= 128) tail_max = std::max(tail_max, v);
    }
    return tail_max;
  };
  double tail = scan(0.0, radius);
  while (peak == 0.0 || tail >= kTailRatio * peak) {
    if (peak == 0.0 && radius > 64.0) return -1.0;
    if (radius > 1e8)
      throw Error(ErrorKind::kQuadratureFailure,
                  "radial integrand does not decay");
    tail = scan(radius, 2.0 * radius);
    radius *= 2.0;
  }
  return radius;
}

}  // namespace

// ---------------------------------------------------------------- StateSpace

StateSpace StateSpace::euclidean(int dimension) {
  StateSpace s;
  s.dimension = dimension;
  s.domain = Domain::kEuclidean;
  return s;
}

StateSpace StateSpace::box(Vector lower, Vector upper) {
  StateSpace s;
  s.dimension = static_cast<int>(lower.size());
  s.domain = Domain::kBox;
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

StateSpace StateSpace::ball(int dimension, double radius) {
  StateSpace s;
  s.dimension = dimension;
  s.domain = Domain::kBall;
  s.radius = radius;
  return s;
}

StateSpace StateSpace::simplex(int dimension) {
  StateSpace s;
  s.dimension = dimension;
  s.domain = Domain::kSimplex;
  return s;
}

void StateSpace::validate() const {
  require(dimension >= 1, "state dimension must be >= 1");
  switch (domain) {
    case Domain::kEuclidean: break;
    case Domain::kBox:
      require(lower.size() == dimension && upper.size() == dimension,
              "box bounds must match the state dimension");
      for (int i = 0; i < dimension; ++i)
        require(std::isfinite(lower[i]) && std::isfinite(upper[i]) &&
                    lower[i] < upper[i],
                "box bounds must be finite with lower < upper on axis " +
                    std::to_string(i));
      break;
    case Domain::kBall:
      require(std::isfinite(radius) && radius > 0.0,
              "ball radius must be positive");
      break;
    case Domain::kSimplex:
      require(dimension >= 2, "simplex needs at least two coordinates");
      break;
  }
}

bool StateSpace::contains(const Eigen::Ref<const Vector>& omega,
                          double tol) const {
  if (omega.size() != dimension) return false;
  switch (domain) {
    case Domain::kEuclidean: return omega.allFinite();
    case Domain::kBox:
      return (omega.array() >= lower.array() - tol).all() &&
             (omega.array() <= upper.array() + tol).all();
    case Domain::kBall: return omega.norm() <= radius + tol;
    case Domain::kSimplex:
      return (omega.array() >= -tol).all() &&
             std::abs(omega.sum() - 1.0) <= tol;
  }
  return false;
}

// ------------------------------------------------------------------- priors

int prior_dimension(const PriorSpec& prior) {
  return std::visit(
      overloaded{
          [](const GaussianPrior& p) { return static_cast<int>(p.mean.size()); },
          [](const EllipticalPrior& p) {
            return static_cast<int>(p.sigma.rows());
          },
          [](const DirichletPrior& p) {
            return static_cast<int>(p.alpha.size());
          },
          [](const UniformPrior& p) { return static_cast<int>(p.lower.size()); },
          [](const DiscretePrior& p) {
            return static_cast<int>(p.points.cols());
          },
          [](const CustomPrior& p) { return static_cast<int>(p.lower.size()); },
      },
      prior);
}

void validate(const PriorSpec& prior, const StateSpace& space) {
  space.validate();
  require(prior_dimension(prior) == space.dimension,
          "prior dimension " + std::to_string(prior_dimension(prior)) +
              " does not match state dimension " +
              std::to_string(space.dimension));
  using D = StateSpace::Domain;
  std::visit(
      overloaded{
          [&](const GaussianPrior& p) {
            require(space.domain == D::kEuclidean,
                    "gaussian prior needs a euclidean state space");
            require(p.covariance.rows() == p.mean.size(),
                    "covariance size must match the mean");
            require_spd(p.covariance, "covariance");
          },
          [&](const EllipticalPrior& p) {
            require(space.domain == D::kEuclidean,
                    "elliptical prior needs a euclidean state space");
            require_spd(p.sigma, "sigma");
          },
          [&](const DirichletPrior& p) {
            require(space.domain == D::kSimplex,
                    "dirichlet prior needs a simplex state space");
            require((p.alpha.array() > 0.0).all() && p.alpha.allFinite(),
                    "dirichlet alpha must be strictly positive");
          },
          [&](const UniformPrior& p) {
            require(p.upper.size() == p.lower.size(),
                    "uniform bounds must have equal length");
            require((p.lower.array() < p.upper.array()).all() &&
                        p.lower.allFinite() && p.upper.allFinite(),
                    "uniform bounds must be finite with lower < upper");
          },
          [&](const DiscretePrior& p) {
            require(p.points.rows() >= 1, "discrete prior needs atoms");
            require(p.weights.size() == p.points.rows(),
                    "discrete weights must match the atoms");
            require((p.weights.array() >= 0.0).all() && p.weights.sum() > 0.0,
                    "discrete weights must be nonnegative, not all zero");
            for (Index i = 0; i < p.points.rows(); ++i)
              require(space.contains(p.points.row(i).transpose(), 1e-9),
                      "discrete atom " + std::to_string(i) +
                          " lies outside the state space");
          },
          [&](const CustomPrior& p) {
            require(static_cast<bool>(p.density), "custom density missing");
            require(p.upper.size() == p.lower.size() &&
                        (p.lower.array() < p.upper.array()).all(),
                    "custom envelope box must have lower < upper");
            require(p.density_bound > 0.0, "density bound must be positive");
          },
      },
      prior);
}

SamplePool make_pool(Points points, Vector weights, std::uint64_t seed) {
  if (weights.size() != points.rows() || points.rows() == 0)
    throw Error(ErrorKind::kInvalidSpec, "pool weights must match points");
  if ((weights.array() < 0.0).any())
    throw Error(ErrorKind::kInvalidSpec, "pool weights must be nonnegative");
  const double total = pairwise_sum(weights);
  if (!(total > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "pool weights must not all be zero");
  SamplePool pool;
  pool.points = std::move(points);
  pool.weights = weights / total;
  pool.seed = seed;
  return pool;
}

namespace {

// Inverse-CDF table for the radius of a spherical law with density
// proportional to r^(L-1) mu(r^2).
class RadialTable {
 public:
  RadialTable(const Curve& mu, int dimension) {
    auto density = [&](double r) {
      return std::pow(r, dimension - 1) * mu.value(r * r);
    };
    const double cutoff = find_cutoff(density);
    if (cutoff <= 0.0)
      throw Error(ErrorKind::kInvalidSpec, "radial density vanishes");
    knots_.resize(kRadialKnots);
    cdf_.resize(kRadialKnots);
    knots_[0] = 0.0;
    cdf_[0] = 0.0;
    for (int i = 1; i < kRadialKnots; ++i) {
      knots_[i] = cutoff * i / (kRadialKnots - 1);
      double err = 0.0;
      cdf_[i] = cdf_[i - 1] + boost::math::quadrature::gauss_kronrod<
                                  double, 15>::integrate(density, knots_[i - 1],
                                                         knots_[i], 0, 0.0,
                                                         &err);
    }
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
  }

  double radius(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return knots_.back();
    const size_t hi = static_cast<size_t>(it - cdf_.begin());
    const size_t lo = hi - 1;
    const double span = cdf_[hi] - cdf_[lo];
    const double t = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
    return knots_[lo] + t * (knots_[hi] - knots_[lo]);
  }

 private:
  std::vector<double> knots_;
  std::vector<double> cdf_;
};

}  // namespace

SamplePool sample(const PriorSpec& prior, const StateSpace& space, Index n,
                  std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::kInvalidSpec, "sample count must be >= 1");
  validate(prior, space);
  const int dim = prior_dimension(prior);

  if (const auto* discrete = std::get_if<DiscretePrior>(&prior))
    return make_pool(discrete->points, discrete->weights, seed);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Points points(n, dim);

  std::visit(
      overloaded{
          [&](const GaussianPrior& p) {
            const Matrix chol = p.covariance.llt().matrixL();
            Vector z(dim);
            for (Index i = 0; i < n; ++i) {
              for (int j = 0; j < dim; ++j) z[j] = normal(rng);
              points.row(i) = (p.mean + chol * z).transpose();
            }
          },
          [&](const EllipticalPrior& p) {
            const Matrix chol = p.sigma.llt().matrixL();
            const RadialTable table(p.radial_density, dim);
            Vector z(dim);
            for (Index i = 0; i < n; ++i) {
              double norm = 0.0;
              do {
                for (int j = 0; j < dim; ++j) z[j] = normal(rng);
                norm = z.norm();
              } while (norm == 0.0);
              const double r = table.radius(unit(rng));
              points.row(i) = (chol * (z * (r / norm))).transpose();
            }
          },
          [&](const DirichletPrior& p) {
            std::vector<std::gamma_distribution<double>> gammas;
            for (int j = 0; j < dim; ++j) gammas.emplace_back(p.alpha[j], 1.0);
            Vector g(dim);
            for (Index i = 0; i < n; ++i) {
              double total = 0.0;
              do {
                for (int j = 0; j < dim; ++j) g[j] = gammas[j](rng);
                total = g.sum();
              } while (!(total > 0.0));
              points.row(i) = (g / total).transpose();
            }
          },
          [&](const UniformPrior& p) {
            for (Index i = 0; i < n; ++i)
              for (int j = 0; j < dim; ++j)
                points(i, j) = p.lower[j] + (p.upper[j] - p.lower[j]) * unit(rng);
          },
          [&](const DiscretePrior&) {},
          [&](const CustomPrior& p) {
            const Index max_attempts = 1000 * n + 10000;
            Index attempts = 0;
            Vector w(dim);
            for (Index i = 0; i < n; ++i) {
              for (;;) {
                if (++attempts > max_attempts) {
                  std::ostringstream msg;
                  msg << "rejection sampler accepted " << i << " of " << n
                      << " points in " << max_attempts
                      << " attempts (acceptance rate "
                      << static_cast<double>(i) / max_attempts << ")";
                  throw Error(ErrorKind::kSamplingFailure, msg.str());
                }
                for (int j = 0; j < dim; ++j)
                  w[j] = p.lower[j] + (p.upper[j] - p.lower[j]) * unit(rng);
                if (!space.contains(w)) continue;
                const double d = p.density(w);
                if (d < 0.0 || !std::isfinite(d))
                  throw Error(ErrorKind::kInvalidSpec,
                              "custom density must be finite and nonnegative");
                if (unit(rng) * p.density_bound < d) break;
              }
              points.row(i) = w.transpose();
            }
          },
      },
      prior);

  SamplePool pool;
  pool.points = std::move(points);
  pool.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
  pool.seed = seed;
  return pool;
}

// --------------------------------------------------------------- expectations

namespace detail {

double pairwise_sum(const double* data, Index n, Index stride) {
  if (n <= 8) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) acc += data[i * stride];
    return acc;
  }
  const Index half = n / 2;
  return pairwise_sum(data, half, stride) +
         pairwise_sum(data + half * stride, n - half, stride);
}

}  // namespace detail

Vector weighted_mean(const Points& values, const Vector& weights,
                     const Mask* mask) {
  const Index n = values.rows();
  const Index d = values.cols();
  Vector w = weights;
  if (mask) {
    for (Index i = 0; i < n; ++i)
      if (!(*mask)[static_cast<size_t>(i)]) w[i] = 0.0;
  }
  const double total = pairwise_sum(w);
  if (!(total > 0.0))
    throw Error(ErrorKind::kEmptyCell, "mask selects no positive weight");
  Vector out(d);
  Vector column(n);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < n; ++i) column[i] = w[i] == 0.0 ? 0.0 : w[i] * values(i, j);
    out[j] = pairwise_sum(column) / total;
  }
  return out;
}

namespace {

Points evaluate_rows(const SamplePool& pool, const VectorField& f,
                     const Mask* mask) {
  Points values;
  for (Index i = 0; i < pool.size(); ++i) {
    if (mask && !(*mask)[static_cast<size_t>(i)]) continue;
    const Vector v = f(pool.points.row(i).transpose());
    if (values.size() == 0) values = Points::Zero(pool.size(), v.size());
    if (!v.allFinite())
      throw Error(ErrorKind::kEvaluation,
                  "non-finite value at pool point " + std::to_string(i));
    values.row(i) = v.transpose();
  }
  return values;
}

}  // namespace

Vector expect(const SamplePool& pool, const VectorField& f) {
  return weighted_mean(evaluate_rows(pool, f, nullptr), pool.weights);
}

Vector conditional_expect(const SamplePool& pool, const Mask& mask,
                          const VectorField& f) {
  if (mask.size() != static_cast<size_t>(pool.size()))
    throw Error(ErrorKind::kInvalidSpec, "mask length must match the pool");
  bool any = false;
  for (Index i = 0; i < pool.size(); ++i)
    any = any || (mask[static_cast<size_t>(i)] && pool.weights[i] > 0.0);
  if (!any) throw Error(ErrorKind::kEmptyCell, "mask selects no positive weight");
  return weighted_mean(evaluate_rows(pool, f, &mask), pool.weights, &mask);
}

// ---------------------------------------------------------------- quadrature

double integrate_half_line(const std::function<double(double)>& f) {
  const double cutoff = find_cutoff(f);
  if (cutoff < 0.0) return 0.0;
  double err = 0.0;
  const double main = gk_integrate(f, 0.0, cutoff, &err);
  double tail_err = 0.0;
  const double tail = gk_integrate(f, cutoff, 2.0 * cutoff, &tail_err);
  if (!std::isfinite(main) ||
      std::abs(tail) > 1e-10 * std::max(std::abs(main), 1e-300))
    throw Error(ErrorKind::kQuadratureFailure,
                "integral does not converge on [0, inf)");
  return main + tail;
}

double radial_cutoff(const std::function<double(double)>& radial_density,
                     int dimension) {
  const double cutoff = find_cutoff([&](double r) {
    return std::pow(r, dimension - 1) * radial_density(r * r);
  });
  if (cutoff < 0.0)
    throw Error(ErrorKind::kQuadratureFailure, "radial density vanishes");
  return cutoff;
}

double radial_alpha(const std::function<double(double)>& radial_density,
                    const std::function<double(double)>& scaling,
                    int dimension) {
  if (dimension < 1)
    throw Error(ErrorKind::kInvalidSpec, "dimension must be >= 1");
  const double denominator = integrate_half_line([&](double r) {
    return std::pow(r, dimension - 1) * radial_density(r * r);
  });
  if (!(denominator > 0.0))
    throw Error(ErrorKind::kQuadratureFailure,
                "radial normalizer must be positive");
  const double numerator = integrate_half_line([&](double r) {
    return std::pow(r, dimension) * radial_density(r * r) * scaling(r * r);
  });
  return numerator / denominator;
}

}  // namespace infotransport
