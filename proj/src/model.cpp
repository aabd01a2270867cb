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

#include "infotransport/model.hpp"

#include <cmath>
#include <random>

#include "infotransport/error.hpp"

namespace infotransport {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidSpec, what);
}

double fd_step(const Vector& a) { return 1e-4 * (1.0 + a.norm()); }

Vector fd_gradient(const std::function<double(const Vector&)>& f,
                   const Vector& a) {
  const double h = 1e-6 * (1.0 + a.norm());
  Vector g(a.size());
  Vector p = a;
  for (Index i = 0; i < a.size(); ++i) {
    p[i] = a[i] + h;
    const double up = f(p);
    p[i] = a[i] - h;
    const double down = f(p);
    p[i] = a[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Matrix fd_hessian(const std::function<Vector(const Vector&)>& grad,
                  const Vector& a) {
  const double h = fd_step(a);
  const Index m = a.size();
  Matrix H(m, m);
  Vector p = a;
  for (Index j = 0; j < m; ++j) {
    p[j] = a[j] + h;
    const Vector up = grad(p);
    p[j] = a[j] - h;
    const Vector down = grad(p);
    p[j] = a[j];
    H.col(j) = (up - down) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

double xlogx_over(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

// ------------------------------------------------------------------ Welfare

Welfare::Welfare(WelfareSpec spec) : spec_(std::move(spec)) {}

int Welfare::dimension() const {
  return std::visit(
      overloaded{
          [](const QuadraticWelfare& w) { return static_cast<int>(w.H.rows()); },
          [](const RadialWelfare&) { return -1; },
          [](const CylinderWelfare&) { return -1; },
          [](const EntropySumWelfare& w) {
            return static_cast<int>(w.y1.size() + w.y2.size());
          },
          [](const CustomWelfare& w) { return w.dimension; },
      },
      spec_);
}

double Welfare::value(const Vector& a) const {
  return std::visit(
      overloaded{
          [&](const QuadraticWelfare& w) {
            return a.dot(w.H * a) + w.b.dot(a);
          },
          [&](const RadialWelfare& w) { return w.phi(a.squaredNorm()); },
          [&](const CylinderWelfare& w) {
            const auto s = static_cast<Index>(w.split);
            return w.phi1(a.head(s).squaredNorm()) +
                   w.phi2(a.tail(a.size() - s).squaredNorm());
          },
          [&](const EntropySumWelfare& w) {
            const auto s = static_cast<Index>(w.split);
            double total = 0.0;
            for (Index j = 0; j < s; ++j)
              total += w.q1 * xlogx_over(a[j], w.y1[j]);
            for (Index j = s; j < a.size(); ++j)
              total += w.q2 * xlogx_over(a[j], w.y2[j - s]);
            return total + w.phi1(a.head(s).sum()) +
                   w.phi2(a.tail(a.size() - s).sum());
          },
          [&](const CustomWelfare& w) { return w.value(a); },
      },
      spec_);
}

Vector Welfare::gradient(const Vector& a) const {
  return std::visit(
      overloaded{
          [&](const QuadraticWelfare& w) -> Vector {
            return (w.H + w.H.transpose()) * a + w.b;
          },
          [&](const RadialWelfare& w) -> Vector {
            return 2.0 * w.phi.derivative(a.squaredNorm()) * a;
          },
          [&](const CylinderWelfare& w) -> Vector {
            const auto s = static_cast<Index>(w.split);
            Vector g(a.size());
            g.head(s) = 2.0 * w.phi1.derivative(a.head(s).squaredNorm()) *
                        a.head(s);
            g.tail(a.size() - s) =
                2.0 * w.phi2.derivative(a.tail(a.size() - s).squaredNorm()) *
                a.tail(a.size() - s);
            return g;
          },
          [&](const EntropySumWelfare& w) -> Vector {
            const auto s = static_cast<Index>(w.split);
            Vector g(a.size());
            const double d1 = w.phi1.derivative(a.head(s).sum());
            const double d2 = w.phi2.derivative(a.tail(a.size() - s).sum());
            for (Index j = 0; j < s; ++j)
              g[j] = w.q1 * (std::log(a[j] / w.y1[j]) + 1.0) + d1;
            for (Index j = s; j < a.size(); ++j)
              g[j] = w.q2 * (std::log(a[j] / w.y2[j - s]) + 1.0) + d2;
            return g;
          },
          [&](const CustomWelfare& w) -> Vector {
            if (w.gradient) return w.gradient(a);
            return fd_gradient(w.value, a);
          },
      },
      spec_);
}

Matrix Welfare::hessian(const Vector& a) const {
  const Index m = a.size();
  return std::visit(
      overloaded{
          [&](const QuadraticWelfare& w) -> Matrix {
            return w.H + w.H.transpose();
          },
          [&](const RadialWelfare& w) -> Matrix {
            const double y = a.squaredNorm();
            return 2.0 * w.phi.derivative(y) * Matrix::Identity(m, m) +
                   4.0 * w.phi.second_derivative(y) * a * a.transpose();
          },
          [&](const CylinderWelfare& w) -> Matrix {
            const auto s = static_cast<Index>(w.split);
            const Index r = m - s;
            Matrix H = Matrix::Zero(m, m);
            const Vector a1 = a.head(s);
            const Vector a2 = a.tail(r);
            H.topLeftCorner(s, s) =
                2.0 * w.phi1.derivative(a1.squaredNorm()) *
                    Matrix::Identity(s, s) +
                4.0 * w.phi1.second_derivative(a1.squaredNorm()) * a1 *
                    a1.transpose();
            H.bottomRightCorner(r, r) =
                2.0 * w.phi2.derivative(a2.squaredNorm()) *
                    Matrix::Identity(r, r) +
                4.0 * w.phi2.second_derivative(a2.squaredNorm()) * a2 *
                    a2.transpose();
            return H;
          },
          [&](const EntropySumWelfare& w) -> Matrix {
            const auto s = static_cast<Index>(w.split);
            const Index r = m - s;
            Matrix H = Matrix::Zero(m, m);
            H.topLeftCorner(s, s).setConstant(
                w.phi1.second_derivative(a.head(s).sum()));
            H.bottomRightCorner(r, r).setConstant(
                w.phi2.second_derivative(a.tail(r).sum()));
            for (Index j = 0; j < s; ++j) H(j, j) += w.q1 / a[j];
            for (Index j = s; j < m; ++j) H(j, j) += w.q2 / a[j];
            return H;
          },
          [&](const CustomWelfare& w) -> Matrix {
            if (w.hessian) {
              const Matrix H = w.hessian(a);
              return 0.5 * (H + H.transpose());
            }
            return fd_hessian([&](const Vector& p) { return gradient(p); }, a);
          },
      },
      spec_);
}

double bregman_cost(const Welfare& welfare, const Vector& a, const Vector& b) {
  const Vector grad = welfare.gradient(a);
  if (!grad.allFinite())
    throw Error(ErrorKind::kEvaluation, "non-finite welfare gradient");
  return welfare.value(b) - welfare.value(a) + grad.dot(a - b);
}

Matrix hessian_W(const Welfare& welfare, const Vector& a) {
  return welfare.hessian(a);
}

double gradient_consistency(const Welfare& welfare, int dimension, int probes,
                            std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  std::uniform_real_distribution<double> positive(0.05, 1.0);
  const bool entropy =
      std::holds_alternative<EntropySumWelfare>(welfare.spec());
  double worst = 0.0;
  Vector a(dimension);
  for (int p = 0; p < probes; ++p) {
    for (int j = 0; j < dimension; ++j)
      a[j] = entropy ? positive(rng) : normal(rng);
    const Vector analytic = welfare.gradient(a);
    const Vector numeric =
        fd_gradient([&](const Vector& v) { return welfare.value(v); }, a);
    const double gap = (analytic - numeric).norm() /
                       std::max(1.0, numeric.norm());
    worst = std::max(worst, gap);
  }
  return worst;
}

// --------------------------------------------------------------- moment map

Vector apply_moment_map(const MomentMapSpec& map, const Vector& omega) {
  return std::visit(
      overloaded{
          [&](const IdentityMap&) -> Vector { return omega; },
          [&](const LinearMap& m) -> Vector { return m.A * omega; },
          [&](const RadialScalingMap& m) -> Vector {
            return omega * m.psi(omega.squaredNorm());
          },
          [&](const BlockScalingMap& m) -> Vector {
            const auto s = static_cast<Index>(m.split);
            const Index r = omega.size() - s;
            const bool sum = m.statistic == BlockScalingMap::Statistic::kSum;
            const double s1 =
                sum ? omega.head(s).sum() : omega.head(s).squaredNorm();
            const double s2 =
                sum ? omega.tail(r).sum() : omega.tail(r).squaredNorm();
            Vector g(omega.size());
            g.head(s) = m.psi1(s1) * omega.head(s);
            g.tail(r) = m.psi2(s2) * omega.tail(r);
            return g;
          },
          [&](const CustomMap& m) -> Vector { return m.map(omega); },
      },
      map);
}

int moment_dimension(const MomentMapSpec& map, int state_dimension) {
  return std::visit(
      overloaded{
          [&](const LinearMap& m) { return static_cast<int>(m.A.rows()); },
          [&](const CustomMap& m) { return m.output_dimension; },
          [&](const auto&) { return state_dimension; },
      },
      map);
}

bool is_declared_injective(const MomentMapSpec& map) {
  return std::visit(
      overloaded{
          [](const IdentityMap&) { return true; },
          [](const LinearMap& m) {
            return m.A.rows() == m.A.cols() &&
                   Eigen::FullPivLU<Matrix>(m.A).isInvertible();
          },
          [](const CustomMap& m) { return m.injective; },
          [](const auto&) { return false; },
      },
      map);
}

Points moment_values(const MomentMapSpec& map, const SamplePool& pool) {
  const int m = moment_dimension(map, static_cast<int>(pool.dimension()));
  Points g(pool.size(), m);
  if (std::holds_alternative<IdentityMap>(map)) return pool.points;
  for (Index i = 0; i < pool.size(); ++i) {
    const Vector v = apply_moment_map(map, pool.points.row(i).transpose());
    if (!v.allFinite())
      throw Error(ErrorKind::kEvaluation,
                  "non-finite moment map at pool point " + std::to_string(i));
    g.row(i) = v.transpose();
  }
  return g;
}

// ------------------------------------------------------------- general game

Vector GeneralGameSpec::G(const Vector& a, const Vector& omega) const {
  return std::visit(
      overloaded{
          [&](const LinearGame& g) -> Vector {
            return g.B * omega - g.C * a + g.c;
          },
          [&](const CubicGame&) -> Vector {
            return (omega.array() - a.array().cube() - a.array()).matrix();
          },
          [&](const CustomGame& g) -> Vector { return g.G(a, omega); },
      },
      map);
}

Matrix GeneralGameSpec::jacobian_action(const Vector& a,
                                        const Vector& omega) const {
  return std::visit(
      overloaded{
          [&](const LinearGame& g) -> Matrix { return -g.C; },
          [&](const CubicGame&) -> Matrix {
            return (-(3.0 * a.array().square() + 1.0)).matrix().asDiagonal();
          },
          [&](const CustomGame& g) -> Matrix {
            if (g.jacobian_action) return g.jacobian_action(a, omega);
            const double h = 1e-6 * (1.0 + a.norm());
            Matrix J(a.size(), a.size());
            Vector p = a;
            for (Index j = 0; j < a.size(); ++j) {
              p[j] = a[j] + h;
              const Vector up = g.G(p, omega);
              p[j] = a[j] - h;
              const Vector down = g.G(p, omega);
              p[j] = a[j];
              J.col(j) = (up - down) / (2.0 * h);
            }
            return J;
          },
      },
      map);
}

Matrix GeneralGameSpec::jacobian_state(const Vector& a,
                                       const Vector& omega) const {
  return std::visit(
      overloaded{
          [&](const LinearGame& g) -> Matrix { return g.B; },
          [&](const CubicGame&) -> Matrix {
            return Matrix::Identity(a.size(), omega.size());
          },
          [&](const CustomGame& g) -> Matrix {
            if (g.jacobian_state) return g.jacobian_state(a, omega);
            const double h = 1e-6 * (1.0 + omega.norm());
            Matrix J(a.size(), omega.size());
            Vector p = omega;
            for (Index j = 0; j < omega.size(); ++j) {
              p[j] = omega[j] + h;
              const Vector up = g.G(a, p);
              p[j] = omega[j] - h;
              const Vector down = g.G(a, p);
              p[j] = omega[j];
              J.col(j) = (up - down) / (2.0 * h);
            }
            return J;
          },
      },
      map);
}

double GeneralGameSpec::W(const Vector& a, const Vector& omega) const {
  return std::visit(
      overloaded{
          [&](const Welfare& w) { return w.value(a); },
          [&](const QuadraticJointWelfare& w) {
            return a.dot(w.H * a) + w.b.dot(a) + a.dot(w.R * omega) +
                   omega.dot(w.S * omega);
          },
          [&](const CustomJointWelfare& w) { return w.value(a, omega); },
      },
      welfare);
}

Vector GeneralGameSpec::gradient_W(const Vector& a, const Vector& omega) const {
  return std::visit(
      overloaded{
          [&](const Welfare& w) -> Vector { return w.gradient(a); },
          [&](const QuadraticJointWelfare& w) -> Vector {
            return (w.H + w.H.transpose()) * a + w.b + w.R * omega;
          },
          [&](const CustomJointWelfare& w) -> Vector {
            if (w.gradient_action) return w.gradient_action(a, omega);
            return fd_gradient(
                [&](const Vector& p) { return w.value(p, omega); }, a);
          },
      },
      welfare);
}

Vector solve_state_equilibrium(const GeneralGameSpec& game, const Vector& omega,
                               const Vector& start, double tol) {
  Vector a = start;
  Vector r = game.G(a, omega);
  double norm = r.norm();
  for (int it = 0; it < 100 && norm > tol; ++it) {
    const Matrix J = game.jacobian_action(a, omega);
    const Vector step = J.fullPivLu().solve(-r);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      const Vector trial = a + t * step;
      const Vector tr = game.G(trial, omega);
      if (tr.allFinite() && tr.norm() < norm) {
        a = trial;
        r = tr;
        norm = tr.norm();
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  // Contraction fallback; the map is a contraction for steps below epsilon.
  for (int it = 0; it < 200 && norm > tol; ++it) {
    a = a + game.epsilon * r;
    r = game.G(a, omega);
    norm = r.norm();
  }
  if (!(norm <= tol * std::max(1.0, 1e3)))
    throw EquilibriumError("state equilibrium did not converge", norm);
  return a;
}

// ------------------------------------------------------------------ problem

int ProblemSpec::action_dimension() const {
  if (is_moment())
    return moment_dimension(moment().map, space.dimension);
  return general().action_dimension;
}

void validate(const ProblemSpec& problem, std::uint64_t probe_seed) {
  validate(problem.prior, problem.space);
  const int m = problem.action_dimension();
  require(m >= 1, "action dimension must be >= 1");
  if (problem.is_moment()) {
    const MomentGame& game = problem.moment();
    if (const auto* lin = std::get_if<LinearMap>(&game.map))
      require(lin->A.cols() == problem.space.dimension,
              "linear moment map must have L columns");
    if (const auto* blk = std::get_if<BlockScalingMap>(&game.map))
      require(blk->split >= 1 && blk->split < problem.space.dimension,
              "block split must leave both blocks nonempty");
    const int wd = game.welfare.dimension();
    require(wd < 0 || wd == m,
            "welfare dimension " + std::to_string(wd) +
                " does not match moment dimension " + std::to_string(m));
    std::visit(
        overloaded{
            [&](const QuadraticWelfare& w) {
              require(w.H.rows() == w.H.cols(), "H must be square");
              require((w.H - w.H.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
                      "H must be symmetric within 1e-12");
              require(w.b.size() == w.H.rows(), "b must match H");
            },
            [&](const CylinderWelfare& w) {
              require(w.split >= 1 && w.split <= m,
                      "cylinder split must lie in [1, M]");
            },
            [&](const EntropySumWelfare& w) {
              require(w.split == w.y1.size(), "y1 must match the block split");
              require((w.y1.array() > 0.0).all() && (w.y2.array() > 0.0).all(),
                      "entropy reference vectors must be strictly positive");
              require(w.q1 > 0.0 && w.q2 > 0.0, "q1, q2 must be positive");
            },
            [&](const auto&) {},
        },
        game.welfare.spec());
    if (std::holds_alternative<CustomWelfare>(game.welfare.spec())) {
      const double gap =
          gradient_consistency(game.welfare, m, 100, probe_seed, 1.0);
      require(gap <= 1e-5, "custom welfare gradient disagrees with central "
                           "differences (relative gap " +
                               std::to_string(gap) + ")");
    }
    return;
  }

  const GeneralGameSpec& game = problem.general();
  require(game.epsilon > 0.0, "declared monotonicity constant must be > 0");
  if (const auto* lin = std::get_if<LinearGame>(&game.map)) {
    require(lin->C.rows() == m && lin->C.cols() == m, "C must be M x M");
    require(lin->B.rows() == m && lin->B.cols() == problem.space.dimension,
            "B must be M x L");
    require(lin->c.size() == m, "c must have length M");
  }
  if (std::holds_alternative<CubicGame>(game.map))
    require(m == problem.space.dimension, "cubic game needs M = L");
  if (const auto* q = std::get_if<QuadraticJointWelfare>(&game.welfare)) {
    require(q->H.rows() == m && q->H.cols() == m, "joint H must be M x M");
    require(q->b.size() == m, "joint b must have length M");
    require(q->R.rows() == m && q->R.cols() == problem.space.dimension,
            "joint R must be M x L");
    require(q->S.rows() == problem.space.dimension &&
                q->S.cols() == problem.space.dimension,
            "joint S must be L x L");
  }

  // Monotonicity probe: -z^T D_aG z > 0 on random (a, omega, z).
  std::mt19937_64 rng(probe_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int L = problem.space.dimension;
  Vector a(m), omega(L), z(m);
  for (int p = 0; p < 1000; ++p) {
    for (int j = 0; j < m; ++j) a[j] = normal(rng);
    for (int j = 0; j < L; ++j) omega[j] = normal(rng);
    for (int j = 0; j < m; ++j) z[j] = normal(rng);
    const Matrix J = game.jacobian_action(a, omega);
    require(-z.dot(J * z) > 0.0,
            "game map is not monotone in the action (probe " +
                std::to_string(p) + ")");
  }
}

double transport_cost(const ProblemSpec& problem, const Vector& a,
                      const Vector& omega, const Vector& x) {
  if (problem.is_moment()) {
    const MomentGame& game = problem.moment();
    const Vector g = apply_moment_map(game.map, omega);
    return game.welfare.value(g) - game.welfare.value(a) + x.dot(a - g);
  }
  const GeneralGameSpec& game = problem.general();
  const Vector star =
      solve_state_equilibrium(game, omega, Vector::Zero(game.action_dimension));
  return game.W(star, omega) - game.W(a, omega) + x.dot(game.G(a, omega));
}

}  // namespace infotransport
