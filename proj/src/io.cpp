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

#include "infotransport/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "infotransport/error.hpp"

namespace infotransport {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kInvalidSpec, "config field '" + path + "': " + what);
}

// Tracks which keys of an object were read so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  const Json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const Json& need(const std::string& key) {
    const Json* v = get(key);
    if (!v) fail(sub(key), "missing required field");
    return *v;
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) fail(sub(item.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long as_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

int as_int(const Json& j, const std::string& path) {
  const long long v = as_integer(j, path);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    fail(path, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t as_seed(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const long long v = as_integer(j, path);
  if (v < 0) fail(path, "seed must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Vector as_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v[static_cast<Index>(i)] = as_double(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix as_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix M(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string row = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      fail(row, "rows must be arrays of equal length");
    for (size_t c = 0; c < cols; ++c)
      M(static_cast<Index>(r), static_cast<Index>(c)) =
          as_double(j[r][c], row + "[" + std::to_string(c) + "]");
  }
  return M;
}

Points as_points(const Json& j, const std::string& path) {
  const Matrix M = as_matrix(j, path);
  return Points(M);
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <typename Derived>
Json matrix_json(const Eigen::MatrixBase<Derived>& M) {
  Json out = Json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

StateSpace parse_space(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string domain = as_string(r.need("domain"), r.sub("domain"));
  StateSpace space;
  if (domain == "euclidean") {
    space = StateSpace::euclidean(as_int(r.need("dimension"), r.sub("dimension")));
  } else if (domain == "box") {
    space = StateSpace::box(as_vector(r.need("lower"), r.sub("lower")),
                            as_vector(r.need("upper"), r.sub("upper")));
  } else if (domain == "ball") {
    space = StateSpace::ball(as_int(r.need("dimension"), r.sub("dimension")),
                             as_double(r.need("radius"), r.sub("radius")));
  } else if (domain == "simplex") {
    space = StateSpace::simplex(as_int(r.need("dimension"), r.sub("dimension")));
  } else {
    fail(r.sub("domain"), "unknown domain '" + domain + "'");
  }
  r.finish();
  try {
    space.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return space;
}

PriorSpec parse_prior(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string kind = as_string(r.need("kind"), r.sub("kind"));
  PriorSpec prior;
  if (kind == "gaussian") {
    prior = GaussianPrior{as_vector(r.need("mean"), r.sub("mean")),
                          as_matrix(r.need("covariance"), r.sub("covariance"))};
  } else if (kind == "elliptical") {
    prior = EllipticalPrior{
        as_matrix(r.need("sigma"), r.sub("sigma")),
        curve_from_json(r.need("radial_density"), r.sub("radial_density"))};
  } else if (kind == "dirichlet") {
    prior = DirichletPrior{as_vector(r.need("alpha"), r.sub("alpha"))};
  } else if (kind == "uniform") {
    prior = UniformPrior{as_vector(r.need("lower"), r.sub("lower")),
                         as_vector(r.need("upper"), r.sub("upper"))};
  } else if (kind == "discrete") {
    prior = DiscretePrior{as_points(r.need("points"), r.sub("points")),
                          as_vector(r.need("weights"), r.sub("weights"))};
  } else {
    fail(r.sub("kind"), "unknown prior kind '" + kind + "'");
  }
  r.finish();
  return prior;
}

Welfare parse_welfare_kind(const std::string& kind, ObjectReader& r) {
  if (kind == "quadratic") {
    const Matrix H = as_matrix(r.need("H"), r.sub("H"));
    const Json* b = r.get("b");
    return Welfare(QuadraticWelfare{
        H, b ? as_vector(*b, r.sub("b")) : Vector(Vector::Zero(H.rows()))});
  }
  if (kind == "radial")
    return Welfare(RadialWelfare{curve_from_json(r.need("phi"), r.sub("phi"))});
  if (kind == "cylinder")
    return Welfare(CylinderWelfare{as_int(r.need("split"), r.sub("split")),
                                   curve_from_json(r.need("phi1"), r.sub("phi1")),
                                   curve_from_json(r.need("phi2"), r.sub("phi2"))});
  if (kind == "entropy_sum") {
    EntropySumWelfare w;
    w.split = as_int(r.need("split"), r.sub("split"));
    if (const Json* v = r.get("q1")) w.q1 = as_double(*v, r.sub("q1"));
    if (const Json* v = r.get("q2")) w.q2 = as_double(*v, r.sub("q2"));
    w.y1 = as_vector(r.need("y1"), r.sub("y1"));
    w.y2 = as_vector(r.need("y2"), r.sub("y2"));
    w.phi1 = curve_from_json(r.need("phi1"), r.sub("phi1"));
    w.phi2 = curve_from_json(r.need("phi2"), r.sub("phi2"));
    return Welfare(w);
  }
  fail(r.sub("kind"), "unknown welfare kind '" + kind + "'");
}

Welfare parse_welfare(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string kind = as_string(r.need("kind"), r.sub("kind"));
  Welfare w = parse_welfare_kind(kind, r);
  r.finish();
  return w;
}

MomentMapSpec parse_map(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string kind = as_string(r.need("kind"), r.sub("kind"));
  MomentMapSpec map;
  if (kind == "identity") {
    map = IdentityMap{};
  } else if (kind == "linear") {
    map = LinearMap{as_matrix(r.need("A"), r.sub("A"))};
  } else if (kind == "radial_scaling") {
    map = RadialScalingMap{curve_from_json(r.need("psi"), r.sub("psi"))};
  } else if (kind == "block_scaling") {
    BlockScalingMap m;
    m.split = as_int(r.need("split"), r.sub("split"));
    const std::string stat =
        r.get("statistic") ? as_string(*r.get("statistic"), r.sub("statistic")) : "sum";
    if (stat == "sum") {
      m.statistic = BlockScalingMap::Statistic::kSum;
    } else if (stat == "squared_norm") {
      m.statistic = BlockScalingMap::Statistic::kSquaredNorm;
    } else {
      fail(r.sub("statistic"), "expected 'sum' or 'squared_norm'");
    }
    m.psi1 = curve_from_json(r.need("psi1"), r.sub("psi1"));
    m.psi2 = curve_from_json(r.need("psi2"), r.sub("psi2"));
    map = m;
  } else {
    fail(r.sub("kind"), "unknown moment map kind '" + kind + "'");
  }
  r.finish();
  return map;
}

GeneralGameSpec parse_game(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  GeneralGameSpec game;
  game.action_dimension =
      as_int(r.need("action_dimension"), r.sub("action_dimension"));
  if (const Json* e = r.get("epsilon")) game.epsilon = as_double(*e, r.sub("epsilon"));
  {
    const std::string mpath = r.sub("map");
    ObjectReader m(r.need("map"), mpath);
    const std::string kind = as_string(m.need("kind"), m.sub("kind"));
    if (kind == "linear") {
      game.map = LinearGame{as_matrix(m.need("B"), m.sub("B")),
                            as_matrix(m.need("C"), m.sub("C")),
                            as_vector(m.need("c"), m.sub("c"))};
    } else if (kind == "cubic") {
      game.map = CubicGame{};
    } else {
      fail(m.sub("kind"), "unknown game map kind '" + kind + "'");
    }
    m.finish();
  }
  {
    const std::string wpath = r.sub("welfare");
    ObjectReader w(r.need("welfare"), wpath);
    const std::string kind = as_string(w.need("kind"), w.sub("kind"));
    if (kind == "quadratic_joint") {
      game.welfare = QuadraticJointWelfare{as_matrix(w.need("H"), w.sub("H")),
                                           as_vector(w.need("b"), w.sub("b")),
                                           as_matrix(w.need("R"), w.sub("R")),
                                           as_matrix(w.need("S"), w.sub("S"))};
    } else {
      game.welfare = parse_welfare_kind(kind, w);
    }
    w.finish();
  }
  r.finish();
  return game;
}

OracleConfig parse_oracle(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  OracleConfig o;
  o.present = true;
  o.name = as_string(r.need("name"), r.sub("name"));
  auto curve = [&](const char* key, Curve* out) {
    if (const Json* v = r.get(key)) *out = curve_from_json(*v, r.sub(key));
  };
  if (o.name == "quadratic_elliptical") {
    o.H = as_matrix(r.need("H"), r.sub("H"));
    o.sigma = r.get("sigma") ? as_matrix(*r.get("sigma"), r.sub("sigma"))
                             : Matrix(Matrix::Identity(o.H.rows(), o.H.rows()));
  } else if (o.name == "spherical") {
    curve("psi", &o.psi);
    curve("mu", &o.mu);
    o.phi = curve_from_json(r.need("phi"), r.sub("phi"));
    o.L = as_int(r.need("L"), r.sub("L"));
  } else if (o.name == "cylinder") {
    curve("psi", &o.psi);
    curve("mu1", &o.mu);
    o.phi = curve_from_json(r.need("phi1"), r.sub("phi1"));
    o.phi2 = curve_from_json(r.need("phi2"), r.sub("phi2"));
    o.L = as_int(r.need("L1"), r.sub("L1"));
    o.L2 = as_int(r.need("L2"), r.sub("L2"));
  } else if (o.name == "dirichlet") {
    DirichletParams& d = o.dirichlet;
    d.alpha = as_vector(r.need("alpha"), r.sub("alpha"));
    d.split = as_int(r.need("split"), r.sub("split"));
    curve("psi1", &d.psi1);
    curve("psi2", &d.psi2);
    curve("phi1", &d.phi1);
    curve("phi2", &d.phi2);
    if (const Json* v = r.get("q1")) d.q1 = as_double(*v, r.sub("q1"));
    if (const Json* v = r.get("q2")) d.q2 = as_double(*v, r.sub("q2"));
    if (const Json* v = r.get("y1")) d.y1 = as_vector(*v, r.sub("y1"));
    if (const Json* v = r.get("y2")) d.y2 = as_vector(*v, r.sub("y2"));
    if (const Json* v = r.get("samples")) d.samples = as_int(*v, r.sub("samples"));
    if (const Json* v = r.get("seed")) d.seed = as_seed(*v, r.sub("seed"));
  } else {
    fail(r.sub("name"), "unknown oracle '" + o.name + "'");
  }
  r.finish();
  return o;
}

}  // namespace

Curve curve_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string kind = as_string(r.need("kind"), r.sub("kind"));
  Curve c;
  if (kind == "polynomial") {
    const Vector v = as_vector(r.need("coefficients"), r.sub("coefficients"));
    c = Curve::polynomial(std::vector<double>(v.data(), v.data() + v.size()));
  } else if (kind == "power") {
    c = Curve::power(as_double(r.need("coefficient"), r.sub("coefficient")),
                     as_double(r.need("exponent"), r.sub("exponent")));
  } else if (kind == "exponential") {
    c = Curve::exponential(as_double(r.need("coefficient"), r.sub("coefficient")),
                           as_double(r.need("rate"), r.sub("rate")));
  } else {
    fail(r.sub("kind"), "unknown curve kind '" + kind + "'");
  }
  r.finish();
  return c;
}

Json to_json(const Curve& curve) {
  switch (curve.kind()) {
    case Curve::Kind::kPolynomial:
      return {{"kind", "polynomial"}, {"coefficients", curve.coefficients()}};
    case Curve::Kind::kPower:
      return {{"kind", "power"},
              {"coefficient", curve.coefficient()},
              {"exponent", curve.parameter()}};
    case Curve::Kind::kExponential:
      return {{"kind", "exponential"},
              {"coefficient", curve.coefficient()},
              {"rate", curve.parameter()}};
  }
  return {};
}

RunConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto end = std::min<size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(end), '\n');
    throw Error(ErrorKind::kInvalidSpec,
                "config line " + std::to_string(line) + ": malformed JSON (" +
                    e.what() + ")");
  }
  RunConfig cfg;
  ObjectReader r(root, "config");
  const int version = as_int(r.need("schema_version"), r.sub("schema_version"));
  if (version != kSchemaVersion)
    fail(r.sub("schema_version"),
         "unsupported version " + std::to_string(version) + " (expected 1)");

  if (const Json* o = r.get("oracle")) cfg.oracle = parse_oracle(*o, r.sub("oracle"));

  {
    const std::string ppath = r.sub("problem");
    ObjectReader p(r.need("problem"), ppath);
    cfg.problem.space = parse_space(p.need("space"), p.sub("space"));
    cfg.problem.prior = parse_prior(p.need("prior"), p.sub("prior"));
    const Json* welfare = p.get("welfare");
    const Json* map = p.get("moment_map");
    const Json* game = p.get("game");
    if (game && (welfare || map))
      fail(ppath, "give either welfare/moment_map or game, not both");
    if (map && !welfare) fail(p.sub("moment_map"), "needs a welfare");
    if (game) {
      cfg.problem.game = parse_game(*game, p.sub("game"));
      cfg.has_game = true;
    } else if (welfare) {
      MomentGame mg;
      mg.welfare = parse_welfare(*welfare, p.sub("welfare"));
      mg.map = map ? parse_map(*map, p.sub("moment_map")) : MomentMapSpec{IdentityMap{}};
      cfg.problem.game = std::move(mg);
      cfg.has_game = true;
    }
    p.finish();
    try {
      if (cfg.has_game) {
        validate(cfg.problem, 0);
      } else {
        validate(cfg.problem.prior, cfg.problem.space);
      }
    } catch (const Error& e) {
      fail(ppath, e.what());
    }
  }

  if (const Json* s = r.get("sampling")) {
    ObjectReader q(*s, r.sub("sampling"));
    if (const Json* v = q.get("n")) {
      const long long n = as_integer(*v, q.sub("n"));
      if (n < 1) fail(q.sub("n"), "must be >= 1");
      cfg.sampling.n = static_cast<Index>(n);
    }
    if (const Json* v = q.get("seed")) cfg.sampling.seed = as_seed(*v, q.sub("seed"));
    q.finish();
  }

  if (const Json* s = r.get("solver")) {
    ObjectReader q(*s, r.sub("solver"));
    SolverConfig& c = cfg.solver;
    if (const Json* v = q.get("K")) {
      cfg.K.clear();
      if (v->is_array()) {
        for (size_t i = 0; i < v->size(); ++i)
          cfg.K.push_back(as_int((*v)[i], q.sub("K") + "[" + std::to_string(i) + "]"));
      } else {
        cfg.K.push_back(as_int(*v, q.sub("K")));
      }
      if (cfg.K.empty()) fail(q.sub("K"), "needs at least one value");
      for (int k : cfg.K)
        if (k < 1) fail(q.sub("K"), "values must be >= 1");
    }
    if (const Json* v = q.get("max_iterations"))
      c.max_iterations = as_int(*v, q.sub("max_iterations"));
    if (const Json* v = q.get("tol_assignment"))
      c.tol_assignment = as_double(*v, q.sub("tol_assignment"));
    if (const Json* v = q.get("tol_eq")) c.tol_eq = as_double(*v, q.sub("tol_eq"));
    if (const Json* v = q.get("restarts")) c.restarts = as_int(*v, q.sub("restarts"));
    if (const Json* v = q.get("empty_cell_policy")) {
      const std::string policy = as_string(*v, q.sub("empty_cell_policy"));
      if (policy == "drop") {
        c.empty_cell_policy = SolverConfig::EmptyCellPolicy::kDrop;
      } else if (policy == "reseed_farthest") {
        c.empty_cell_policy = SolverConfig::EmptyCellPolicy::kReseedFarthest;
      } else {
        fail(q.sub("empty_cell_policy"), "expected 'drop' or 'reseed_farthest'");
      }
    }
    if (const Json* v = q.get("damping")) c.damping = as_double(*v, q.sub("damping"));
    if (const Json* v = q.get("local_moves"))
      c.local_moves = as_bool(*v, q.sub("local_moves"));
    if (const Json* v = q.get("seed")) c.seed = as_seed(*v, q.sub("seed"));
    q.finish();
    try {
      c.validate();
    } catch (const Error& e) {
      fail(r.sub("solver"), e.what());
    }
  }

  if (const Json* s = r.get("verify")) {
    ObjectReader q(*s, r.sub("verify"));
    VerifyConfig& v = cfg.verify;
    if (const Json* pol = q.get("policy")) {
      ObjectReader pr(*pol, q.sub("policy"));
      if (const Json* x = pr.get("source")) {
        cfg.verify_policy.source = as_string(*x, pr.sub("source"));
        if (cfg.verify_policy.source != "solution" &&
            cfg.verify_policy.source != "closed_form")
          fail(pr.sub("source"), "expected 'solution' or 'closed_form'");
      }
      if (const Json* x = pr.get("path")) cfg.verify_policy.path = as_string(*x, pr.sub("path"));
      if (const Json* x = pr.get("perturbation")) {
        cfg.verify_policy.perturbation = as_string(*x, pr.sub("perturbation"));
        const auto& p = cfg.verify_policy.perturbation;
        if (p != "none" && p != "scale" && p != "displace" && p != "swap")
          fail(pr.sub("perturbation"), "expected none, scale, displace or swap");
      }
      pr.finish();
    }
    auto count = [&](const char* key, Index* out) {
      if (const Json* x = q.get(key)) {
        const long long n = as_integer(*x, q.sub(key));
        if (n < 0) fail(q.sub(key), "must be nonnegative");
        *out = static_cast<Index>(n);
      }
    };
    auto real = [&](const char* key, double* out) {
      if (const Json* x = q.get(key)) *out = as_double(*x, q.sub(key));
    };
    count("n_probe", &v.n_probe);
    count("n_pairs", &v.n_pairs);
    count("n_tuples", &v.n_tuples);
    count("min_dimension_points", &v.min_dimension_points);
    if (const Json* x = q.get("n_t")) v.n_t = as_int(*x, q.sub("n_t"));
    if (const Json* x = q.get("tuple_size")) {
      v.tuple_size = as_int(*x, q.sub("tuple_size"));
      if (v.tuple_size < 2 || v.tuple_size > 4) fail(q.sub("tuple_size"), "must lie in [2, 4]");
    }
    real("tol_max", &v.tol_max);
    real("tol_cost", &v.tol_cost);
    real("tol_mismatch_fraction", &v.tol_mismatch_fraction);
    real("tol_cyclical", &v.tol_cyclical);
    real("mean_sigmas", &v.mean_sigmas);
    real("dim_slack", &v.dim_slack);
    if (const Json* x = q.get("seed")) v.seed = as_seed(*x, q.sub("seed"));
    q.finish();
  }

  if (const Json* s = r.get("linearize")) {
    ObjectReader q(*s, r.sub("linearize"));
    if (const Json* v = q.get("start")) cfg.linearize.start = as_vector(*v, q.sub("start"));
    if (const Json* v = q.get("step")) {
      cfg.linearize.step = as_double(*v, q.sub("step"));
      if (!(cfg.linearize.step > 0.0)) fail(q.sub("step"), "must be positive");
    }
    q.finish();
  }

  if (const Json* s = r.get("compare")) {
    ObjectReader q(*s, r.sub("compare"));
    if (const Json* v = q.get("tolerance"))
      cfg.compare.tolerance = as_double(*v, q.sub("tolerance"));
    if (const Json* v = q.get("relative_tolerance"))
      cfg.compare.relative_tolerance = as_double(*v, q.sub("relative_tolerance"));
    q.finish();
  }

  if (const Json* s = r.get("output")) {
    ObjectReader q(*s, r.sub("output"));
    if (const Json* v = q.get("directory"))
      cfg.output.directory = as_string(*v, q.sub("directory"));
    if (const Json* v = q.get("formats")) {
      if (!v->is_array()) fail(q.sub("formats"), "expected an array");
      cfg.output.json = cfg.output.csv = false;
      for (size_t i = 0; i < v->size(); ++i) {
        const std::string f =
            as_string((*v)[i], q.sub("formats") + "[" + std::to_string(i) + "]");
        if (f == "json") {
          cfg.output.json = true;
        } else if (f == "csv") {
          cfg.output.csv = true;
        } else {
          fail(q.sub("formats"), "unknown format '" + f + "'");
        }
      }
    }
    q.finish();
  }
  r.finish();
  return cfg;
}

ClosedFormPolicy build_oracle(const OracleConfig& o) {
  if (!o.present) throw Error(ErrorKind::kInvalidSpec, "config has no oracle section");
  if (o.name == "quadratic_elliptical") return quadratic_elliptical(o.H, o.sigma);
  if (o.name == "spherical") return spherical(o.psi, o.mu, o.phi, o.L);
  if (o.name == "cylinder") return cylinder(o.psi, o.mu, o.phi, o.phi2, o.L, o.L2);
  if (o.name == "dirichlet") return dirichlet_policy(o.dirichlet);
  throw Error(ErrorKind::kInvalidSpec, "unknown oracle '" + o.name + "'");
}

Json to_json(const OracleConfig& o) {
  Json j = {{"name", o.name}};
  if (o.name == "quadratic_elliptical") {
    j["H"] = matrix_json(o.H);
    j["sigma"] = matrix_json(o.sigma);
  } else if (o.name == "spherical") {
    j["psi"] = to_json(o.psi);
    j["mu"] = to_json(o.mu);
    j["phi"] = to_json(o.phi);
    j["L"] = o.L;
  } else if (o.name == "cylinder") {
    j["psi"] = to_json(o.psi);
    j["mu1"] = to_json(o.mu);
    j["phi1"] = to_json(o.phi);
    j["phi2"] = to_json(o.phi2);
    j["L1"] = o.L;
    j["L2"] = o.L2;
  } else if (o.name == "dirichlet") {
    const DirichletParams& d = o.dirichlet;
    j["alpha"] = vector_json(d.alpha);
    j["split"] = d.split;
    j["psi1"] = to_json(d.psi1);
    j["psi2"] = to_json(d.psi2);
    j["phi1"] = to_json(d.phi1);
    j["phi2"] = to_json(d.phi2);
    j["q1"] = d.q1;
    j["q2"] = d.q2;
    if (d.y1.size()) j["y1"] = vector_json(d.y1);
    if (d.y2.size()) j["y2"] = vector_json(d.y2);
    j["samples"] = d.samples;
    j["seed"] = d.seed;
  }
  return j;
}

ProblemSpec resolve_problem(const RunConfig& config) {
  if (config.has_game) return config.problem;
  if (!config.oracle.present)
    throw Error(ErrorKind::kInvalidSpec,
                "config field 'config.problem': needs a welfare, a game or an "
                "oracle section");
  return build_oracle(config.oracle)
      .problem(config.problem.space, config.problem.prior);
}

Json to_json(const PartitionSolution& s) {
  return {{"labels", s.labels},
          {"actions", matrix_json(s.actions)},
          {"multipliers", matrix_json(s.multipliers)},
          {"welfare", s.welfare},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"trace", s.trace},
          {"requested_cells", s.requested_cells},
          {"best_restart", s.best_restart},
          {"restart_welfare", s.restart_welfare},
          {"assign_changes", s.assign_changes}};
}

PartitionSolution solution_from_json(const Json& j) {
  ObjectReader r(j, "solution");
  PartitionSolution s;
  const Json& labels = r.need("labels");
  if (!labels.is_array()) fail(r.sub("labels"), "expected an array");
  for (size_t i = 0; i < labels.size(); ++i)
    s.labels.push_back(as_int(labels[i], r.sub("labels")));
  s.actions = as_matrix(r.need("actions"), r.sub("actions"));
  s.multipliers = as_matrix(r.need("multipliers"), r.sub("multipliers"));
  s.welfare = as_double(r.need("welfare"), r.sub("welfare"));
  s.iterations = as_int(r.need("iterations"), r.sub("iterations"));
  s.converged = as_bool(r.need("converged"), r.sub("converged"));
  const Vector trace = as_vector(r.need("trace"), r.sub("trace"));
  s.trace.assign(trace.data(), trace.data() + trace.size());
  s.requested_cells = as_int(r.need("requested_cells"), r.sub("requested_cells"));
  s.best_restart = as_int(r.need("best_restart"), r.sub("best_restart"));
  const Vector rw = as_vector(r.need("restart_welfare"), r.sub("restart_welfare"));
  s.restart_welfare.assign(rw.data(), rw.data() + rw.size());
  s.assign_changes = static_cast<Index>(
      as_integer(r.need("assign_changes"), r.sub("assign_changes")));
  r.finish();
  for (int label : s.labels)
    if (label < 0 || label >= s.actions.rows())
      fail(r.sub("labels"), "label out of range");
  return s;
}

Json to_json(const CheckResult& c) {
  Json j = {{"name", c.name},       {"passed", c.passed},
            {"value", c.value},     {"tolerance", c.tolerance},
            {"count", c.count},     {"tested", c.tested},
            {"informational", c.informational}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const DiagnosticsReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks) checks.push_back(to_json(c));
  return {{"policy", rep.policy_name},
          {"passed", rep.passed()},
          {"failed_checks", rep.failed_checks()},
          {"max_phi", rep.max_phi},
          {"monotone_violations", rep.monotone_violations},
          {"monotone_worst", rep.monotone_worst},
          {"convexity_violations", rep.convexity_violations},
          {"pointwise_cost_max", rep.pointwise_cost_max},
          {"argmin_mismatch_fraction", rep.argmin_mismatch_fraction},
          {"cyclical_violations", rep.cyclical_violations},
          {"mean_residual_max", rep.mean_residual_max},
          {"dim_estimate", rep.dim_estimate},
          {"dim_bound", rep.dim_bound},
          {"checks", checks}};
}

Json to_json(const ClosedFormPolicy& cf) {
  Json conditions = Json::array();
  for (const auto& c : cf.conditions)
    conditions.push_back({{"max_value", c.max_value},
                          {"argmax", c.argmax},
                          {"upper", c.upper},
                          {"tolerance", c.tolerance},
                          {"holds", c.holds}});
  Json j = {{"name", to_string(cf.name)},
            {"optimal", cf.optimal},
            {"unique", cf.unique},
            {"conditions", conditions}};
  if (!cf.note.empty()) j["note"] = cf.note;
  switch (cf.name) {
    case ClosedFormPolicy::Name::kQuadraticElliptical:
      j["H"] = matrix_json(cf.H);
      j["sigma"] = matrix_json(cf.sigma);
      j["basis"] = matrix_json(cf.basis);
      j["projection"] = matrix_json(cf.projection);
      j["schur_max"] = cf.schur_max;
      break;
    case ClosedFormPolicy::Name::kSpherical:
    case ClosedFormPolicy::Name::kCylinder:
      j["alpha"] = cf.alpha;
      j["split"] = cf.split;
      break;
    case ClosedFormPolicy::Name::kDirichlet:
      j["split"] = cf.split;
      j["gamma"] = vector_json(cf.gamma);
      j["gamma_se"] = vector_json(cf.gamma_se);
      j["gamma_quadrature"] = vector_json(cf.gamma_quadrature);
      break;
  }
  return j;
}

Json to_json(const LinearizedModel& m) {
  return {{"a0", vector_json(m.a0)},
          {"calG", matrix_json(m.calG)},
          {"D0", matrix_json(m.D0)},
          {"eigenvalues", vector_json(m.eigenvalues)},
          {"degenerate", m.degenerate},
          {"negative_semidefinite", m.negative_semidefinite()}};
}

Json to_json(const ExhaustiveResult& r) {
  return {{"welfare", r.welfare},
          {"labels", r.labels},
          {"actions", matrix_json(r.actions)},
          {"partitions", r.partitions}};
}

Json to_json(const KantorovichReport& r) {
  return {{"feasible", r.feasible},   {"status", r.status},
          {"lp_cost", r.lp_cost},     {"monge_cost", r.monge_cost},
          {"gap", r.gap},             {"iterations", r.iterations},
          {"coupling", matrix_json(r.coupling)}};
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_cells_csv(std::ostream& out, const SamplePool& pool, const Points& g,
                     const PartitionSolution& s) {
  out << "index";
  for (Index c = 0; c < pool.dimension(); ++c) out << ",omega_" << c;
  for (Index c = 0; c < g.cols(); ++c) out << ",g_" << c;
  out << ",label";
  for (Index c = 0; c < s.actions.cols(); ++c) out << ",action_" << c;
  out << '\n';
  for (Index i = 0; i < pool.size(); ++i) {
    const int k = s.labels[static_cast<size_t>(i)];
    out << i;
    for (Index c = 0; c < pool.dimension(); ++c) out << ',' << format_double(pool.points(i, c));
    for (Index c = 0; c < g.cols(); ++c) out << ',' << format_double(g(i, c));
    out << ',' << k;
    for (Index c = 0; c < s.actions.cols(); ++c) out << ',' << format_double(s.actions(k, c));
    out << '\n';
  }
}

}  // namespace infotransport
