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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "infotransport/error.hpp"
#include "infotransport/io.hpp"

namespace fs = std::filesystem;
using namespace infotransport;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheckFailed = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  // verify
  std::string source;
  std::string solution_path;
  std::string perturbation;
  // compare
  bool suite = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInvalidSpec, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int default_threads() {
  if (const char* env = std::getenv("INFOTRANSPORT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

RunConfig load(const Options& opt) {
  RunConfig cfg = parse_config(read_file(opt.config_path));
  if (!opt.out_dir.empty()) cfg.output.directory = opt.out_dir;
  cfg.solver.threads = opt.threads > 0 ? opt.threads : default_threads();
  return cfg;
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {}

  void json(const std::string& name, const Json& j) {
    write(name, j.dump(2) + "\n");
  }

  void write(const std::string& name, const std::string& text) {
    fs::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error(ErrorKind::kInvalidSpec, "cannot write '" + (dir_ / name).string() + "'");
    out << text;
  }

 private:
  fs::path dir_;
};

SamplePool make_sample(const RunConfig& cfg, const ProblemSpec& problem) {
  return sample(problem.prior, problem.space, cfg.sampling.n, cfg.sampling.seed);
}

Points g_values(const ProblemSpec& problem, const SamplePool& pool) {
  if (problem.is_moment()) return moment_values(problem.moment().map, pool);
  return pool.points;
}

std::string suffix(const RunConfig& cfg, int K) {
  return cfg.K.size() == 1 ? "" : "_K" + std::to_string(K);
}

int cmd_solve(const Options& opt) {
  const RunConfig cfg = load(opt);
  const ProblemSpec problem = resolve_problem(cfg);
  const SamplePool pool = make_sample(cfg, problem);
  const Points g = g_values(problem, pool);
  Output out(cfg.output.directory);
  bool all_converged = true;
  for (int K : cfg.K) {
    const PartitionSolution s = solve(problem, pool, K, cfg.solver);
    all_converged = all_converged && s.converged;
    if (cfg.output.json) {
      Json doc = {{"schema_version", kSchemaVersion},
                  {"K", K},
                  {"n", pool.size()},
                  {"seed", cfg.sampling.seed},
                  {"solution", to_json(s)}};
      out.json("solution" + suffix(cfg, K) + ".json", doc);
    }
    if (cfg.output.csv) {
      std::ostringstream csv;
      write_cells_csv(csv, pool, g, s);
      out.write("cells" + suffix(cfg, K) + ".csv", csv.str());
    }
    std::cout << "K=" << K << " cells=" << s.cell_count()
              << " welfare=" << format_double(s.welfare)
              << " iterations=" << s.iterations
              << " converged=" << (s.converged ? "yes" : "no")
              << " unstable_labels=" << s.assign_changes << '\n';
  }
  return all_converged ? kExitOk : kExitNumerical;
}

PolicyOnPool perturb(const PolicyOnPool& p, const SamplePool& pool,
                     const std::string& kind, std::uint64_t seed) {
  if (kind == "scale") return scale_support(p);
  if (kind == "displace") return displace_neighborhood(p, pool, 0.02, 0.5, seed);
  if (kind == "swap") return swap_neighborhoods(p, pool, 0.02, seed);
  return p;
}

int cmd_verify(const Options& opt) {
  RunConfig cfg = load(opt);
  if (!opt.source.empty()) cfg.verify_policy.source = opt.source;
  if (!opt.solution_path.empty()) cfg.verify_policy.path = opt.solution_path;
  if (!opt.perturbation.empty()) cfg.verify_policy.perturbation = opt.perturbation;
  const ProblemSpec problem = resolve_problem(cfg);
  const SamplePool pool = make_sample(cfg, problem);

  PolicyOnPool policy;
  if (cfg.verify_policy.source == "closed_form") {
    policy = evaluate_on(build_oracle(cfg.oracle).policy(), pool);
  } else {
    if (!fs::exists(cfg.verify_policy.path))
      throw Error(ErrorKind::kInvalidSpec,
                  "solution file '" + cfg.verify_policy.path + "' not found");
    Json doc;
    try {
      doc = Json::parse(read_file(cfg.verify_policy.path));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::kInvalidSpec, "solution file is not valid JSON: " +
                                               std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("solution"))
      throw Error(ErrorKind::kInvalidSpec, "solution file has no 'solution' field");
    const PartitionSolution s = solution_from_json(doc["solution"]);
    if (static_cast<Index>(s.labels.size()) != pool.size())
      throw Error(ErrorKind::kInvalidSpec,
                  "solution has " + std::to_string(s.labels.size()) +
                      " labels but the configured pool has " +
                      std::to_string(pool.size()) + " points");
    if (s.actions.cols() != problem.action_dimension())
      throw Error(ErrorKind::kInvalidSpec, "solution action dimension mismatch");
    policy = partition_policy(problem, s);
  }
  policy = perturb(policy, pool, cfg.verify_policy.perturbation, cfg.verify.seed);

  const DiagnosticsReport report = diagnose(policy, problem, pool, cfg.verify);
  Json doc = to_json(report);
  doc["schema_version"] = kSchemaVersion;
  doc["perturbation"] = cfg.verify_policy.perturbation;
  Output(cfg.output.directory).json("diagnostics.json", doc);
  for (const auto& c : report.checks) {
    const char* status = c.informational ? "info" : (c.passed ? "pass" : "FAIL");
    std::cout << status << ' ' << c.name << " value=" << format_double(c.value)
              << " violations=" << c.count << '/' << c.tested << '\n';
  }
  return report.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_oracle(const Options& opt) {
  const RunConfig cfg = load(opt);
  const ClosedFormPolicy cf = build_oracle(cfg.oracle);
  const SamplePool pool =
      sample(cfg.problem.prior, cfg.problem.space, cfg.sampling.n, cfg.sampling.seed);
  const PolicyOnPool on_pool = evaluate_on(cf.policy(), pool);
  const double w = pool_welfare(cf.welfare, on_pool.values, pool.weights);
  Json doc = {{"schema_version", kSchemaVersion},
              {"config", to_json(cfg.oracle)},
              {"oracle", to_json(cf)},
              {"pool_welfare", w},
              {"n", pool.size()},
              {"seed", cfg.sampling.seed}};
  Output(cfg.output.directory).json("oracle.json", doc);
  std::cout << to_string(cf.name) << " optimal=" << (cf.optimal ? "yes" : "no")
            << " unique=" << (cf.unique ? "yes" : "no")
            << " pool_welfare=" << format_double(w) << '\n';
  for (Index i = 0; i < cf.gamma.size(); ++i)
    std::cout << "gamma_" << i << '=' << format_double(cf.gamma[i]) << '\n';
  return kExitOk;
}

int cmd_linearize(const Options& opt) {
  const RunConfig cfg = load(opt);
  if (!cfg.has_game || cfg.problem.is_moment())
    throw Error(ErrorKind::kInvalidSpec,
                "config field 'config.problem.game': linearize needs a general game");
  const GeneralGameSpec& game = cfg.problem.general();
  const int L = prior_dimension(cfg.problem.prior);
  Vector start = cfg.linearize.start;
  if (start.size() == 0) start = Vector::Zero(game.action_dimension);
  if (start.size() != game.action_dimension)
    throw Error(ErrorKind::kInvalidSpec,
                "config field 'config.linearize.start': expected " +
                    std::to_string(game.action_dimension) + " entries");
  const LinearizedModel model = build(game, L, start, cfg.linearize.step);
  const SamplePool pool = make_sample(cfg, cfg.problem);

  Json doc = to_json(model);
  doc["schema_version"] = kSchemaVersion;
  doc["limit"] = Json::array();
  bool converged = true;
  if (model.negative_semidefinite())
    std::cout << "D0 is negative semidefinite: no information is optimal\n";
  for (int K : cfg.K) {
    const PartitionSolution s = limit_partition(model, pool, K, cfg.solver);
    const HalfspaceAudit audit = halfspace_audit(model, pool, s);
    converged = converged && s.converged;
    doc["limit"].push_back({{"K", K},
                            {"solution", to_json(s)},
                            {"audit",
                             {{"tested", audit.tested},
                              {"violations", audit.violations},
                              {"worst", audit.worst},
                              {"passed", audit.passed}}}});
    std::cout << "K=" << K << " cells=" << s.cell_count()
              << " welfare=" << format_double(s.welfare)
              << " halfspace_violations=" << audit.violations << '\n';
  }
  Output(cfg.output.directory).json("linearized.json", doc);
  return converged ? kExitOk : kExitNumerical;
}

struct CompareRow {
  std::string name;
  Index n = 0;
  int K = 0;
  double solver = 0.0;
  double reference = 0.0;
  std::string reference_kind;
  double gap = 0.0;
  double lp_gap = 0.0;
  bool passed = true;
};

Json row_json(const CompareRow& r) {
  return {{"name", r.name},     {"n", r.n},
          {"K", r.K},           {"solver", r.solver},
          {"reference", r.reference},
          {"reference_kind", r.reference_kind},
          {"gap", r.gap},       {"lp_gap", r.lp_gap},
          {"passed", r.passed}};
}

CompareRow compare_discrete(const DiscreteInstance& inst, int K,
                            const SolverConfig& solver, double tol) {
  CompareRow row{inst.name, inst.size(), K};
  const ExhaustiveResult best = exhaustive_optimum(inst, K);
  const PartitionSolution s = solve(inst.problem(), inst.pool(), K, solver);
  const KantorovichReport lp = kantorovich_compare(inst, s.labels);
  row.solver = s.welfare;
  row.reference = best.welfare;
  row.reference_kind = "exhaustive";
  row.gap = std::abs(best.welfare - s.welfare);
  row.lp_gap = lp.gap;
  row.passed = row.gap <= tol && lp.feasible && std::abs(lp.gap) <= 1e-7;
  return row;
}

int cmd_compare(const Options& opt) {
  std::vector<CompareRow> rows;
  std::string dir = opt.out_dir.empty() ? "." : opt.out_dir;
  if (opt.suite) {
    SolverConfig solver;
    solver.threads = opt.threads > 0 ? opt.threads : default_threads();
    double tol = 1e-9;
    if (!opt.config_path.empty()) {
      const RunConfig cfg = load(opt);
      solver = cfg.solver;
      tol = cfg.compare.tolerance;
      dir = cfg.output.directory;
    }
    for (const auto& inst : discrete_suite())
      rows.push_back(compare_discrete(inst, inst.K_max, solver, tol));
  } else {
    if (opt.config_path.empty())
      throw Error(ErrorKind::kInvalidSpec, "compare needs a config file or --suite");
    const RunConfig cfg = load(opt);
    dir = cfg.output.directory;
    const ProblemSpec problem = resolve_problem(cfg);
    const auto* discrete = std::get_if<DiscretePrior>(&problem.prior);
    const bool enumerable = discrete && problem.is_moment() &&
                            discrete->points.rows() <= kMaxDiscretePoints;
    if (!enumerable && !cfg.oracle.present)
      throw Error(ErrorKind::kInvalidSpec,
                  "compare needs a discrete prior with at most 12 points or an "
                  "oracle section");
    if (enumerable) {
      const DiscreteInstance inst =
          make_instance("config", discrete->points, discrete->weights,
                        problem.moment().welfare, problem.moment().map, 1);
      for (int K : cfg.K)
        rows.push_back(compare_discrete(inst, K, cfg.solver, cfg.compare.tolerance));
    } else {
      const SamplePool pool = make_sample(cfg, problem);
      const ClosedFormPolicy cf = build_oracle(cfg.oracle);
      const PolicyOnPool on_pool = evaluate_on(cf.policy(), pool);
      const double reference = pool_welfare(cf.welfare, on_pool.values, pool.weights);
      for (int K : cfg.K) {
        const PartitionSolution s = solve(problem, pool, K, cfg.solver);
        CompareRow row{to_string(cf.name), pool.size(), K, s.welfare, reference,
                       "closed_form"};
        row.gap = reference - s.welfare;
        row.passed = std::abs(row.gap) <=
                     cfg.compare.relative_tolerance * std::max(std::abs(reference), 1e-300);
        rows.push_back(row);
      }
    }
  }

  Json table = Json::array();
  bool passed = true;
  std::printf("%-24s %4s %3s %22s %22s %10s %10s %s\n", "instance", "n", "K",
              "solver", "reference", "gap", "lp_gap", "status");
  for (const auto& r : rows) {
    std::printf("%-24s %4ld %3d %22.15g %22.15g %10.2e %10.2e %s\n", r.name.c_str(),
                static_cast<long>(r.n), r.K, r.solver, r.reference, r.gap, r.lp_gap,
                r.passed ? "ok" : "FAIL");
    passed = passed && r.passed;
    table.push_back(row_json(r));
  }
  Output(dir).json("compare.json", {{"schema_version", kSchemaVersion},
                                    {"passed", passed},
                                    {"rows", table}});
  return passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal information design by partition solving and verification"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("config", opt.config_path, "JSON run config");
    if (config_required) c->required();
    sub->add_option("-o,--out", opt.out_dir, "Output directory (overrides the config)");
    sub->add_option("--threads", opt.threads,
                    "Worker cap (default: INFOTRANSPORT_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  };

  auto* solve_cmd = app.add_subcommand("solve", "Solve for optimal partitions");
  add_common(solve_cmd, true);
  auto* verify_cmd = app.add_subcommand("verify", "Check optimality conditions of a policy");
  add_common(verify_cmd, true);
  verify_cmd->add_option("--source", opt.source, "solution or closed_form")
      ->check(CLI::IsMember({"solution", "closed_form"}));
  verify_cmd->add_option("--solution", opt.solution_path, "Solution file to verify");
  verify_cmd->add_option("--perturb", opt.perturbation, "none, scale, displace or swap")
      ->check(CLI::IsMember({"none", "scale", "displace", "swap"}));
  auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate a closed-form policy");
  add_common(oracle_cmd, true);
  auto* linearize_cmd =
      app.add_subcommand("linearize", "Small-uncertainty expansion of a general game");
  add_common(linearize_cmd, true);
  auto* compare_cmd =
      app.add_subcommand("compare", "Compare solver welfare against exact references");
  add_common(compare_cmd, false);
  compare_cmd->add_flag("--suite", opt.suite, "Run the bundled discrete suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(opt);
    if (*verify_cmd) return cmd_verify(opt);
    if (*oracle_cmd) return cmd_oracle(opt);
    if (*linearize_cmd) return cmd_linearize(opt);
    if (*compare_cmd) return cmd_compare(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInvalidSpec ? kExitUsage : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
