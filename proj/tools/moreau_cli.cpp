// Command-line front end: run solvers, generate synthetic datasets, sample
// envelope curves, and compare algorithms on a shared problem.
//
// Exit codes: 0 converged / success, 2 stopped at max_iters, 1 any error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>

#include "moreau/moreau.hpp"

namespace fs = std::filesystem;
using moreau::io::json;

namespace {

int verbosity() {
  const char* v = std::getenv("MOREAU_LOG");
  return v ? std::atoi(v) : 0;
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  return json::parse(f);
}

struct RunOutput {
  moreau::RunResult result;
  moreau::GapReport gap;
  double wall_time_s = 0.0;
};

RunOutput execute(const moreau::ConsensusProblem& problem,
                  moreau::Algorithm alg, const moreau::SolverConfig& cfg,
                  moreau::SolverState init) {
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  out.result = moreau::run(problem, alg, cfg, std::move(init));
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  out.gap = moreau::report_for(alg, problem, out.result.state);
  return out;
}

json summary_json(moreau::Algorithm alg, const moreau::SolverConfig& cfg,
                  const RunOutput& out) {
  const auto& trace = out.result.trace.records;
  json final_record;
  if (!trace.empty()) {
    const auto& r = trace.back();
    final_record = {{"objective", r.objective},
                    {"lyapunov", r.lyapunov},
                    {"penalty", r.penalty},
                    {"feas", r.feas}};
  }
  return {
      {"algorithm", moreau::to_string(alg)},
      {"stop_reason", moreau::to_string(out.result.reason)},
      {"iterations", out.result.state.t},
      {"wall_time_s", out.wall_time_s},
      {"seed", cfg.seed},
      {"final", final_record},
      {"gap", moreau::io::gap_to_json(out.gap)},
  };
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            long seed_override) {
  json cfg_json = load_config(config_path);
  moreau::io::require_keys(
      cfg_json, {"problem", "algorithm", "solver", "seed", "out_dir"}, "config");
  const std::string base_dir = fs::path(config_path).parent_path().string();

  const auto problem = moreau::io::parse_problem(cfg_json.at("problem"), base_dir);
  const auto alg =
      moreau::io::parse_algorithm(cfg_json.at("algorithm").get<std::string>());
  auto solver_cfg = moreau::io::parse_solver_config(
      cfg_json.contains("solver") ? cfg_json.at("solver") : json(), problem.lambda);
  solver_cfg.seed = seed_override >= 0
                        ? static_cast<unsigned>(seed_override)
                        : cfg_json.value("seed", 0u);

  std::string out_dir = !out_override.empty()
                            ? out_override
                            : cfg_json.value("out_dir", std::string("."));
  fs::create_directories(out_dir);

  const auto out =
      execute(problem, alg, solver_cfg, moreau::SolverState::zero_init(problem));

  moreau::io::write_trace_csv(out.result.trace,
                              (fs::path(out_dir) / "trace.csv").string());
  std::ofstream sf(fs::path(out_dir) / "summary.json");
  sf << summary_json(alg, solver_cfg, out).dump(2) << '\n';

  if (verbosity() > 0)
    std::cerr << "run: " << moreau::to_string(alg) << " "
              << moreau::to_string(out.result.reason) << " after "
              << out.result.state.t << " iterations, gap " << out.gap.total
              << "\n";
  return out.result.reason == moreau::StopReason::Converged ? 0 : 2;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir) {
  json cfg = load_config(config_path);
  if (!cfg.is_object() || !cfg.contains("kind"))
    throw moreau::io::ConfigError("gen-data: config needs a 'kind'");
  const std::string kind = cfg.at("kind").get<std::string>();
  if (kind == "regression") {
    moreau::io::require_keys(cfg,
                             {"kind", "m", "n", "outlier_frac",
                              "outlier_magnitude", "noise_sigma", "seed"},
                             "gen-data");
    const auto d = moreau::gen_regression(
        cfg.at("m").get<int>(), cfg.at("n").get<int>(),
        cfg.at("outlier_frac").get<double>(),
        cfg.value("outlier_magnitude",
                  std::numeric_limits<double>::quiet_NaN()),
        cfg.value("noise_sigma", 0.01), cfg.value("seed", 0u));
    moreau::io::write_regression_dataset(d, out_dir);
    return 0;
  }
  if (kind == "classification") {
    moreau::io::require_keys(cfg,
                             {"kind", "n_examples", "d_signal", "d_noise",
                              "n_labeled", "margin_violation_frac", "seed"},
                             "gen-data");
    const auto d = moreau::gen_classification(
        cfg.at("n_examples").get<int>(), cfg.at("d_signal").get<int>(),
        cfg.value("d_noise", 0), cfg.at("n_labeled").get<int>(),
        cfg.value("margin_violation_frac", 0.0), cfg.value("seed", 0u));
    moreau::io::write_classification_dataset(d, out_dir);
    return 0;
  }
  throw moreau::io::ConfigError("gen-data: unknown kind '" + kind + "'");
}

int cmd_envelope(const std::string& fn_json, double lambda, double lo,
                 double hi, int samples, const std::string& out_path) {
  if (samples < 2) throw moreau::io::ConfigError("envelope: samples must be >= 2");
  if (!(lambda > 0.0))
    throw moreau::io::ConfigError("envelope: lambda must be > 0");
  const auto fn = moreau::io::parse_stack(json::parse(fn_json));
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + out_path);
  f << "v,f,envelope\n";
  for (int i = 0; i < samples; ++i) {
    const double v = lo + (hi - lo) * i / (samples - 1);
    f << moreau::io::format_double(v) << ','
      << moreau::io::format_double(fn.eval(v)) << ','
      << moreau::io::format_double(fn.envelope(v, lambda)) << '\n';
  }
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_override,
                long seed_override) {
  json cfg_json = load_config(config_path);
  moreau::io::require_keys(
      cfg_json,
      {"problem", "algorithms", "solver", "seed", "out_dir", "holdout"},
      "config");
  const std::string base_dir = fs::path(config_path).parent_path().string();

  const auto problem = moreau::io::parse_problem(cfg_json.at("problem"), base_dir);
  if (!cfg_json.contains("algorithms") || !cfg_json.at("algorithms").is_array())
    throw moreau::io::ConfigError("compare: 'algorithms' array required");
  std::vector<moreau::Algorithm> algs;
  for (const auto& a : cfg_json.at("algorithms"))
    algs.push_back(moreau::io::parse_algorithm(a.get<std::string>()));

  auto solver_cfg = moreau::io::parse_solver_config(
      cfg_json.contains("solver") ? cfg_json.at("solver") : json(), problem.lambda);
  solver_cfg.seed = seed_override >= 0
                        ? static_cast<unsigned>(seed_override)
                        : cfg_json.value("seed", 0u);

  std::optional<moreau::ClassificationDataset> holdout;
  if (cfg_json.contains("holdout")) {
    const fs::path p(cfg_json.at("holdout").get<std::string>());
    holdout = moreau::io::read_classification_dataset(
        p.is_absolute() ? p.string() : (fs::path(base_dir) / p).string());
  }

  std::string out_dir = !out_override.empty()
                            ? out_override
                            : cfg_json.value("out_dir", std::string("."));
  fs::create_directories(out_dir);

  // Runs are independent; launch them concurrently.
  std::vector<std::future<RunOutput>> futures;
  futures.reserve(algs.size());
  for (const auto alg : algs)
    futures.push_back(std::async(std::launch::async, [&, alg] {
      return execute(problem, alg, solver_cfg,
                     moreau::SolverState::zero_init(problem));
    }));

  json rows = json::array();
  std::ofstream csv(fs::path(out_dir) / "compare.csv", std::ios::binary);
  csv << "algorithm,test_error,objective,sparsity,iterations,gap\n";
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const RunOutput out = futures[i].get();
    double test_error = std::numeric_limits<double>::quiet_NaN();
    double sparsity = std::numeric_limits<double>::quiet_NaN();
    double objective = moreau::regularized_objective(problem, out.result.state.u);
    if (holdout) {
      const auto metrics =
          moreau::evaluate_classifier(problem, out.result.state.u, *holdout);
      test_error = metrics.test_error;
      sparsity = metrics.sparsity;
      objective = metrics.objective;
    }
    csv << moreau::to_string(algs[i]) << ','
        << moreau::io::format_double(test_error) << ','
        << moreau::io::format_double(objective) << ','
        << moreau::io::format_double(sparsity) << ',' << out.result.state.t
        << ',' << moreau::io::format_double(out.gap.total) << '\n';
    json row = summary_json(algs[i], solver_cfg, out);
    row["test_error"] = test_error;
    row["objective"] = objective;
    row["sparsity"] = sparsity;
    rows.push_back(row);
  }
  std::ofstream jf(fs::path(out_dir) / "compare.json");
  jf << rows.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers and diagnostics for Moreau-envelope consensus problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  long seed_override = -1;

  auto* run = app.add_subcommand("run", "run one solver from a JSON config");
  run->add_option("--config", config_path, "JSON run config")->required();
  run->add_option("--out", out_path, "output directory (overrides config)");
  run->add_option("--seed", seed_override, "seed override");

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  gen->add_option("--config", config_path, "JSON generator config")->required();
  gen->add_option("--out", out_path, "output directory")->required();

  std::string fn_json;
  double lambda = 1.0, range_lo = -1.0, range_hi = 1.0;
  int samples = 201;
  auto* env = app.add_subcommand("envelope", "sample f and its Moreau envelope");
  env->add_option("--fn", fn_json, "loss stack as JSON")->required();
  env->add_option("--lambda", lambda, "envelope parameter")->required();
  env->add_option("--lo", range_lo, "range lower bound");
  env->add_option("--hi", range_hi, "range upper bound");
  env->add_option("--samples", samples, "number of samples");
  env->add_option("--out", out_path, "output CSV path")->required();

  auto* cmp = app.add_subcommand("compare",
                                 "run several algorithms on one problem");
  cmp->add_option("--config", config_path, "JSON compare config")->required();
  cmp->add_option("--out", out_path, "output directory (overrides config)");
  cmp->add_option("--seed", seed_override, "seed override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path, seed_override);
    if (gen->parsed()) return cmd_gen_data(config_path, out_path);
    if (env->parsed())
      return cmd_envelope(fn_json, lambda, range_lo, range_hi, samples,
                          out_path);
    if (cmp->parsed()) return cmd_compare(config_path, out_path, seed_override);
  } catch (const moreau::SolverDivergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!out_path.empty()) {
      fs::create_directories(out_path);
      moreau::io::write_trace_csv(e.trace,
                                  (fs::path(out_path) / "trace.csv").string());
      std::cerr << "partial trace written to " << out_path << "/trace.csv\n";
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
