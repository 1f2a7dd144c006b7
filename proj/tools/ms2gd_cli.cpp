#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ms2gd/harness.hpp"
#include "ms2gd/theory.hpp"

using nlohmann::json;

namespace {

ms2gd::LossId parse_loss(const std::string& s) {
  if (s == "logistic") return ms2gd::LossId::logistic;
  if (s == "squared") return ms2gd::LossId::squared;
  throw std::invalid_argument("unknown loss: " + s);
}

ms2gd::RegId parse_reg(const std::string& s) {
  if (s == "none") return ms2gd::RegId::none;
  if (s == "l1") return ms2gd::RegId::l1;
  if (s == "l2") return ms2gd::RegId::l2;
  throw std::invalid_argument("unknown regularizer: " + s);
}

struct RunFlags {
  std::string data;
  std::string loss = "logistic";
  std::string reg = "none";
  double lambda = 0.0;
  std::optional<double> mu;
  std::vector<std::string> solvers = {"ms2gd"};
  std::size_t b = 1;
  std::size_t m = 0;
  double h = 0.0;
  std::size_t epochs = 10;
  std::vector<std::uint64_t> seeds = {0};
  bool lazy = false;
  std::string out;
  std::string ref = "none";
  bool normalize = false;
  std::size_t checkpoint_every = 0;
  int threads = 1;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--data", f.data, "dataset in LIBSVM text format")
      ->required();
  cmd->add_option("--loss", f.loss, "logistic|squared");
  cmd->add_option("--reg", f.reg, "none|l1|l2");
  cmd->add_option("--lambda", f.lambda, "regularization weight");
  cmd->add_option("--mu", f.mu, "strong convexity constant (default: lambda for l2)");
  cmd->add_option("--solver", f.solvers,
                  "ms2gd|s2gd|sgd_const|sgd_decay|gd|fista|sag (repeatable)");
  cmd->add_option("--b", f.b, "mini-batch size");
  cmd->add_option("--m", f.m, "max inner steps per epoch (0 = ceil(0.1 n))");
  cmd->add_option("--h", f.h, "stepsize (0 = 1/L)");
  cmd->add_option("--epochs", f.epochs, "outer iterations / data passes");
  cmd->add_option("--seed", f.seeds, "RNG seeds (repeatable)");
  cmd->add_flag("--lazy", f.lazy, "use the sparse lazy-update engine");
  cmd->add_option("--out", f.out, "output directory for traces + manifest");
  cmd->add_option("--ref", f.ref,
                  "suboptimality reference: none|fista|FILE (json with p_star)");
  cmd->add_flag("--normalize-rows", f.normalize, "scale rows to unit norm");
  cmd->add_option("--checkpoint-every", f.checkpoint_every,
                  "inner steps between trace rows (0 = epoch ends)");
  cmd->add_option("--threads", f.threads, ">1 enables the OpenMP kernels");
}

ms2gd::ExperimentSpec to_spec(const RunFlags& f) {
  ms2gd::ExperimentSpec spec;
  spec.dataset_path = f.data;
  spec.loss = parse_loss(f.loss);
  spec.reg = {parse_reg(f.reg), f.lambda};
  spec.mu = f.mu;
  spec.normalize_rows = f.normalize;
  spec.seeds = f.seeds;
  spec.out_dir = f.out;
  if (f.ref == "none")
    spec.ref = ms2gd::RefPolicy::none;
  else if (f.ref == "fista")
    spec.ref = ms2gd::RefPolicy::fista_long;
  else {
    spec.ref = ms2gd::RefPolicy::file;
    spec.ref_file = f.ref;
  }
  for (const auto& name : f.solvers) {
    ms2gd::SolverSpec s;
    s.name = name;
    s.b = f.b;
    s.m = f.m;
    s.h = f.h;
    s.epochs = f.epochs;
    s.lazy = f.lazy;
    s.checkpoint_every = f.checkpoint_every;
    s.threads = f.threads;
    spec.solvers.push_back(std::move(s));
  }
  return spec;
}

int cmd_run(const RunFlags& f) {
  auto outputs = ms2gd::run_experiment(to_spec(f));
  bool any_failed = false;
  for (const auto& o : outputs) {
    if (o.failed) {
      any_failed = true;
      std::cerr << o.solver << " seed " << o.seed << " failed: " << o.error
                << '\n';
      continue;
    }
    const auto& last = o.trace.rows.back();
    std::printf("%-10s seed %llu  passes %.3f  P(x) %.12g", o.solver.c_str(),
                static_cast<unsigned long long>(o.seed), last.effective_passes,
                last.objective);
    if (o.ref_value)
      std::printf("  subopt %.6g", last.objective - *o.ref_value);
    std::printf("\n");
  }
  if (!f.out.empty())
    std::printf("traces written to %s\n", f.out.c_str());
  return any_failed ? 2 : 0;
}

int cmd_tune(const RunFlags& f, const std::vector<double>& grid,
             double budget) {
  if (budget <= 0.0)
    throw std::invalid_argument("tune: --budget must be positive");
  auto spec = to_spec(f);
  ms2gd::Dataset data = ms2gd::load_libsvm(spec.dataset_path);
  if (spec.normalize_rows) ms2gd::normalize_rows(data);
  auto problem = ms2gd::make_problem(data, spec.loss, spec.reg, spec.mu);
  auto results = ms2gd::tune_stepsize(spec, problem, grid, budget);
  json j = json::array();
  for (const auto& r : results)
    j.push_back({{"solver", r.solver},
                 {"best_h", r.best_h},
                 {"final_objective", r.best_objective}});
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_theory(std::size_t n, double L, std::optional<double> mu,
               std::optional<double> kappa, std::size_t b,
               std::optional<double> h, std::optional<double> m,
               std::optional<double> rho_target,
               std::optional<double> epsilon) {
  if (!mu && !kappa)
    throw std::invalid_argument("theory: need --mu or --kappa");
  ms2gd::theory::TheoryInputs in;
  in.n = n;
  in.L = L;
  in.mu = mu ? *mu : L / *kappa;
  in.b = b;
  in.h = h;
  in.m = m;
  in.rho_target = rho_target;
  in.epsilon = epsilon;
  auto rep = ms2gd::theory::report(in);

  json j;
  j["n"] = in.n;
  j["L"] = in.L;
  j["mu"] = in.mu;
  j["kappa"] = in.kappa();
  j["b"] = in.b;
  j["alpha"] = rep.alpha;
  j["b0"] = rep.b0;
  if (rep.rate) {
    j["rate"] = {{"ok", rep.rate->ok}, {"rho", rep.rate->rho}};
    if (!rep.rate->ok) j["rate"]["violation"] = rep.rate->violation;
  }
  if (rep.optimal) {
    j["optimal"] = {
        {"h_star", rep.optimal->h_star},
        {"m_star", rep.optimal->m_star},
        {"m_star_ceil", rep.optimal->m_star_ceil},
        {"regime", rep.optimal->regime ==
                           ms2gd::theory::StepsizeRegime::interior
                       ? "interior"
                       : "capped_at_1/L"}};
  }
  if (rep.recipe) {
    j["recipe"] = {{"k", rep.recipe->k},
                   {"rho", rep.recipe->rho},
                   {"h_b", rep.recipe->h_b},
                   {"m_b", rep.recipe->m_b},
                   {"b0", rep.recipe->b0},
                   {"total_work_units", rep.recipe->total_work_units},
                   {"b_within_guarantee", rep.recipe->b_within_guarantee}};
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_lasso(std::size_t n, std::size_t band, double sigma, double lambda,
              std::uint64_t seed, const std::string& out) {
  auto inst = ms2gd::lasso_synthetic(n, band, sigma, lambda, seed);
  namespace fs = std::filesystem;
  fs::create_directories(out);
  {
    std::ofstream f(fs::path(out) / "data.libsvm");
    ms2gd::save_libsvm(*inst.data, f);
  }
  {
    std::ofstream f(fs::path(out) / "x_true.txt");
    for (double v : inst.x_true) f << std::setprecision(17) << v << '\n';
  }
  json j = {{"n", n},          {"band", band}, {"sigma", sigma},
            {"lambda", lambda}, {"seed", seed}, {"loss", "squared"},
            {"reg", "l1"},      {"L", inst.problem.L}};
  std::ofstream mf(fs::path(out) / "instance.json");
  mf << j.dump(2) << '\n';
  std::printf("wrote %s/{data.libsvm,x_true.txt,instance.json}  L = %.6g\n",
              out.c_str(), inst.problem.L);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mS2GD: mini-batch semi-stochastic gradient descent benchmark"};
  app.require_subcommand(1);
  // --h is a stepsize flag, so help is long-form only
  app.set_help_flag("--help", "print help");

  RunFlags rf;
  auto* run = app.add_subcommand("run", "run solvers and emit traces");
  run->set_help_flag("--help", "print help");
  add_run_flags(run, rf);

  RunFlags tf;
  std::vector<double> grid;
  double budget = 10.0;
  auto* tune = app.add_subcommand("tune", "best-in-hindsight stepsize search");
  tune->set_help_flag("--help", "print help");
  add_run_flags(tune, tf);
  tune->add_option("--grid", grid, "candidate stepsizes")->required();
  tune->add_option("--budget", budget, "pass budget per grid point");

  std::size_t tn = 0, tb = 1;
  double tL = 0.0;
  std::optional<double> tmu, tkappa, th, tm, trho, teps;
  auto* theory = app.add_subcommand("theory", "evaluate the rate theory");
  theory->set_help_flag("--help", "print help");
  theory->add_option("--n", tn, "sample count")->required();
  theory->add_option("--L", tL, "smoothness constant")->required();
  theory->add_option("--mu", tmu, "strong convexity constant");
  theory->add_option("--kappa", tkappa, "condition number (alternative to --mu)");
  theory->add_option("--b", tb, "mini-batch size");
  theory->add_option("--h", th, "stepsize (with --m: evaluate the rate)");
  theory->add_option("--m", tm, "inner-loop size (with --h: evaluate the rate)");
  theory->add_option("--rho-target", trho, "target rate for optimal (h, m)");
  theory->add_option("--epsilon", teps, "target accuracy for the work recipe");

  std::size_t ln = 1000, lband = 30;
  double lsigma = 0.01, llambda = 1e-3;
  std::uint64_t lseed = 0;
  std::string lout = "lasso_synth";
  auto* lasso = app.add_subcommand("lasso-synth",
                                   "generate a synthetic deblurring instance");
  lasso->set_help_flag("--help", "print help");
  lasso->add_option("--n", ln, "signal length");
  lasso->add_option("--band", lband, "half bandwidth of the blur operator");
  lasso->add_option("--sigma", lsigma, "observation noise level");
  lasso->add_option("--lambda", llambda, "l1 weight");
  lasso->add_option("--seed", lseed, "RNG seed");
  lasso->add_option("--out", lout, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad flags are validation errors
  }

  try {
    if (*run) return cmd_run(rf);
    if (*tune) return cmd_tune(tf, grid, budget);
    if (*theory)
      return cmd_theory(tn, tL, tmu, tkappa, tb, th, tm, trho, teps);
    if (*lasso) return cmd_lasso(ln, lband, lsigma, llambda, lseed, lout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
