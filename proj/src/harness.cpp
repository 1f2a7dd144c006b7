#include "ms2gd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ms2gd {

namespace {

int trace_digits() {
  if (const char* env = std::getenv("MS2GD_TRACE_DIGITS")) {
    int v = std::atoi(env);
    if (v >= 1 && v <= 17) return v;
  }
  return 17;
}

std::string reg_name(RegId id) {
  switch (id) {
    case RegId::none: return "none";
    case RegId::l1: return "l1";
    case RegId::l2: return "l2";
  }
  return "?";
}

std::string loss_name(LossId id) {
  return id == LossId::logistic ? "logistic" : "squared";
}

SolveResult run_one(const CompositeProblem& p, const SolverSpec& s,
                    std::uint64_t seed) {
  std::vector<double> x0(p.dim(), 0.0);
  if (s.name == "ms2gd") {
    SolverConfig cfg;
    cfg.b = s.b;
    cfg.m = s.m ? s.m : static_cast<std::size_t>(
                            std::ceil(0.1 * static_cast<double>(p.n())));
    cfg.h = s.h > 0.0 ? s.h : 1.0 / p.L;
    cfg.epochs = s.epochs;
    cfg.seed = seed;
    cfg.lazy = s.lazy;
    cfg.checkpoint_every = s.checkpoint_every;
    cfg.threads = s.threads;
    auto res = solve_ms2gd(p, cfg, x0);
    res.trace.solver = "ms2gd";
    return res;
  }
  BaselineConfig cfg;
  cfg.solver = baseline_from_name(s.name);
  cfg.h0 = s.h > 0.0 ? s.h : 1.0 / p.L;
  cfg.epochs = s.epochs;
  cfg.seed = seed;
  cfg.m = s.m;
  cfg.checkpoint_every = s.checkpoint_every;
  cfg.threads = s.threads;
  return solve_baseline(p, cfg, x0);
}

json spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["dataset"] = spec.dataset_path;
  j["loss"] = loss_name(spec.loss);
  j["reg"] = reg_name(spec.reg.id);
  j["lambda"] = spec.reg.lambda;
  if (spec.mu) j["mu"] = *spec.mu;
  j["normalize_rows"] = spec.normalize_rows;
  j["seeds"] = spec.seeds;
  j["ref"] = spec.ref == RefPolicy::none    ? "none"
             : spec.ref == RefPolicy::fista_long ? "fista"
                                              : spec.ref_file;
  j["solvers"] = json::array();
  for (const auto& s : spec.solvers) {
    json js;
    js["name"] = s.name;
    js["b"] = s.b;
    js["m"] = s.m;
    js["h"] = s.h;
    js["epochs"] = s.epochs;
    js["lazy"] = s.lazy;
    js["checkpoint_every"] = s.checkpoint_every;
    js["threads"] = s.threads;
    j["solvers"].push_back(js);
  }
  return j;
}

}  // namespace

void write_trace_csv(const std::string& path, const RunTrace& trace,
                     std::optional<double> ref_value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "effective_passes,objective,suboptimality,wall_seconds\n";
  const int digits = trace_digits();
  char buf[160];
  for (const auto& row : trace.rows) {
    if (ref_value) {
      std::snprintf(buf, sizeof buf, "%.*g,%.*g,%.*g,%.*g\n", digits,
                    row.effective_passes, digits, row.objective, digits,
                    row.objective - *ref_value, digits, row.wall_seconds);
    } else {
      std::snprintf(buf, sizeof buf, "%.*g,%.*g,,%.*g\n", digits,
                    row.effective_passes, digits, row.objective, digits,
                    row.wall_seconds);
    }
    out << buf;
  }
}

std::uint64_t problem_hash(const CompositeProblem& p) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  std::uint64_t meta[4] = {p.n(), p.dim(), static_cast<std::uint64_t>(p.loss),
                           static_cast<std::uint64_t>(p.reg.id)};
  mix(meta, sizeof meta);
  mix(&p.reg.lambda, sizeof(double));
  const auto& m = p.data->features;
  mix(m.col_indices.data(), m.col_indices.size() * sizeof(std::uint32_t));
  mix(m.values.data(), m.values.size() * sizeof(double));
  mix(p.data->labels.data(), p.data->labels.size() * sizeof(double));
  return h;
}

double reference_minimum(const CompositeProblem& p, double tol,
                         std::size_t max_iters) {
  const std::size_t d = p.dim();
  const double h = 1.0 / p.L;
  std::vector<double> x(d, 0.0), x_prev(d, 0.0), y(d, 0.0), g(d), z(d);
  double t = 1.0;
  double best = objective(p, x);
  for (std::size_t s = 0; s < max_iters; ++s) {
    full_gradient(p, y, g);
    for (std::size_t j = 0; j < d; ++j)
      x[j] = prox_step_scalar(p.reg, h, y[j] - h * g[j]);
    // gradient mapping at y
    double map_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double mj = (y[j] - x[j]) / h;
      map_sq += mj * mj;
    }
    double obj = objective(p, x);
    if (obj < best) best = obj;
    if (std::sqrt(map_sq) <= tol) break;
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double beta = (t - 1.0) / t_next;
    for (std::size_t j = 0; j < d; ++j)
      y[j] = x[j] + beta * (x[j] - x_prev[j]);
    t = t_next;
    x_prev = x;
  }
  return best;
}

double reference_minimum_cached(const CompositeProblem& p,
                                const std::string& cache_dir) {
  if (cache_dir.empty()) return reference_minimum(p);
  fs::create_directories(cache_dir);
  char name[64];
  std::snprintf(name, sizeof name, "ref_%016llx.json",
                static_cast<unsigned long long>(problem_hash(p)));
  fs::path path = fs::path(cache_dir) / name;
  if (fs::exists(path)) {
    std::ifstream in(path);
    json j;
    in >> j;
    return j.at("p_star").get<double>();
  }
  double p_star = reference_minimum(p);
  json j;
  j["p_star"] = p_star;
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  return p_star;
}

std::vector<TraceOutput> run_experiment(const ExperimentSpec& spec,
                                        const CompositeProblem& problem) {
  if (spec.solvers.empty())
    throw std::invalid_argument("experiment: at least one solver required");
  if (spec.reg.lambda < 0.0)
    throw std::invalid_argument("experiment: lambda must be >= 0");

  std::optional<double> ref_value;
  if (spec.ref == RefPolicy::fista_long)
    ref_value = reference_minimum_cached(problem, spec.out_dir);
  else if (spec.ref == RefPolicy::file) {
    std::ifstream in(spec.ref_file);
    if (!in) throw std::runtime_error("cannot open reference " + spec.ref_file);
    json j;
    in >> j;
    ref_value = j.at("p_star").get<double>();
  }

  if (!spec.out_dir.empty()) fs::create_directories(spec.out_dir);

  std::vector<TraceOutput> outputs;
  for (const auto& s : spec.solvers) {
    for (std::uint64_t seed : spec.seeds) {
      TraceOutput to;
      to.solver = s.name;
      to.seed = seed;
      to.ref_value = ref_value;
      try {
        auto res = run_one(problem, s, seed);
        to.trace = std::move(res.trace);
      } catch (const std::exception& e) {
        to.failed = true;
        to.error = e.what();
      }
      if (!spec.out_dir.empty() && !to.failed) {
        char fname[128];
        std::snprintf(fname, sizeof fname, "%s_seed%llu.csv", s.name.c_str(),
                      static_cast<unsigned long long>(seed));
        to.csv_path = (fs::path(spec.out_dir) / fname).string();
        write_trace_csv(to.csv_path, to.trace, ref_value);
      }
      outputs.push_back(std::move(to));
    }
  }

  if (!spec.out_dir.empty()) {
    // echo the resolved parameters, not the 0 = "use default" sentinels
    ExperimentSpec resolved = spec;
    for (auto& s : resolved.solvers) {
      if (s.name == "ms2gd" && s.m == 0)
        s.m = static_cast<std::size_t>(
            std::ceil(0.1 * static_cast<double>(problem.n())));
      if (s.h <= 0.0) s.h = 1.0 / problem.L;
    }
    json manifest = spec_to_json(resolved);
    manifest["problem"] = {{"n", problem.n()},
                           {"d", problem.dim()},
                           {"L", problem.L},
                           {"mu", problem.mu},
                           {"x0", "zero"}};
    if (ref_value) manifest["p_star"] = *ref_value;
    manifest["runs"] = json::array();
    for (const auto& to : outputs) {
      json r;
      r["solver"] = to.solver;
      r["seed"] = to.seed;
      r["csv"] = fs::path(to.csv_path).filename().string();
      r["failed"] = to.failed;
      if (to.failed) r["error"] = to.error;
      manifest["runs"].push_back(r);
    }
    std::ofstream out(fs::path(spec.out_dir) / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  return outputs;
}

ExperimentSpec experiment_from_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest " + manifest_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("bad manifest: " + std::string(e.what()));
  }
  ExperimentSpec spec;
  spec.dataset_path = j.at("dataset").get<std::string>();
  spec.loss = j.at("loss").get<std::string>() == "squared" ? LossId::squared
                                                           : LossId::logistic;
  std::string reg = j.at("reg").get<std::string>();
  spec.reg.id = reg == "l1" ? RegId::l1 : reg == "l2" ? RegId::l2 : RegId::none;
  spec.reg.lambda = j.at("lambda").get<double>();
  if (j.contains("mu")) spec.mu = j.at("mu").get<double>();
  spec.normalize_rows = j.at("normalize_rows").get<bool>();
  spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  std::string ref = j.at("ref").get<std::string>();
  if (ref == "none") {
    spec.ref = RefPolicy::none;
  } else if (ref == "fista") {
    spec.ref = RefPolicy::fista_long;
  } else {
    spec.ref = RefPolicy::file;
    spec.ref_file = ref;
  }
  for (const auto& js : j.at("solvers")) {
    SolverSpec s;
    s.name = js.at("name").get<std::string>();
    s.b = js.at("b").get<std::size_t>();
    s.m = js.at("m").get<std::size_t>();
    s.h = js.at("h").get<double>();
    s.epochs = js.at("epochs").get<std::size_t>();
    s.lazy = js.at("lazy").get<bool>();
    s.checkpoint_every = js.at("checkpoint_every").get<std::size_t>();
    s.threads = js.at("threads").get<int>();
    spec.solvers.push_back(std::move(s));
  }
  return spec;
}

std::vector<TraceOutput> run_experiment(const ExperimentSpec& spec) {
  if (spec.dataset_path.empty())
    throw std::invalid_argument("experiment: dataset path required");
  if (spec.solvers.empty())
    throw std::invalid_argument("experiment: at least one solver required");
  if (spec.reg.lambda < 0.0)
    throw std::invalid_argument("experiment: lambda must be >= 0");
  Dataset data = load_libsvm(spec.dataset_path);
  if (spec.normalize_rows) normalize_rows(data);
  CompositeProblem problem = make_problem(data, spec.loss, spec.reg, spec.mu);
  return run_experiment(spec, problem);
}

std::vector<TuneResult> tune_stepsize(const ExperimentSpec& spec,
                                      const CompositeProblem& problem,
                                      const std::vector<double>& grid,
                                      double budget_passes) {
  if (grid.empty()) throw std::invalid_argument("tune: empty stepsize grid");
  std::vector<double> hs(grid);
  std::sort(hs.begin(), hs.end());
  const double n = static_cast<double>(problem.n());

  std::vector<TuneResult> results;
  for (const auto& s : spec.solvers) {
    TuneResult best{s.name, 0.0, INFINITY};
    for (double h : hs) {
      SolverSpec trial = s;
      trial.h = h;
      // translate the pass budget into the solver's epoch unit
      if (s.name == "ms2gd" || s.name == "s2gd") {
        std::size_t m = trial.m ? trial.m
                                : static_cast<std::size_t>(std::ceil(0.1 * n));
        double passes_per_epoch =
            (n + 2.0 * static_cast<double>(trial.b) * 0.5 *
                     static_cast<double>(m + 1)) /
            n;
        trial.epochs = std::max<std::size_t>(
            1, static_cast<std::size_t>(budget_passes / passes_per_epoch));
      } else {
        trial.epochs = std::max<std::size_t>(
            1, static_cast<std::size_t>(budget_passes));
      }
      std::uint64_t seed = spec.seeds.empty() ? 0 : spec.seeds.front();
      double final_obj;
      try {
        auto res = run_one(problem, trial, seed);
        final_obj = res.trace.rows.back().objective;
      } catch (const std::exception&) {
        continue;
      }
      if (!std::isfinite(final_obj)) continue;  // diverged
      if (final_obj < best.best_objective) {
        best.best_h = h;
        best.best_objective = final_obj;
      }
    }
    if (!std::isfinite(best.best_objective))
      throw std::runtime_error("tune: every grid point diverged for " + s.name);
    results.push_back(best);
  }
  return results;
}

LassoInstance lasso_synthetic(std::size_t n, std::size_t band,
                              double noise_sigma, double lambda,
                              std::uint64_t seed) {
  if (band >= n) throw std::invalid_argument("lasso_synthetic: need band < n");
  LassoInstance inst;
  inst.data = std::make_shared<Dataset>();
  Dataset& data = *inst.data;
  data.name = "lasso-synth";
  RandomStream rng(seed);

  // symmetric banded operator with a Gaussian cross-section
  const double prof = std::max(1.0, static_cast<double>(band) / 2.0);
  CsrMatrix& A = data.features;
  A.n_rows = A.n_cols = n;
  A.row_offsets.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= band ? i - band : 0;
    std::size_t hi = std::min(n - 1, i + band);
    for (std::size_t j = lo; j <= hi; ++j) {
      double off = static_cast<double>(i) - static_cast<double>(j);
      A.col_indices.push_back(static_cast<std::uint32_t>(j));
      A.values.push_back(std::exp(-off * off / (2.0 * prof * prof)));
    }
    A.row_offsets.push_back(A.values.size());
  }

  inst.x_true.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double coin = rng.next_unit();
    double mag = 0.5 + rng.next_unit();
    if (coin < 0.1) inst.x_true[j] = (rng.next_unit() < 0.5 ? -1.0 : 1.0) * mag;
  }
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double noise = noise_sigma > 0.0 ? noise_sigma * rng.next_gaussian() : 0.0;
    data.labels[i] = row_dot(A, i, inst.x_true) + noise;
  }
  inst.problem = make_problem(data, LossId::squared,
                              Regularizer{RegId::l1, lambda});
  return inst;
}

Dataset make_sparse_logistic_dataset(std::size_t n, std::size_t d,
                                     std::size_t nnz_per_row,
                                     std::uint64_t seed) {
  Dataset data;
  data.name = "synthetic-sparse";
  RandomStream rng(seed);
  std::vector<double> w(d);
  for (auto& v : w) v = rng.next_gaussian();

  CsrMatrix& m = data.features;
  m.n_rows = n;
  m.n_cols = d;
  m.row_offsets.push_back(0);
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = sample_batch(rng, d, nnz_per_row);
    double sq = 0.0;
    std::vector<double> vals(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      double v = rng.next_gaussian();
      if (v == 0.0) v = 1.0;
      vals[k] = v;
      sq += v * v;
    }
    double inv = 1.0 / std::sqrt(sq);
    double u = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      vals[k] *= inv;
      u += vals[k] * w[cols[k]];
      m.col_indices.push_back(cols[k]);
      m.values.push_back(vals[k]);
    }
    m.row_offsets.push_back(m.values.size());
    double margin = u + 0.1 * rng.next_gaussian();
    data.labels[i] = margin >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

}  // namespace ms2gd
