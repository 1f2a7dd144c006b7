#include "ms2gd/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ms2gd {

BaselineId baseline_from_name(const std::string& name) {
  if (name == "sgd_const") return BaselineId::sgd_const;
  if (name == "sgd_decay") return BaselineId::sgd_decay;
  if (name == "gd") return BaselineId::gd;
  if (name == "fista") return BaselineId::fista;
  if (name == "sag") return BaselineId::sag;
  if (name == "s2gd") return BaselineId::s2gd;
  throw std::invalid_argument("unknown baseline solver: " + name);
}

std::string baseline_name(BaselineId id) {
  switch (id) {
    case BaselineId::sgd_const: return "sgd_const";
    case BaselineId::sgd_decay: return "sgd_decay";
    case BaselineId::gd: return "gd";
    case BaselineId::fista: return "fista";
    case BaselineId::sag: return "sag";
    case BaselineId::s2gd: return "s2gd";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

struct Recorder {
  RunTrace trace;
  double n;
  std::uint64_t work_units = 0;
  Clock::time_point start = Clock::now();
  void record(double obj) {
    double passes = static_cast<double>(work_units) / n;
    if (!trace.rows.empty() && trace.rows.back().effective_passes == passes)
      return;
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    trace.rows.push_back({passes, obj, secs});
  }
};

void check(const BaselineConfig& cfg) {
  if (cfg.h0 <= 0.0) throw std::invalid_argument("baseline: h0 must be positive");
  if (cfg.epochs < 1) throw std::invalid_argument("baseline: epochs must be >= 1");
}

double eval(const CompositeProblem& p, const BaselineConfig& cfg,
            std::span<const double> x) {
  return cfg.threads > 1 ? objective_parallel(p, x) : objective(p, x);
}

}  // namespace

SolveResult solve_sgd(const CompositeProblem& p, const BaselineConfig& cfg,
                      std::span<const double> x0) {
  check(cfg);
  const bool decay = cfg.solver == BaselineId::sgd_decay;
  if (!decay && cfg.solver != BaselineId::sgd_const)
    throw std::invalid_argument("solve_sgd: wrong solver id");
  const auto& mat = p.data->features;
  const std::size_t n = p.n(), d = p.dim();
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> grad(d);
  RandomStream rng(cfg.seed);
  Recorder rec{{baseline_name(cfg.solver), {}}, static_cast<double>(n)};
  rec.record(eval(p, cfg, x));

  const std::size_t steps = cfg.epochs * n;
  const std::size_t every = cfg.checkpoint_every ? cfg.checkpoint_every : n;
  for (std::size_t s = 0; s < steps; ++s) {
    std::size_t pass = s / n;  // completed effective passes
    double h = decay ? cfg.h0 / static_cast<double>(pass + 1) : cfg.h0;
    auto i = static_cast<std::uint32_t>(rng.next_below(n));
    double w = loss_derivative(p.loss, row_dot(mat, i, x), p.data->labels[i]);
    std::fill(grad.begin(), grad.end(), 0.0);
    auto cols = mat.row_cols(i);
    auto vals = mat.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      grad[cols[k]] = w * vals[k];
    for (std::size_t j = 0; j < d; ++j)
      x[j] = prox_step_scalar(p.reg, h, x[j] - h * grad[j]);
    rec.work_units += 1;
    if ((s + 1) % every == 0) rec.record(eval(p, cfg, x));
  }
  if (steps % every != 0) rec.record(eval(p, cfg, x));
  return {std::move(x), std::move(rec.trace)};
}

SolveResult solve_fista(const CompositeProblem& p, const BaselineConfig& cfg,
                        std::span<const double> x0) {
  check(cfg);
  const bool momentum = cfg.solver != BaselineId::gd;
  const std::size_t n = p.n(), d = p.dim();
  std::vector<double> x_prev(x0.begin(), x0.end());
  std::vector<double> y(x0.begin(), x0.end());
  std::vector<double> g(d), x(d);
  double t = 1.0;
  Recorder rec{{baseline_name(cfg.solver), {}}, static_cast<double>(n)};
  rec.record(eval(p, cfg, x_prev));

  for (std::size_t s = 0; s < cfg.epochs; ++s) {
    if (cfg.threads > 1)
      full_gradient_parallel(p, y, g);
    else
      full_gradient(p, y, g);
    for (std::size_t j = 0; j < d; ++j)
      x[j] = prox_step_scalar(p.reg, cfg.h0, y[j] - cfg.h0 * g[j]);
    if (momentum) {
      double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      double beta = (t - 1.0) / t_next;
      for (std::size_t j = 0; j < d; ++j)
        y[j] = x[j] + beta * (x[j] - x_prev[j]);
      t = t_next;
    } else {
      y = x;
    }
    x_prev = x;
    rec.work_units += n;
    rec.record(eval(p, cfg, x));
  }
  return {std::move(x_prev), std::move(rec.trace)};
}

SolveResult solve_sag(const CompositeProblem& p, const BaselineConfig& cfg,
                      std::span<const double> x0) {
  check(cfg);
  const auto& mat = p.data->features;
  const std::size_t n = p.n(), d = p.dim();
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> slot(n, 0.0);       // stored phi_i' values
  std::vector<double> avg(d, 0.0);        // (1/n) sum_i slot[i] a_i
  RandomStream rng(cfg.seed);
  Recorder rec{{baseline_name(cfg.solver), {}}, static_cast<double>(n)};
  rec.record(eval(p, cfg, x));

  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t steps = cfg.epochs * n;
  const std::size_t every = cfg.checkpoint_every ? cfg.checkpoint_every : n;
  for (std::size_t s = 0; s < steps; ++s) {
    auto i = static_cast<std::uint32_t>(rng.next_below(n));
    double nd = loss_derivative(p.loss, row_dot(mat, i, x), p.data->labels[i]);
    double w = inv_n * (nd - slot[i]);
    slot[i] = nd;
    auto cols = mat.row_cols(i);
    auto vals = mat.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      avg[cols[k]] += w * vals[k];
    for (std::size_t j = 0; j < d; ++j)
      x[j] = prox_step_scalar(p.reg, cfg.h0, x[j] - cfg.h0 * avg[j]);
    rec.work_units += 1;
    if ((s + 1) % every == 0) rec.record(eval(p, cfg, x));
  }
  if (steps % every != 0) rec.record(eval(p, cfg, x));
  return {std::move(x), std::move(rec.trace)};
}

SolveResult solve_s2gd(const CompositeProblem& p, const BaselineConfig& cfg,
                       std::span<const double> x0) {
  check(cfg);
  SolverConfig sc;
  sc.b = 1;
  sc.m = cfg.m ? cfg.m : std::max<std::size_t>(1, p.n() / 10);
  sc.h = cfg.h0;
  sc.epochs = cfg.epochs;
  sc.seed = cfg.seed;
  sc.checkpoint_every = cfg.checkpoint_every;
  sc.threads = cfg.threads;
  auto res = solve_dense(p, sc, x0);
  res.trace.solver = baseline_name(BaselineId::s2gd);
  return res;
}

SolveResult solve_baseline(const CompositeProblem& p,
                           const BaselineConfig& cfg,
                           std::span<const double> x0) {
  switch (cfg.solver) {
    case BaselineId::sgd_const:
    case BaselineId::sgd_decay:
      return solve_sgd(p, cfg, x0);
    case BaselineId::gd:
    case BaselineId::fista:
      return solve_fista(p, cfg, x0);
    case BaselineId::sag:
      return solve_sag(p, cfg, x0);
    case BaselineId::s2gd:
      return solve_s2gd(p, cfg, x0);
  }
  throw std::invalid_argument("unknown baseline solver");
}

}  // namespace ms2gd
