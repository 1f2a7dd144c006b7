#include "ms2gd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace ms2gd {

double RandomStream::next_gaussian() {
  // Box-Muller, always two draws
  double u1 = next_unit();
  double u2 = next_unit();
  while (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::vector<std::uint32_t> sample_batch(RandomStream& rng, std::size_t n,
                                        std::size_t b) {
  if (b < 1 || b > n) throw std::invalid_argument("sample_batch: need 1 <= b <= n");
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(b * 2);
  for (std::uint64_t j = n - b; j < n; ++j) {
    std::uint64_t t = rng.next_below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint32_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct TraceRecorder {
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

void check_config(const CompositeProblem& p, const SolverConfig& cfg) {
  if (cfg.b < 1 || cfg.b > p.n())
    throw std::invalid_argument("solver: need 1 <= b <= n");
  if (cfg.m < 1) throw std::invalid_argument("solver: m must be >= 1");
  if (cfg.h <= 0.0) throw std::invalid_argument("solver: h must be positive");
  if (cfg.epochs < 1)
    throw std::invalid_argument("solver: epochs must be >= 1");
}

double eval_objective(const CompositeProblem& p, const SolverConfig& cfg,
                      std::span<const double> x) {
  return cfg.threads > 1 ? objective_parallel(p, x) : objective(p, x);
}

void eval_full_gradient(const CompositeProblem& p, const SolverConfig& cfg,
                        std::span<const double> x, std::span<double> g,
                        std::vector<double>* margins) {
  if (cfg.threads > 1)
    full_gradient_parallel(p, x, g, margins);
  else
    full_gradient(p, x, g, margins);
}

}  // namespace

SolveResult solve_dense(const CompositeProblem& p, const SolverConfig& cfg,
                        std::span<const double> x0) {
  check_config(p, cfg);
  const auto& mat = p.data->features;
  const std::size_t n = p.n(), d = p.dim();
  if (x0.size() != d) throw std::invalid_argument("solver: x0 dimension");

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> g(d), est(d), y(d), margins;
  RandomStream rng(cfg.seed);
  TraceRecorder rec{{"ms2gd-dense", {}}, static_cast<double>(n)};
  rec.record(eval_objective(p, cfg, x));

  const double inv_b = 1.0 / static_cast<double>(cfg.b);
  for (std::size_t k = 0; k < cfg.epochs; ++k) {
    eval_full_gradient(p, cfg, x, g, &margins);
    rec.work_units += n;
    y = x;
    std::uint64_t t_k = rng.next_in_1_to(cfg.m);
    for (std::uint64_t t = 0; t < t_k; ++t) {
      auto batch = sample_batch(rng, n, cfg.b);
      std::copy(g.begin(), g.end(), est.begin());
      for (std::uint32_t i : batch) {
        double dy = loss_derivative(p.loss, row_dot(mat, i, y),
                                    p.data->labels[i]);
        double dx = loss_derivative(p.loss, margins[i], p.data->labels[i]);
        double w = inv_b * (dy - dx);
        auto cols = mat.row_cols(i);
        auto vals = mat.row_vals(i);
        for (std::size_t kk = 0; kk < cols.size(); ++kk)
          est[cols[kk]] += w * vals[kk];
      }
      for (std::size_t j = 0; j < d; ++j)
        y[j] = prox_step_scalar(p.reg, cfg.h, y[j] - cfg.h * est[j]);
      rec.work_units += 2 * cfg.b;
      if (cfg.checkpoint_every > 0 && (t + 1) % cfg.checkpoint_every == 0 &&
          t + 1 < t_k)
        rec.record(eval_objective(p, cfg, y));
    }
    x = y;
    rec.record(eval_objective(p, cfg, x));
  }
  return {std::move(x), std::move(rec.trace)};
}

SolveResult solve_lazy(const CompositeProblem& p, const SolverConfig& cfg,
                       std::span<const double> x0) {
  check_config(p, cfg);
  if (!p.reg.separable())
    throw std::invalid_argument("lazy path requires a separable regularizer");
  const auto& mat = p.data->features;
  const std::size_t n = p.n(), d = p.dim();
  if (x0.size() != d) throw std::invalid_argument("solver: x0 dimension");

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> g(d), v(d), scratch(d), margins;
  std::vector<std::uint64_t> chi(d);
  std::vector<double> delta;  // per-batch correction weights
  RandomStream rng(cfg.seed);
  TraceRecorder rec{{"ms2gd-lazy", {}}, static_cast<double>(n)};
  rec.record(eval_objective(p, cfg, x));

  const double inv_b = 1.0 / static_cast<double>(cfg.b);
  LazyProxQuery q;
  q.h = cfg.h;
  q.reg = p.reg;
  for (std::size_t k = 0; k < cfg.epochs; ++k) {
    eval_full_gradient(p, cfg, x, g, &margins);
    rec.work_units += n;
    std::copy(x.begin(), x.end(), v.begin());
    std::fill(chi.begin(), chi.end(), 0);
    std::uint64_t t_k = rng.next_in_1_to(cfg.m);
    for (std::uint64_t t = 0; t < t_k; ++t) {
      auto batch = sample_batch(rng, n, cfg.b);
      // catch the batch supports up to the current inner step
      for (std::uint32_t i : batch) {
        for (std::uint32_t j : mat.row_cols(i)) {
          if (chi[j] != t) {
            q.y_j = v[j];
            q.g_j = g[j];
            q.tau = t - chi[j];
            v[j] = prox_tau(q);
            chi[j] = t;
          }
        }
      }
      delta.clear();
      for (std::uint32_t i : batch) {
        double dy = loss_derivative(p.loss, row_dot(mat, i, v),
                                    p.data->labels[i]);
        double dx = loss_derivative(p.loss, margins[i], p.data->labels[i]);
        delta.push_back(inv_b * (dy - dx));
      }
      // sparse correction; the prox + g_k part of this step stays deferred
      for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        std::uint32_t i = batch[bi];
        auto cols = mat.row_cols(i);
        auto vals = mat.row_vals(i);
        for (std::size_t kk = 0; kk < cols.size(); ++kk)
          v[cols[kk]] -= cfg.h * delta[bi] * vals[kk];
      }
      rec.work_units += 2 * cfg.b;
      if (cfg.checkpoint_every > 0 && (t + 1) % cfg.checkpoint_every == 0 &&
          t + 1 < t_k) {
        // virtual flush: observe without committing the catch-up
        for (std::size_t j = 0; j < d; ++j) {
          q.y_j = v[j];
          q.g_j = g[j];
          q.tau = (t + 1) - chi[j];
          scratch[j] = prox_tau(q);
        }
        rec.record(eval_objective(p, cfg, scratch));
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      q.y_j = v[j];
      q.g_j = g[j];
      q.tau = t_k - chi[j];
      v[j] = prox_tau(q);
    }
    std::copy(v.begin(), v.end(), x.begin());
    rec.record(eval_objective(p, cfg, x));
  }
  return {std::move(x), std::move(rec.trace)};
}

SolveResult solve_ms2gd(const CompositeProblem& p, const SolverConfig& cfg,
                        std::span<const double> x0) {
  return cfg.lazy ? solve_lazy(p, cfg, x0) : solve_dense(p, cfg, x0);
}

}  // namespace ms2gd
