#include "ms2gd/problem.hpp"

#include <cmath>
#include <stdexcept>

#ifdef MS2GD_HAVE_OPENMP
#include <omp.h>
#endif

namespace ms2gd {

double loss_value(LossId loss, double u, double label) {
  switch (loss) {
    case LossId::logistic: {
      double t = label * u;
      // log(1 + exp(-t)) without overflow for large |t|
      return t >= 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
    }
    case LossId::squared: {
      double r = u - label;
      return 0.5 * r * r;
    }
  }
  throw std::invalid_argument("unknown loss id");
}

double loss_derivative(LossId loss, double u, double label) {
  switch (loss) {
    case LossId::logistic: {
      double t = label * u;
      if (t >= 0.0) {
        double e = std::exp(-t);
        return -label * e / (1.0 + e);
      }
      return -label / (1.0 + std::exp(t));
    }
    case LossId::squared:
      return u - label;
  }
  throw std::invalid_argument("unknown loss id");
}

double Regularizer::value(std::span<const double> x) const {
  switch (id) {
    case RegId::none:
      return 0.0;
    case RegId::l2: {
      double s = 0.0;
      for (double v : x) s += v * v;
      return 0.5 * lambda * s;
    }
    case RegId::l1: {
      double s = 0.0;
      for (double v : x) s += std::fabs(v);
      return lambda * s;
    }
  }
  throw std::invalid_argument("unknown regularizer id");
}

double CompositeProblem::strong_convexity() const {
  if (mu <= 0.0)
    throw std::invalid_argument(
        "strong convexity parameter was not supplied for this problem");
  return mu;
}

CompositeProblem make_problem(const Dataset& data, LossId loss, Regularizer reg,
                              std::optional<double> mu) {
  if (reg.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (loss == LossId::logistic) {
    for (double l : data.labels)
      if (l != 1.0 && l != -1.0)
        throw std::invalid_argument(
            "classification labels must be in {-1,+1}");
  }
  CompositeProblem p;
  p.data = &data;
  p.loss = loss;
  p.reg = reg;
  auto [per_row, max_l] = lipschitz_constants(data, loss);
  p.lipschitz_per_row = std::move(per_row);
  p.L = max_l;
  if (mu)
    p.mu = *mu;
  else if (reg.id == RegId::l2)
    p.mu = reg.lambda;  // certified lower bound for convex loss + l2
  else
    p.mu = 0.0;
  return p;
}

void full_gradient(const CompositeProblem& p, std::span<const double> x,
                   std::span<double> g, std::vector<double>* margins) {
  const auto& m = p.data->features;
  if (x.size() != m.n_cols || g.size() != m.n_cols)
    throw std::invalid_argument("full_gradient: dimension mismatch");
  std::fill(g.begin(), g.end(), 0.0);
  if (margins) margins->resize(m.n_rows);
  const double inv_n = 1.0 / static_cast<double>(m.n_rows);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    double u = row_dot(m, i, x);
    if (margins) (*margins)[i] = u;
    double w = inv_n * loss_derivative(p.loss, u, p.data->labels[i]);
    auto cols = m.row_cols(i);
    auto vals = m.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k) g[cols[k]] += w * vals[k];
  }
}

void full_gradient_parallel(const CompositeProblem& p,
                            std::span<const double> x, std::span<double> g,
                            std::vector<double>* margins) {
#ifndef MS2GD_HAVE_OPENMP
  full_gradient(p, x, g, margins);
#else
  const auto& m = p.data->features;
  if (x.size() != m.n_cols || g.size() != m.n_cols)
    throw std::invalid_argument("full_gradient: dimension mismatch");
  if (margins) margins->resize(m.n_rows);
  const double inv_n = 1.0 / static_cast<double>(m.n_rows);
  int nth = omp_get_max_threads();
  std::vector<std::vector<double>> partial(nth);

#pragma omp parallel
  {
    int tid = omp_get_thread_num();
    auto& buf = partial[tid];
    buf.assign(m.n_cols, 0.0);
    // contiguous static partition so each thread sees an ascending row range
    std::size_t chunk = (m.n_rows + nth - 1) / nth;
    std::size_t lo = std::min<std::size_t>(tid * chunk, m.n_rows);
    std::size_t hi = std::min<std::size_t>(lo + chunk, m.n_rows);
    for (std::size_t i = lo; i < hi; ++i) {
      double u = row_dot(m, i, x);
      if (margins) (*margins)[i] = u;
      double w = inv_n * loss_derivative(p.loss, u, p.data->labels[i]);
      auto cols = m.row_cols(i);
      auto vals = m.row_vals(i);
      for (std::size_t k = 0; k < cols.size(); ++k)
        buf[cols[k]] += w * vals[k];
    }
  }
  std::fill(g.begin(), g.end(), 0.0);
  for (int t = 0; t < nth; ++t)
    for (std::size_t j = 0; j < m.n_cols; ++j) g[j] += partial[t][j];
#endif
}

void stochastic_estimate(const CompositeProblem& p, std::span<const double> y,
                         std::span<const double> x_ref,
                         std::span<const double> g_ref,
                         std::span<const std::uint32_t> batch,
                         std::span<double> out) {
  const auto& m = p.data->features;
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (y.size() != m.n_cols || x_ref.size() != m.n_cols ||
      g_ref.size() != m.n_cols || out.size() != m.n_cols)
    throw std::invalid_argument("stochastic_estimate: dimension mismatch");
  for (std::size_t k = 1; k < batch.size(); ++k)
    if (batch[k] == batch[k - 1])
      throw std::invalid_argument("duplicate index in batch");
  std::copy(g_ref.begin(), g_ref.end(), out.begin());
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::uint32_t i : batch) {
    if (i >= m.n_rows) throw std::invalid_argument("batch index out of range");
    double dy = loss_derivative(p.loss, row_dot(m, i, y), p.data->labels[i]);
    double dx = loss_derivative(p.loss, row_dot(m, i, x_ref),
                                p.data->labels[i]);
    double w = inv_b * (dy - dx);
    auto cols = m.row_cols(i);
    auto vals = m.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] += w * vals[k];
  }
}

double objective(const CompositeProblem& p, std::span<const double> x) {
  const auto& m = p.data->features;
  if (x.size() != m.n_cols)
    throw std::invalid_argument("objective: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < m.n_rows; ++i)
    s += loss_value(p.loss, row_dot(m, i, x), p.data->labels[i]);
  return s / static_cast<double>(m.n_rows) + p.reg.value(x);
}

double objective_parallel(const CompositeProblem& p,
                          std::span<const double> x) {
#ifndef MS2GD_HAVE_OPENMP
  return objective(p, x);
#else
  const auto& m = p.data->features;
  if (x.size() != m.n_cols)
    throw std::invalid_argument("objective: dimension mismatch");
  constexpr std::size_t kBlock = 2048;  // fixed, so the sum tree is too
  std::size_t nblocks = (m.n_rows + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(nblocks);
       ++bi) {
    std::size_t lo = bi * kBlock;
    std::size_t hi = std::min(lo + kBlock, m.n_rows);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      s += loss_value(p.loss, row_dot(m, i, x), p.data->labels[i]);
    partial[bi] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s / static_cast<double>(m.n_rows) + p.reg.value(x);
#endif
}

}  // namespace ms2gd
