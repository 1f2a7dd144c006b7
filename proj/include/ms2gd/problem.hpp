#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ms2gd/csr.hpp"

namespace ms2gd {

enum class RegId { none, l1, l2 };

/// Scalar loss phi_i(u) with u = a_i^T x.
double loss_value(LossId loss, double u, double label);
double loss_derivative(LossId loss, double u, double label);

struct Regularizer {
  RegId id = RegId::none;
  double lambda = 0.0;

  double value(std::span<const double> x) const;
  bool separable() const { return true; }  // none / l1 / l2 all are
};

/// P = F + R over a sparse dataset, with the constants the solvers and the
/// rate theory need. Immutable after construction; the dataset is borrowed.
struct CompositeProblem {
  const Dataset* data = nullptr;
  LossId loss = LossId::logistic;
  Regularizer reg;
  double L = 0.0;   // max_i L_i
  double mu = 0.0;  // strong convexity of P; 0 = unknown
  std::vector<double> lipschitz_per_row;

  std::size_t n() const { return data->n_examples(); }
  std::size_t dim() const { return data->dim(); }
  double strong_convexity() const;  // throws if mu was never supplied
};

/// mu defaults to reg.lambda for l2; for other regularizers it must be
/// given explicitly or the problem carries mu = 0 (rejected by theory ops).
CompositeProblem make_problem(const Dataset& data, LossId loss, Regularizer reg,
                              std::optional<double> mu = std::nullopt);

/// g = (1/n) sum_i phi_i'(a_i^T x) a_i, rows accumulated in index order.
/// Does not include the regularizer. Optionally returns the margins a_i^T x.
void full_gradient(const CompositeProblem& p, std::span<const double> x,
                   std::span<double> g, std::vector<double>* margins = nullptr);

/// OpenMP variant; per-thread partial gradients combined in ascending
/// thread order. Bit-stable for a fixed thread count.
void full_gradient_parallel(const CompositeProblem& p,
                            std::span<const double> x, std::span<double> g,
                            std::vector<double>* margins = nullptr);

/// G = g_ref + (1/b) sum_{i in batch} [phi_i'(a_i^T y) - phi_i'(a_i^T x_ref)] a_i.
/// batch indices must be distinct and nonempty.
void stochastic_estimate(const CompositeProblem& p, std::span<const double> y,
                         std::span<const double> x_ref,
                         std::span<const double> g_ref,
                         std::span<const std::uint32_t> batch,
                         std::span<double> out);

/// P(x) = (1/n) sum_i phi_i(a_i^T x) + R(x).
double objective(const CompositeProblem& p, std::span<const double> x);

/// OpenMP variant using fixed-size row blocks; result is independent of the
/// thread count.
double objective_parallel(const CompositeProblem& p, std::span<const double> x);

}  // namespace ms2gd
