#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ms2gd::theory {

/// Variance attenuation factor alpha(b) = (n - b) / (b (n - 1)).
double alpha(std::size_t n, std::size_t b);

struct TheoryInputs {
  std::size_t n = 0;
  double L = 0.0;
  double mu = 0.0;
  std::size_t b = 1;
  std::optional<double> h;
  std::optional<double> m;  // continuous inner-loop size
  std::optional<double> rho_target;
  std::optional<double> epsilon;

  double kappa() const { return L / mu; }
  void validate() const;
};

struct RateResult {
  bool ok = false;
  double rho = 0.0;
  std::string violation;  // set when a convergence condition fails
};

/// Linear rate
///   rho = 1/(m h mu (1 - 4 h L a)) + 4 h L a (m+1) / (m (1 - 4 h L a)),
/// valid only when 0 < h <= 1/L and 4 h L alpha(b) < 1.
RateResult rate_rho(const TheoryInputs& t);

enum class StepsizeRegime { interior, capped_at_inv_l };

struct OptimalParams {
  double h_star = 0.0;
  double m_star = 0.0;       // continuous minimizer
  double m_star_ceil = 0.0;  // integer value for running solvers
  StepsizeRegime regime = StepsizeRegime::interior;
};

/// Workload-optimal (h, m) achieving a fixed target rate rho:
/// the interior stationary stepsize if it is <= 1/L, else h = 1/L with the
/// matching m. Throws if rho is unreachable at this b.
OptimalParams optimal_params(const TheoryInputs& t);

/// m(h): the inner-loop size forced by the target rate at stepsize h.
double inner_loop_size_for(double h, std::size_t n, std::size_t b, double L,
                           double mu, double rho);

/// Largest feasible stepsize for the target rate (exclusive upper end of the
/// domain of inner_loop_size_for).
double stepsize_upper_limit(std::size_t n, std::size_t b, double L, double mu,
                            double rho);

/// Mini-batch threshold below which the interior stepsize applies.
double b0_threshold(std::size_t n, double kappa, double rho);

struct CorollaryRecipe {
  std::size_t k = 0;        // outer iterations, ceil(log(1/eps))
  double rho = 0.0;         // 1/e
  double h_b = 0.0;
  double m_b = 0.0;         // ceiled, as in the recipe
  double b0 = 0.0;
  double total_work_units = 0.0;  // (n + 2 b m_b) k
  bool b_within_guarantee = true;  // b <= 29
};

/// Fixed-accuracy parameter recipe with rho = 1/e.
CorollaryRecipe corollary_recipe(const TheoryInputs& t);

struct VarianceLemmaCheck {
  double lhs = 0.0;  // exact E || (1/tau) sum_{S} xi_i - xi_bar ||^2
  double rhs = 0.0;  // (1/(n tau)) ((n-tau)/(n-1)) sum ||xi_i||^2
};

/// Exhaustive enumeration over all C(n, tau) subsets; n <= 12.
VarianceLemmaCheck variance_lemma_check(
    const std::vector<std::vector<double>>& xi, std::size_t tau);

/// Visits every size-k subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(std::span<const std::size_t>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

struct TheoryReport {
  double alpha = 0.0;
  std::optional<RateResult> rate;
  std::optional<OptimalParams> optimal;
  std::optional<CorollaryRecipe> recipe;
  double b0 = 0.0;
};

/// Evaluates whatever the inputs determine: the rate when (h, m) are given,
/// the optimal pair when rho_target is given, the recipe when epsilon is.
TheoryReport report(const TheoryInputs& t);

}  // namespace ms2gd::theory
