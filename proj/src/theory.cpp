#include "ms2gd/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace ms2gd::theory {

double alpha(std::size_t n, std::size_t b) {
  if (n < 2) throw std::invalid_argument("alpha: need n >= 2");
  if (b < 1 || b > n) throw std::invalid_argument("alpha: need 1 <= b <= n");
  return static_cast<double>(n - b) /
         (static_cast<double>(b) * static_cast<double>(n - 1));
}

void TheoryInputs::validate() const {
  if (n < 2) throw std::invalid_argument("theory: need n >= 2");
  if (L <= 0.0 || mu <= 0.0)
    throw std::invalid_argument("theory: need L > 0 and mu > 0");
  if (mu > L) throw std::invalid_argument("theory: need mu <= L");
  if (b < 1 || b > n) throw std::invalid_argument("theory: need 1 <= b <= n");
}

RateResult rate_rho(const TheoryInputs& t) {
  t.validate();
  if (!t.h || !t.m) throw std::invalid_argument("rate_rho: h and m required");
  const double h = *t.h, m = *t.m;
  if (m < 1.0) throw std::invalid_argument("rate_rho: m must be >= 1");
  if (h <= 0.0 || h > 1.0 / t.L)
    return {false, 0.0, "stepsize condition 0 < h <= 1/L violated"};
  const double a = alpha(t.n, t.b);
  const double hla = 4.0 * h * t.L * a;
  if (hla >= 1.0) return {false, 0.0, "condition 4 h L alpha(b) < 1 violated"};
  const double den = 1.0 - hla;
  double rho = 1.0 / (m * h * t.mu * den) + hla * (m + 1.0) / (m * den);
  return {true, rho, ""};
}

double inner_loop_size_for(double h, std::size_t n, std::size_t b, double L,
                           double mu, double rho) {
  const double a = alpha(n, b);
  const double den = h * mu * (rho - 4.0 * a * h * L * (rho + 1.0));
  if (den <= 0.0)
    throw std::invalid_argument("inner_loop_size_for: h outside feasible range");
  return (1.0 + 4.0 * a * h * h * L * mu) / den;
}

double stepsize_upper_limit(std::size_t n, std::size_t b, double L, double mu,
                            double rho) {
  (void)mu;
  const double a = alpha(n, b);
  if (a == 0.0) return 1.0 / L;  // b = n: only the h <= 1/L cap binds
  return std::min(1.0 / L, rho / (4.0 * a * L * (rho + 1.0)));
}

OptimalParams optimal_params(const TheoryInputs& t) {
  t.validate();
  if (!t.rho_target) throw std::invalid_argument("optimal_params: rho_target required");
  const double rho = *t.rho_target;
  if (rho <= 0.0 || rho >= 1.0)
    throw std::invalid_argument("optimal_params: need 0 < rho < 1");
  const double a = alpha(t.n, t.b);
  const double kap = t.kappa();
  OptimalParams out;
  double h_tilde = INFINITY;
  if (a > 0.0) {
    const double c = (1.0 + rho) / (rho * t.mu);
    h_tilde = std::sqrt(c * c + 1.0 / (4.0 * t.mu * a * t.L)) - c;
  }
  if (h_tilde <= 1.0 / t.L) {
    out.regime = StepsizeRegime::interior;
    out.h_star = h_tilde;
    const double inv = 1.0 + 1.0 / rho;
    out.m_star = (2.0 * kap / rho) *
                 (inv * 4.0 * a +
                  std::sqrt(4.0 * a / kap + inv * inv * 16.0 * a * a));
  } else {
    out.regime = StepsizeRegime::capped_at_inv_l;
    out.h_star = 1.0 / t.L;
    const double den = rho - 4.0 * a * (1.0 + rho);
    if (den <= 0.0)
      throw std::invalid_argument("rho unreachable at this b");
    out.m_star = (kap + 4.0 * a) / den;
  }
  out.m_star_ceil = std::ceil(out.m_star);
  return out;
}

double b0_threshold(std::size_t n, double kappa, double rho) {
  const double nn = static_cast<double>(n);
  return (8.0 * rho * nn * kappa + 8.0 * nn * kappa + 4.0 * rho * nn) /
         (rho * nn * kappa + (7.0 * rho + 8.0) * kappa + 4.0 * rho);
}

CorollaryRecipe corollary_recipe(const TheoryInputs& t) {
  t.validate();
  if (!t.epsilon) throw std::invalid_argument("corollary_recipe: epsilon required");
  const double eps = *t.epsilon;
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("corollary_recipe: need 0 < epsilon < 1");
  const double e = std::exp(1.0);
  CorollaryRecipe r;
  r.k = static_cast<std::size_t>(std::ceil(std::log(1.0 / eps)));
  if (r.k == 0) r.k = 1;
  r.rho = 1.0 / e;
  const double a = alpha(t.n, t.b);
  const double kap = t.kappa();
  if (a <= 0.0)
    throw std::invalid_argument("corollary_recipe: requires b < n");
  r.h_b = std::sqrt(std::pow((1.0 + e) / t.mu, 2) +
                    1.0 / (4.0 * t.mu * a * t.L)) -
          (1.0 + e) / t.mu;
  r.m_b = std::ceil(8.0 * e * a * kap *
                    (e + 1.0 + std::sqrt(1.0 / (4.0 * a * kap) +
                                         (1.0 + e) * (1.0 + e))));
  r.b0 = b0_threshold(t.n, kap, r.rho);
  r.total_work_units =
      (static_cast<double>(t.n) + 2.0 * static_cast<double>(t.b) * r.m_b) *
      static_cast<double>(r.k);
  r.b_within_guarantee = t.b <= 29;
  return r;
}

VarianceLemmaCheck variance_lemma_check(
    const std::vector<std::vector<double>>& xi, std::size_t tau) {
  const std::size_t n = xi.size();
  if (n == 0 || n > 12)
    throw std::invalid_argument("variance_lemma_check: need 1 <= n <= 12");
  if (tau < 1 || tau > n)
    throw std::invalid_argument("variance_lemma_check: need 1 <= tau <= n");
  const std::size_t d = xi[0].size();
  for (const auto& v : xi)
    if (v.size() != d)
      throw std::invalid_argument("variance_lemma_check: ragged input");

  std::vector<double> mean(d, 0.0);
  double sum_sq = 0.0;
  for (const auto& v : xi) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += v[j];
    for (double x : v) sum_sq += x * x;
  }
  for (double& m : mean) m /= static_cast<double>(n);

  double lhs = 0.0;
  std::size_t count = 0;
  std::vector<double> acc(d);
  for_each_subset(n, tau, [&](std::span<const std::size_t> idx) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i : idx)
      for (std::size_t j = 0; j < d; ++j) acc[j] += xi[i][j];
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double dlt = acc[j] / static_cast<double>(tau) - mean[j];
      sq += dlt * dlt;
    }
    lhs += sq;
    ++count;
  });
  lhs /= static_cast<double>(count);

  VarianceLemmaCheck out;
  out.lhs = lhs;
  out.rhs = sum_sq * static_cast<double>(n - tau) /
            (static_cast<double>(n) * static_cast<double>(tau) *
             static_cast<double>(n - 1));
  return out;
}

TheoryReport report(const TheoryInputs& t) {
  t.validate();
  TheoryReport rep;
  rep.alpha = alpha(t.n, t.b);
  if (t.h && t.m) rep.rate = rate_rho(t);
  if (t.rho_target) {
    rep.optimal = optimal_params(t);
    rep.b0 = b0_threshold(t.n, t.kappa(), *t.rho_target);
  } else {
    rep.b0 = b0_threshold(t.n, t.kappa(), 1.0 / std::exp(1.0));
  }
  if (t.epsilon) rep.recipe = corollary_recipe(t);
  return rep;
}

}  // namespace ms2gd::theory
