#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "ms2gd/solver.hpp"
#include "ms2gd/theory.hpp"

using namespace ms2gd;
using namespace ms2gd::theory;

TEST_CASE("alpha special values") {
  CHECK(alpha(100, 1) == 1.0);
  CHECK(alpha(100, 100) == 0.0);
  CHECK(alpha(5, 2) == doctest::Approx(0.375).epsilon(1e-16));
  CHECK_THROWS_AS(alpha(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(alpha(10, 11), std::invalid_argument);
}

TEST_CASE("rate collapses to 1/(m h mu) in the full-batch setting") {
  TheoryInputs t{.n = 50, .L = 1.0, .mu = 0.01, .b = 50, .h = 0.5, .m = 100.0};
  auto r = rate_rho(t);
  REQUIRE(r.ok);
  CHECK(r.rho == doctest::Approx(1.0 / (100.0 * 0.5 * 0.01)).epsilon(1e-16));

  // h = 1/L, m = 2 kappa, b = n -> rho = 1/2
  TheoryInputs t2{.n = 50, .L = 2.0, .mu = 0.002, .b = 50, .h = 0.5,
                  .m = 2.0 * 1000.0};
  auto r2 = rate_rho(t2);
  REQUIRE(r2.ok);
  CHECK(r2.rho == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("rate agrees with an independent long-double evaluation") {
  TheoryInputs t{.n = 100, .L = 1.0, .mu = 0.01, .b = 1, .h = 0.05,
                 .m = 500.0};
  auto r = rate_rho(t);
  REQUIRE(r.ok);
  long double a = (100.0L - 1.0L) / (1.0L * 99.0L);  // alpha(100,1) = 1
  long double hla = 4.0L * 0.05L * 1.0L * a;
  long double rho = 1.0L / (500.0L * 0.05L * 0.01L * (1.0L - hla)) +
                    hla * 501.0L / (500.0L * (1.0L - hla));
  CHECK(r.rho == doctest::Approx(static_cast<double>(rho)).epsilon(1e-14));
}

TEST_CASE("rate rejects infeasible inputs instead of returning garbage") {
  TheoryInputs t{.n = 100, .L = 1.0, .mu = 0.01, .b = 1, .h = 2.0, .m = 10.0};
  auto r = rate_rho(t);
  CHECK(!r.ok);  // h > 1/L
  t.h = 0.3;     // 4 h L alpha = 1.2 >= 1
  r = rate_rho(t);
  CHECK(!r.ok);
  CHECK(!r.violation.empty());
  t.h = {};
  CHECK_THROWS_AS(rate_rho(t), std::invalid_argument);
}

TEST_CASE("optimal parameters round-trip through the rate") {
  RandomStream rng(90);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 100 + rng.next_below(100000);
    double kappa = 10.0 + rng.next_unit() * static_cast<double>(n);
    double rho = 0.05 + 0.9 * rng.next_unit();
    std::size_t b = 1 + rng.next_below(std::min<std::size_t>(n, 64));
    TheoryInputs t{.n = n, .L = 1.0, .mu = 1.0 / kappa, .b = b,
                   .rho_target = rho};
    OptimalParams opt;
    try {
      opt = optimal_params(t);
    } catch (const std::invalid_argument&) {
      continue;  // rho unreachable at this b; rejection is the contract
    }
    t.h = opt.h_star;
    t.m = opt.m_star;
    auto r = rate_rho(t);
    REQUIRE(r.ok);
    CHECK(r.rho == doctest::Approx(rho).epsilon(1e-6));
  }
}

TEST_CASE("h* minimizes the required inner-loop size on a grid") {
  RandomStream rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1000 + rng.next_below(100000);
    double kappa = 50.0 + rng.next_unit() * static_cast<double>(n);
    double rho = 0.1 + 0.8 * rng.next_unit();
    std::size_t b = 1 + rng.next_below(32);
    TheoryInputs t{.n = n, .L = 1.0, .mu = 1.0 / kappa, .b = b,
                   .rho_target = rho};
    OptimalParams opt;
    try {
      opt = optimal_params(t);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (opt.regime != StepsizeRegime::interior) continue;
    double m_at_h = inner_loop_size_for(opt.h_star, n, b, t.L, t.mu, rho);
    CHECK(m_at_h == doctest::Approx(opt.m_star).epsilon(1e-9));
    double hi = stepsize_upper_limit(n, b, t.L, t.mu, rho);
    for (int gp = 1; gp <= 200; ++gp) {
      double h = hi * gp / 201.0;
      double m = inner_loop_size_for(h, n, b, t.L, t.mu, rho);
      CHECK(m >= m_at_h * (1.0 - 1e-6));
    }
  }
}

TEST_CASE("capped regime activates when the interior stepsize exceeds 1/L") {
  // near-full batch: alpha tiny, interior h_tilde huge -> cap at 1/L
  TheoryInputs t{.n = 1000, .L = 1.0, .mu = 0.01, .b = 999,
                 .rho_target = 0.5};
  auto opt = optimal_params(t);
  CHECK(opt.regime == StepsizeRegime::capped_at_inv_l);
  CHECK(opt.h_star == 1.0);
  double a = alpha(1000, 999);
  double expect = (100.0 + 4.0 * a) / (0.5 - 4.0 * a * 1.5);
  CHECK(opt.m_star == doctest::Approx(expect).epsilon(1e-12));
  t.h = opt.h_star;
  t.m = opt.m_star;
  auto r = rate_rho(t);
  REQUIRE(r.ok);
  CHECK(r.rho == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("b0 threshold approaches 8(e+1) for large n and kappa") {
  double b0 = b0_threshold(1000000, 10000.0, 1.0 / std::exp(1.0));
  CHECK(std::fabs(b0 - 29.75) / 29.75 < 0.01);
}

TEST_CASE("fixed-accuracy recipe achieves the target rate") {
  const double e = std::exp(1.0);
  for (std::size_t b = 1; b <= 29; ++b) {
    TheoryInputs t{.n = 10000, .L = 1.0, .mu = 1e-4, .b = b,
                   .epsilon = 1e-3};
    auto rec = corollary_recipe(t);
    CHECK(rec.k == 7);  // ceil(log 1000)
    CHECK(rec.rho == doctest::Approx(1.0 / e).epsilon(1e-16));
    CHECK(rec.total_work_units ==
          (10000.0 + 2.0 * b * rec.m_b) * rec.k);
    t.h = rec.h_b;
    t.m = rec.m_b;
    auto r = rate_rho(t);
    REQUIRE(r.ok);
    CHECK(r.rho <= 1.0 / e + 1e-6);

    // total batch work stays under the closed b-independent bound
    double kap = 1e4;
    double bound = std::ceil(
        8.0 * e * kap *
        ((e + 1.0) + std::sqrt(b / (4.0 * kap) + (1.0 + e) * (1.0 + e))));
    CHECK(static_cast<double>(b) * rec.m_b <= bound);
    CHECK(rec.b_within_guarantee);
  }
}

TEST_CASE("batch work b*m* does not grow with b in the matched regime") {
  // sampled with kappa of the same order as n, where the interior regime's
  // monotone-work property holds
  RandomStream rng(92);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 10000 + rng.next_below(1000000);
    double ratio = 0.05 + 3.95 * rng.next_unit();
    double kappa = ratio * static_cast<double>(n);
    double rho = 0.1 + 0.8 * rng.next_unit();
    double prev = INFINITY;
    for (std::size_t b = 1; b <= 32; ++b) {
      TheoryInputs t{.n = n, .L = 1.0, .mu = 1.0 / kappa, .b = b,
                     .rho_target = rho};
      auto opt = optimal_params(t);
      if (opt.regime != StepsizeRegime::interior) break;
      double work = static_cast<double>(b) * opt.m_star;
      CHECK(work <= prev * (1.0 + 1e-12));
      prev = work;
    }
  }
}

TEST_CASE("variance identity: exact subset enumeration") {
  // equal vectors -> zero deviation
  std::vector<std::vector<double>> same(5, {1.0, -2.0});
  auto c = variance_lemma_check(same, 2);
  CHECK(c.lhs == doctest::Approx(0.0));

  // full subset -> zero lhs
  RandomStream rng(93);
  std::vector<std::vector<double>> xi(6, std::vector<double>(3));
  for (auto& v : xi)
    for (auto& x : v) x = rng.next_gaussian();
  auto full = variance_lemma_check(xi, 6);
  CHECK(std::fabs(full.lhs) <= 1e-12);
  CHECK(full.rhs == 0.0);

  // random families: lhs <= rhs always
  for (int fam = 0; fam < 200; ++fam) {
    std::size_t n = 2 + rng.next_below(7);
    std::size_t d = 1 + rng.next_below(4);
    std::vector<std::vector<double>> f(n, std::vector<double>(d));
    for (auto& v : f)
      for (auto& x : v) x = 2.0 * rng.next_gaussian();
    std::size_t tau = 1 + rng.next_below(n);
    auto chk = variance_lemma_check(f, tau);
    CHECK(chk.lhs <= chk.rhs + 1e-12);
  }
}

TEST_CASE("input validation") {
  TheoryInputs t{.n = 1, .L = 1.0, .mu = 0.1, .b = 1};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = {.n = 100, .L = 1.0, .mu = 0.0, .b = 1};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = {.n = 100, .L = 1.0, .mu = 2.0, .b = 1};  // mu > L
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = {.n = 100, .L = 1.0, .mu = 0.1, .b = 101};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("report fills exactly what the inputs determine") {
  TheoryInputs t{.n = 1000, .L = 1.0, .mu = 0.01, .b = 4};
  auto rep = report(t);
  CHECK(rep.alpha == doctest::Approx(alpha(1000, 4)));
  CHECK(!rep.rate);
  CHECK(!rep.optimal);
  CHECK(!rep.recipe);
  t.h = 0.1;
  t.m = 200.0;
  t.rho_target = 0.5;
  t.epsilon = 0.01;
  rep = report(t);
  CHECK(rep.rate.has_value());
  CHECK(rep.optimal.has_value());
  CHECK(rep.recipe.has_value());
}
