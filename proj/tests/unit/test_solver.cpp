#include <stdexcept>
#include <cmath>
#include <map>

#include "doctest.h"
#include "ms2gd/solver.hpp"
#include "test_util.hpp"

using namespace ms2gd;

TEST_CASE("sample_batch basics") {
  RandomStream rng(1);
  auto all = sample_batch(rng, 6, 6);
  CHECK(all == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});
  CHECK_THROWS_AS(sample_batch(rng, 4, 5), std::invalid_argument);
  CHECK_THROWS_AS(sample_batch(rng, 4, 0), std::invalid_argument);
  auto one = sample_batch(rng, 100, 3);
  CHECK(one.size() == 3);
  CHECK(one[0] < one[1]);
  CHECK(one[1] < one[2]);
}

TEST_CASE("sample_batch single-index frequencies are uniform") {
  RandomStream rng(77);
  const int draws = 40000;
  int freq[4] = {0, 0, 0, 0};
  for (int s = 0; s < draws; ++s) freq[sample_batch(rng, 4, 1)[0]]++;
  double expect = draws / 4.0;
  double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (int j = 0; j < 4; ++j)
    CHECK(std::fabs(freq[j] - expect) <= 4.0 * sigma);
}

TEST_CASE("sample_batch subset frequencies are uniform (n=5, b=2)") {
  RandomStream rng(78);
  const int draws = 100000;
  std::map<std::pair<int, int>, int> freq;
  for (int s = 0; s < draws; ++s) {
    auto b = sample_batch(rng, 5, 2);
    freq[{b[0], b[1]}]++;
  }
  CHECK(freq.size() == 10);
  double expect = draws / 10.0;
  double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (const auto& [subset, count] : freq)
    CHECK(std::fabs(count - expect) <= 4.0 * sigma);
}

TEST_CASE("sample_batch consumes exactly b engine draws") {
  RandomStream a(5), b(5);
  (void)sample_batch(a, 50, 7);
  for (int i = 0; i < 7; ++i) (void)b.next_below(50);
  // both streams must now be in the same state
  CHECK(a.next_below(1u << 30) == b.next_below(1u << 30));
}

TEST_CASE("config validation") {
  Dataset d = testutil::from_dense({{1.0}}, {0.0});
  auto p = make_problem(d, LossId::squared, {});
  std::vector<double> x0 = {1.0};
  SolverConfig cfg{.b = 1, .m = 1, .h = 1.0, .epochs = 1};
  CHECK_NOTHROW(solve_dense(p, cfg, x0));
  auto bad = cfg;
  bad.h = 0.0;
  CHECK_THROWS_AS(solve_dense(p, bad, x0), std::invalid_argument);
  bad = cfg;
  bad.b = 2;
  CHECK_THROWS_AS(solve_dense(p, bad, x0), std::invalid_argument);
  bad = cfg;
  bad.m = 0;
  CHECK_THROWS_AS(solve_dense(p, bad, x0), std::invalid_argument);
  std::vector<double> wrong_dim = {1.0, 2.0};
  CHECK_THROWS_AS(solve_dense(p, cfg, wrong_dim), std::invalid_argument);
}

TEST_CASE("b = n, m = 1, R = none is one full gradient step per epoch") {
  Dataset d = testutil::random_logistic(12, 5, 3, 50);
  auto p = make_problem(d, LossId::logistic, {});
  std::vector<double> x0(5, 0.3), g(5);
  full_gradient(p, x0, g);
  SolverConfig cfg{.b = 12, .m = 1, .h = 0.8, .epochs = 1};
  auto res = solve_dense(p, cfg, x0);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(res.x[j] == doctest::Approx(x0[j] - 0.8 * g[j]).epsilon(1e-14));
}

TEST_CASE("1-d quadratic reaches the minimizer in one step at h = 1") {
  // f(x) = 0.5 x^2 via squared loss with a = 1, label = 0
  Dataset d = testutil::from_dense({{1.0}}, {0.0});
  auto p = make_problem(d, LossId::squared, {});
  std::vector<double> x0 = {1.0};
  SolverConfig cfg{.b = 1, .m = 1, .h = 1.0, .epochs = 1};
  auto res = solve_dense(p, cfg, x0);
  CHECK(res.x[0] == 0.0);
  auto lazy = solve_lazy(p, cfg, x0);
  CHECK(lazy.x[0] == 0.0);
}

TEST_CASE("trace rows: pass zero first, strictly increasing passes") {
  Dataset d = testutil::random_logistic(30, 8, 3, 51);
  auto p = make_problem(d, LossId::logistic, {RegId::l2, 0.01});
  std::vector<double> x0(8, 0.0);
  SolverConfig cfg{.b = 3, .m = 20, .h = 0.5, .epochs = 4, .seed = 9,
                   .checkpoint_every = 5};
  auto res = solve_dense(p, cfg, x0);
  REQUIRE(!res.trace.rows.empty());
  CHECK(res.trace.rows[0].effective_passes == 0.0);
  CHECK(res.trace.rows[0].objective ==
        doctest::Approx(objective(p, x0)).epsilon(1e-15));
  for (std::size_t i = 1; i < res.trace.rows.size(); ++i)
    CHECK(res.trace.rows[i].effective_passes >
          res.trace.rows[i - 1].effective_passes);
}

TEST_CASE("work accounting matches k*n + 2b*sum(t_k)") {
  Dataset d = testutil::random_logistic(40, 10, 4, 52);
  auto p = make_problem(d, LossId::logistic, {RegId::l2, 0.01});
  std::vector<double> x0(10, 0.0);
  SolverConfig cfg{.b = 4, .m = 15, .h = 0.5, .epochs = 6, .seed = 123};
  auto res = solve_dense(p, cfg, x0);

  // replay the stream: one draw for t_k, then b draws per inner step
  RandomStream rng(cfg.seed);
  std::uint64_t work = 0;
  for (std::size_t k = 0; k < cfg.epochs; ++k) {
    work += 40;
    std::uint64_t t_k = rng.next_in_1_to(cfg.m);
    work += 2 * cfg.b * t_k;
    for (std::uint64_t skip = 0; skip < t_k * cfg.b; ++skip)
      (void)rng.next_below(40);
  }
  CHECK(res.trace.rows.back().effective_passes ==
        doctest::Approx(static_cast<double>(work) / 40.0).epsilon(1e-15));
}

TEST_CASE("determinism: equal seeds give identical runs") {
  Dataset d = testutil::random_logistic(25, 7, 3, 53);
  auto p = make_problem(d, LossId::logistic, {RegId::l1, 0.01});
  std::vector<double> x0(7, 0.0);
  SolverConfig cfg{.b = 2, .m = 12, .h = 0.4, .epochs = 3, .seed = 42};
  auto r1 = solve_dense(p, cfg, x0);
  auto r2 = solve_dense(p, cfg, x0);
  CHECK(r1.x == r2.x);
  REQUIRE(r1.trace.rows.size() == r2.trace.rows.size());
  for (std::size_t i = 0; i < r1.trace.rows.size(); ++i) {
    CHECK(r1.trace.rows[i].effective_passes ==
          r2.trace.rows[i].effective_passes);
    CHECK(r1.trace.rows[i].objective == r2.trace.rows[i].objective);
  }
  auto r3 = solve_dense(p, SolverConfig{.b = 2, .m = 12, .h = 0.4,
                                        .epochs = 3, .seed = 43},
                        x0);
  CHECK(r1.x != r3.x);
}

TEST_CASE("dense and lazy paths agree for every regularizer") {
  std::vector<double> lambdas = {0.0, 0.05};
  for (RegId id : {RegId::none, RegId::l1, RegId::l2}) {
    Dataset d = testutil::random_logistic(60, 30, 4, 54);
    auto p = make_problem(d, LossId::logistic, {id, id == RegId::none ? 0.0 : 0.05});
    std::vector<double> x0(30, 0.0);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      SolverConfig cfg{.b = 3, .m = 25, .h = 0.9, .epochs = 3, .seed = seed,
                       .checkpoint_every = 7};
      auto dense = solve_dense(p, cfg, x0);
      auto lazy = solve_lazy(p, cfg, x0);
      CHECK(testutil::linf(dense.x, lazy.x) <= 1e-10);
      REQUIRE(dense.trace.rows.size() == lazy.trace.rows.size());
      for (std::size_t i = 0; i < dense.trace.rows.size(); ++i) {
        CHECK(dense.trace.rows[i].effective_passes ==
              lazy.trace.rows[i].effective_passes);
        CHECK(std::fabs(dense.trace.rows[i].objective -
                        lazy.trace.rows[i].objective) <= 1e-10);
      }
    }
  }
}

TEST_CASE("lazy path on a fully dense problem degenerates gracefully") {
  RandomStream rng(55);
  std::vector<std::vector<double>> rows(10, std::vector<double>(10));
  std::vector<double> labels(10);
  for (auto& r : rows)
    for (auto& v : r) v = rng.next_gaussian();
  for (auto& l : labels) l = rng.next_unit() < 0.5 ? -1.0 : 1.0;
  Dataset d = testutil::from_dense(rows, labels);
  auto p = make_problem(d, LossId::logistic, {RegId::l2, 0.1});
  std::vector<double> x0(10, 0.0);
  SolverConfig cfg{.b = 2, .m = 8, .h = 0.1, .epochs = 3, .seed = 6};
  auto dense = solve_dense(p, cfg, x0);
  auto lazy = solve_lazy(p, cfg, x0);
  CHECK(testutil::linf(dense.x, lazy.x) <= 1e-12);
}

TEST_CASE("solve_ms2gd dispatches on the lazy flag") {
  Dataset d = testutil::random_logistic(20, 6, 3, 56);
  auto p = make_problem(d, LossId::logistic, {RegId::l2, 0.1});
  std::vector<double> x0(6, 0.0);
  SolverConfig cfg{.b = 2, .m = 10, .h = 0.3, .epochs = 2, .seed = 7};
  auto dense = solve_ms2gd(p, cfg, x0);
  CHECK(dense.trace.solver == "ms2gd-dense");
  cfg.lazy = true;
  auto lazy = solve_ms2gd(p, cfg, x0);
  CHECK(lazy.trace.solver == "ms2gd-lazy");
  CHECK(testutil::linf(dense.x, lazy.x) <= 1e-10);
}

TEST_CASE("solver makes progress on a strongly convex problem") {
  Dataset d = testutil::random_logistic(100, 20, 5, 57);
  normalize_rows(d);
  auto p = make_problem(d, LossId::logistic, {RegId::l2, 0.01});
  std::vector<double> x0(20, 0.0);
  SolverConfig cfg{.b = 4, .m = 30, .h = 1.0, .epochs = 8, .seed = 3};
  auto res = solve_dense(p, cfg, x0);
  CHECK(res.trace.rows.back().objective <
        0.9 * res.trace.rows.front().objective);
}
