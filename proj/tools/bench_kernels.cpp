// Timing comparison of the serial gradient/objective kernels against their
// OpenMP variants on synthetic sparse logistic data, plus an agreement check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef MS2GD_HAVE_OPENMP
#include <omp.h>
#endif

#include "ms2gd/harness.hpp"

using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    f();
    best = std::min(best,
                    std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 50000;
  std::size_t d = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20000;
  std::size_t nnz = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 30;
  const int reps = 5;

  auto data = ms2gd::make_sparse_logistic_dataset(n, d, nnz, 42);
  auto p = ms2gd::make_problem(data, ms2gd::LossId::logistic,
                               {ms2gd::RegId::l2, 1e-4});

  ms2gd::RandomStream rng(7);
  std::vector<double> x(d);
  for (auto& v : x) v = 0.1 * rng.next_gaussian();

  std::vector<double> g_serial(d), g_par(d);
  double t_grad_s = time_best_of(reps, [&] { full_gradient(p, x, g_serial); });
  double t_grad_p =
      time_best_of(reps, [&] { full_gradient_parallel(p, x, g_par); });
  double t_obj_s = time_best_of(reps, [&] { (void)objective(p, x); });
  double t_obj_p =
      time_best_of(reps, [&] { (void)objective_parallel(p, x); });

  double grad_diff = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    grad_diff = std::max(grad_diff, std::fabs(g_serial[j] - g_par[j]));
  double obj_diff = std::fabs(objective(p, x) - objective_parallel(p, x));

#ifdef MS2GD_HAVE_OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  std::printf("n=%zu d=%zu nnz/row=%zu threads=%d (best of %d)\n", n, d, nnz,
              threads, reps);
  std::printf("%-16s %10s %10s %9s %12s\n", "kernel", "serial_ms", "omp_ms",
              "speedup", "max_abs_diff");
  std::printf("%-16s %10.3f %10.3f %8.2fx %12.3e\n", "full_gradient",
              1e3 * t_grad_s, 1e3 * t_grad_p, t_grad_s / t_grad_p, grad_diff);
  std::printf("%-16s %10.3f %10.3f %8.2fx %12.3e\n", "objective",
              1e3 * t_obj_s, 1e3 * t_obj_p, t_obj_s / t_obj_p, obj_diff);

  if (grad_diff > 1e-12 || obj_diff > 1e-12) {
    std::fprintf(stderr, "kernel disagreement exceeds 1e-12\n");
    return 2;
  }
  return 0;
}
