#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ms2gd/problem.hpp"
#include "ms2gd/prox.hpp"

namespace ms2gd {

/// Deterministic random stream: every bounded draw consumes exactly one
/// 64-bit engine output, so the dense and lazy solver paths stay in sync.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  /// Uniform integer in [0, n), one engine draw.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }
  /// Uniform integer in [1, m], one engine draw.
  std::uint64_t next_in_1_to(std::uint64_t m) { return 1 + next_below(m); }
  /// Uniform double in [0, 1), one engine draw.
  double next_unit() { return (eng_() >> 11) * 0x1.0p-53; }
  /// Standard normal via Box-Muller, exactly two engine draws.
  double next_gaussian();

 private:
  std::mt19937_64 eng_;
};

/// Uniform size-b subset of {0,...,n-1} (Floyd's algorithm), returned in
/// ascending order. Consumes exactly b draws from the stream.
std::vector<std::uint32_t> sample_batch(RandomStream& rng, std::size_t n,
                                        std::size_t b);

struct SolverConfig {
  std::size_t b = 1;       // mini-batch size, in [1, n]
  std::size_t m = 1;       // max inner steps per epoch
  double h = 0.0;          // stepsize, > 0
  std::size_t epochs = 1;  // outer loop count
  std::uint64_t seed = 0;
  bool lazy = false;
  std::size_t checkpoint_every = 0;  // inner steps between records; 0 = epoch ends only
  int threads = 1;  // >1 enables the OpenMP gradient/objective kernels
};

struct TracePoint {
  double effective_passes = 0.0;  // work units / n
  double objective = 0.0;
  double wall_seconds = 0.0;
};

struct RunTrace {
  std::string solver;
  std::vector<TracePoint> rows;
};

struct SolveResult {
  std::vector<double> x;
  RunTrace trace;
};

/// Dense reference path: full prox step on all d coordinates per inner
/// iteration. Work accounting: n units per epoch gradient, 2b per inner step.
SolveResult solve_dense(const CompositeProblem& p, const SolverConfig& cfg,
                        std::span<const double> x0);

/// Sparse lazy path: per inner step only the batch supports are touched;
/// skipped coordinates are caught up on demand with the closed-form deferred
/// prox. Mathematically equivalent to solve_dense under the same seed.
SolveResult solve_lazy(const CompositeProblem& p, const SolverConfig& cfg,
                       std::span<const double> x0);

/// Dispatches on cfg.lazy.
SolveResult solve_ms2gd(const CompositeProblem& p, const SolverConfig& cfg,
                        std::span<const double> x0);

}  // namespace ms2gd
