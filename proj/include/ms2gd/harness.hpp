#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ms2gd/baselines.hpp"
#include "ms2gd/solver.hpp"

namespace ms2gd {

/// One solver entry in an experiment. `name` selects ms2gd or a baseline;
/// the mS2GD-only fields are ignored for baselines (h doubles as h0).
struct SolverSpec {
  std::string name = "ms2gd";
  std::size_t b = 1;
  std::size_t m = 0;  // 0 = ceil(0.1 n)
  double h = 0.0;     // 0 = 1/L
  std::size_t epochs = 10;
  bool lazy = false;
  std::size_t checkpoint_every = 0;
  int threads = 1;
};

enum class RefPolicy { none, fista_long, file };

struct ExperimentSpec {
  std::string dataset_path;
  LossId loss = LossId::logistic;
  Regularizer reg;
  std::optional<double> mu;
  bool normalize_rows = false;
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds = {0};
  RefPolicy ref = RefPolicy::none;
  std::string ref_file;
  std::string out_dir;  // empty = in-memory only, no files written
};

struct TraceOutput {
  std::string solver;
  std::uint64_t seed = 0;
  RunTrace trace;
  std::optional<double> ref_value;
  std::string csv_path;
  bool failed = false;
  std::string error;
};

/// Runs every (solver, seed) pair; when out_dir is set, writes one CSV per
/// trace plus manifest.json echoing all inputs and per-run status.
std::vector<TraceOutput> run_experiment(const ExperimentSpec& spec);
std::vector<TraceOutput> run_experiment(const ExperimentSpec& spec,
                                        const CompositeProblem& problem);

/// Rebuilds an ExperimentSpec from a manifest.json written by run_experiment;
/// re-running it reproduces the CSVs byte for byte except wall_seconds.
ExperimentSpec experiment_from_manifest(const std::string& manifest_path);

struct TuneResult {
  std::string solver;
  double best_h = 0.0;
  double best_objective = 0.0;
};

/// Best-in-hindsight constant stepsize per solver: runs each grid point
/// under the pass budget and keeps the h with the lowest final objective,
/// ties broken toward smaller h. Throws if every grid point diverged.
std::vector<TuneResult> tune_stepsize(const ExperimentSpec& spec,
                                      const CompositeProblem& problem,
                                      const std::vector<double>& grid,
                                      double budget_passes);

/// Squared-loss + l1 problem over a synthetic banded blur operator:
/// symmetric Gaussian-profile band matrix A (n x n), sparse ground truth,
/// observations b = A x_true + N(0, sigma^2). Objective normalized by n.
struct LassoInstance {
  std::shared_ptr<Dataset> data;
  CompositeProblem problem;
  std::vector<double> x_true;
};
LassoInstance lasso_synthetic(std::size_t n, std::size_t band,
                              double noise_sigma, double lambda,
                              std::uint64_t seed);

/// Sparse unit-row-norm binary classification data with planted weights;
/// used by benchmarks and the test harness.
Dataset make_sparse_logistic_dataset(std::size_t n, std::size_t d,
                                     std::size_t nnz_per_row,
                                     std::uint64_t seed);

/// Long FISTA reference: runs until the gradient-mapping norm at stepsize
/// 1/L drops below tol or max_iters is hit; returns the best objective seen.
double reference_minimum(const CompositeProblem& p, double tol = 1e-12,
                         std::size_t max_iters = 100000);

/// As above, cached in cache_dir keyed by a hash of the problem.
double reference_minimum_cached(const CompositeProblem& p,
                                const std::string& cache_dir);

std::uint64_t problem_hash(const CompositeProblem& p);

/// CSV schema: header effective_passes,objective,suboptimality,wall_seconds;
/// 17 significant digits (override via MS2GD_TRACE_DIGITS), '.' decimal
/// point regardless of locale. suboptimality is blank without a reference.
void write_trace_csv(const std::string& path, const RunTrace& trace,
                     std::optional<double> ref_value);

}  // namespace ms2gd
