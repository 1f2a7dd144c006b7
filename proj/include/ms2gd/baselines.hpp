#pragma once

#include "ms2gd/solver.hpp"

namespace ms2gd {

enum class BaselineId { sgd_const, sgd_decay, gd, fista, sag, s2gd };

BaselineId baseline_from_name(const std::string& name);
std::string baseline_name(BaselineId id);

struct BaselineConfig {
  BaselineId solver = BaselineId::fista;
  double h0 = 0.0;            // initial / constant stepsize
  std::size_t epochs = 1;     // effective passes (FISTA/GD: iterations)
  std::uint64_t seed = 0;
  std::size_t m = 0;          // s2gd only; 0 = default 0.1 n
  std::size_t checkpoint_every = 0;  // steps between records (SGD/SAG); 0 = once per pass
  int threads = 1;
};

/// Proximal SGD. sgd_const keeps h = h0; sgd_decay uses h = h0/(pass+1),
/// where pass is the number of completed effective passes.
SolveResult solve_sgd(const CompositeProblem& p, const BaselineConfig& cfg,
                      std::span<const double> x0);

/// FISTA; BaselineId::gd runs the same loop with the momentum disabled
/// (plain proximal gradient descent / ISTA).
SolveResult solve_fista(const CompositeProblem& p, const BaselineConfig& cfg,
                        std::span<const double> x0);

/// Proximal SAG with an O(n) table of scalar derivatives phi_i'.
SolveResult solve_sag(const CompositeProblem& p, const BaselineConfig& cfg,
                      std::span<const double> x0);

/// S2GD = mS2GD with b = 1; named baseline for reporting.
SolveResult solve_s2gd(const CompositeProblem& p, const BaselineConfig& cfg,
                       std::span<const double> x0);

SolveResult solve_baseline(const CompositeProblem& p,
                           const BaselineConfig& cfg,
                           std::span<const double> x0);

}  // namespace ms2gd
