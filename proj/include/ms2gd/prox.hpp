#pragma once

#include <cstdint>
#include <span>

#include "ms2gd/problem.hpp"

namespace ms2gd {

/// prox_{hR}(z) = argmin_x 1/2 ||x - z||^2 + h R(x), coordinate-wise for the
/// separable regularizers supported here.
void prox_step(const Regularizer& reg, double h, std::span<const double> z,
               std::span<double> out);
double prox_step_scalar(const Regularizer& reg, double h, double z);

/// One deferred prox query: coordinate value y_j last updated tau iterations
/// ago, with stored full-gradient coordinate g_j and stepsize h.
struct LazyProxQuery {
  double y_j = 0.0;
  double g_j = 0.0;
  std::uint64_t tau = 0;
  double h = 0.0;
  Regularizer reg;
};

/// Reference oracle: applies z -> prox_{hR}(z - h g_j) exactly tau times.
double prox_tau_naive(const LazyProxQuery& q);

/// Closed form for R = (lambda/2)||x||^2:
///   beta^tau y_j - (h beta / (1 - beta)) (1 - beta^tau) g_j,
/// beta = 1/(1 + lambda h). lambda = 0 returns the limit y_j - tau h g_j.
double prox_tau_l2(const LazyProxQuery& q);

/// Closed form for R = lambda ||x||_1 (lambda > 0), three-way case split on
/// g_j against +-lambda with real-quotient floors.
double prox_tau_l1(const LazyProxQuery& q);

/// Dispatches on q.reg.id (none telescopes to y_j - tau h g_j).
double prox_tau(const LazyProxQuery& q);

}  // namespace ms2gd
