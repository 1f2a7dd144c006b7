#include "ms2gd/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ms2gd {

namespace {

// x^e for e >= 0 by squaring; stable for x in (0, 1].
double ipow(double x, std::uint64_t e) {
  double r = 1.0;
  while (e) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

}  // namespace

double prox_step_scalar(const Regularizer& reg, double h, double z) {
  if (h <= 0.0) throw std::invalid_argument("prox_step: h must be positive");
  switch (reg.id) {
    case RegId::none:
      return z;
    case RegId::l2:
      return z / (1.0 + reg.lambda * h);
    case RegId::l1: {
      double t = reg.lambda * h;
      double a = std::fabs(z) - t;
      return a > 0.0 ? std::copysign(a, z) : 0.0;
    }
  }
  throw std::invalid_argument("unknown regularizer id");
}

void prox_step(const Regularizer& reg, double h, std::span<const double> z,
               std::span<double> out) {
  if (h <= 0.0) throw std::invalid_argument("prox_step: h must be positive");
  if (out.size() != z.size())
    throw std::invalid_argument("prox_step: size mismatch");
  switch (reg.id) {
    case RegId::none:
      std::copy(z.begin(), z.end(), out.begin());
      return;
    case RegId::l2: {
      double s = 1.0 / (1.0 + reg.lambda * h);
      for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j] * s;
      return;
    }
    case RegId::l1: {
      double t = reg.lambda * h;
      for (std::size_t j = 0; j < z.size(); ++j) {
        double a = std::fabs(z[j]) - t;
        out[j] = a > 0.0 ? std::copysign(a, z[j]) : 0.0;
      }
      return;
    }
  }
  throw std::invalid_argument("unknown regularizer id");
}

double prox_tau_naive(const LazyProxQuery& q) {
  double y = q.y_j;
  for (std::uint64_t s = 0; s < q.tau; ++s)
    y = prox_step_scalar(q.reg, q.h, y - q.h * q.g_j);
  return y;
}

double prox_tau_l2(const LazyProxQuery& q) {
  if (q.h <= 0.0) throw std::invalid_argument("prox_tau: h must be positive");
  if (q.reg.lambda == 0.0)
    return q.y_j - static_cast<double>(q.tau) * q.h * q.g_j;
  double beta = 1.0 / (1.0 + q.reg.lambda * q.h);
  double bt = ipow(beta, q.tau);
  return bt * q.y_j - (q.h * beta / (1.0 - beta)) * (1.0 - bt) * q.g_j;
}

double prox_tau_l1(const LazyProxQuery& q) {
  if (q.h <= 0.0) throw std::invalid_argument("prox_tau: h must be positive");
  double lam = q.reg.lambda;
  if (lam <= 0.0)
    throw std::invalid_argument("prox_tau_l1 requires lambda > 0");
  if (q.tau == 0) return q.y_j;
  const double y = q.y_j, g = q.g_j, h = q.h;
  const double tau = static_cast<double>(q.tau);
  const double big = (lam + g) * h;   // M
  const double sml = -(lam - g) * h;  // m, with M - m = 2 lambda h > 0
  if (g >= lam) {
    // M >= 2 lambda h > 0; never divide by sml here
    if (std::fabs(big) < 1e-300) return prox_tau_naive(q);
    double p = std::floor(y / big);
    if (p >= tau) return y - tau * big;
    double pp = std::max(p, 0.0);
    return std::min(y - pp * big, sml) - (tau - pp) * sml;
  }
  if (g <= -lam) {
    // sml <= -2 lambda h < 0; real-quotient floor, negative denominator
    if (std::fabs(sml) < 1e-300) return prox_tau_naive(q);
    double qq = std::floor(y / sml);
    if (qq >= tau) return y - tau * sml;
    double qp = std::max(qq, 0.0);
    return std::max(y - qp * sml, big) - (tau - qp) * big;
  }
  // -lambda < g < lambda: the threshold absorbs
  if (y >= 0.0) return std::max(y - tau * big, 0.0);
  return std::min(y - tau * sml, 0.0);
}

double prox_tau(const LazyProxQuery& q) {
  switch (q.reg.id) {
    case RegId::none:
      return q.y_j - static_cast<double>(q.tau) * q.h * q.g_j;
    case RegId::l2:
      return prox_tau_l2(q);
    case RegId::l1:
      return prox_tau_l1(q);
  }
  throw std::invalid_argument("unknown regularizer id");
}

}  // namespace ms2gd
