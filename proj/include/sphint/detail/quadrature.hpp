#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "sphint/errors.hpp"

namespace sphint::detail {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < (N + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      // recompute derivative at the converged node
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= N; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (x * p1 - p0) / (x * x - 1.0);
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[N - 1 - i] = x;
      weights[i] = w;
      weights[N - 1 - i] = w;
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }

  template <class F>
  double apply(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += weights[i] * f(c + h * nodes[i]);
    return s * h;
  }
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
QuadResult adaptive_gl_step(F& f, double a, double b, double whole, double tol,
                            int depth) {
  const auto& rule = GaussLegendre<20>::instance();
  const double m = 0.5 * (a + b);
  const double left = rule.apply(f, a, m);
  const double right = rule.apply(f, m, b);
  const double err = std::abs(left + right - whole);
  if (err <= tol || depth <= 0 || !(b - a > 1e-15 * (std::abs(a) + std::abs(b)))) {
    return {left + right, err};
  }
  auto l = adaptive_gl_step(f, a, m, left, 0.5 * tol, depth - 1);
  auto r = adaptive_gl_step(f, m, b, right, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

/// Adaptive 20-point Gauss-Legendre on [a, b]. Each panel is bisected until
/// the two-halves estimate agrees with the whole-panel one. Integrable
/// endpoint singularities (log, inverse square root) are handled by the
/// refinement; interior singular points must be passed as a split.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                     int max_depth = 60) {
  if (a == b) return {};
  const auto& rule = GaussLegendre<20>::instance();
  double whole = rule.apply(f, a, b);
  return adaptive_gl_step(f, a, b, whole, abs_tol, max_depth);
}

/// integrate() that throws NumericalError when the estimated error exceeds
/// `required`.
/// Integral over [a, b] of f with an integrable log singularity at `at`
/// (a or b). The cubic substitution x = at +- (b - a) u^3 turns log|x - at|
/// into u^2 log u, which the Gauss-Legendre refinement handles quickly.
template <class F>
QuadResult integrate_log_endpoint(F&& f, double a, double b, double at, double abs_tol = 1e-12) {
  const double w = b - a;
  const double sign = at == a ? 1.0 : -1.0;
  auto g = [&](double u) { return 3.0 * w * u * u * f(at + sign * w * u * u * u); };
  return integrate(g, 0.0, 1.0, abs_tol);
}

template <class F>
double integrate_checked(F&& f, double a, double b, double required,
                         const char* what) {
  auto r = integrate(f, a, b, 0.1 * required);
  if (!std::isfinite(r.value) || r.error > required) {
    throw NumericalError(std::string(what) + ": quadrature did not converge");
  }
  return r.value;
}

}  // namespace sphint::detail
