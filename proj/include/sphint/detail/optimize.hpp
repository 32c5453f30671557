#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "sphint/errors.hpp"

namespace sphint::detail {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the minimum of a unimodal function on [a, b].
/// Stops when the bracket is below `xtol` relative to its location.
template <class F>
ScalarOptimum golden_section_min(F&& f, double a, double b, double xtol = 1e-12,
                                 int max_iter = 500) {
  constexpr double invphi = 0.6180339887498948482;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(b - a) <= xtol * (1.0 + std::abs(a) + std::abs(b))) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  ScalarOptimum best{c, fc};
  if (fd < best.value) best = {d, fd};
  const double fa = f(a), fb = f(b);
  if (fa < best.value) best = {a, fa};
  if (fb < best.value) best = {b, fb};
  return best;
}

template <class F>
ScalarOptimum golden_section_max(F&& f, double a, double b, double xtol = 1e-12,
                                 int max_iter = 500) {
  auto r = golden_section_min([&](double x) { return -f(x); }, a, b, xtol, max_iter);
  return {r.x, -r.value};
}

/// Bisection for a sign change of a function that is decreasing across
/// [lo, hi] (positive at lo, negative at hi). Runs to floating-point
/// resolution of the bracket.
template <class F>
double bisect_decreasing(F&& f, double lo, double hi, int max_iter = 400) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct SimplexSearchResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization of an unconstrained function of n variables.
/// Converged when the spread of simplex values falls below `ftol`
/// and the simplex diameter below `xtol`.
inline SimplexSearchResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, double step, double ftol = 1e-12,
    double xtol = 1e-10, int max_eval = 20000) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  int evals = 0;
  auto eval = [&](const std::vector<double>& p) {
    ++evals;
    double v = f(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;
  while (evals < max_eval) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(),
                      second = order[n - 1];
    double diam = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        diam = std::max(diam, std::abs(pts[i][j] - pts[best][j]));
      }
    }
    if (std::abs(vals[worst] - vals[best]) <= ftol && diam <= xtol) {
      converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;
    }
    auto along = [&](double t, std::vector<double>& out) {
      for (std::size_t j = 0; j < n; ++j)
        out[j] = centroid[j] + t * (pts[worst][j] - centroid[j]);
    };
    along(-1.0, trial);
    const double fr = eval(trial);
    if (fr < vals[best]) {
      along(-2.0, trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        vals[worst] = fe;
      } else {
        pts[worst] = trial;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = trial;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      along(outside ? -0.5 : 0.5, trial2);
      const double fc = eval(trial2);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = trial2;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j)
            pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          vals[i] = eval(pts[i]);
        }
      }
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(it - vals.begin());
  return {pts[idx], *it, evals, converged};
}

}  // namespace sphint::detail
