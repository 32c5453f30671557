#pragma once

// Limit of rank-k spherical integrals J(mu, theta, lambda) and two
// first-principles oracles for it: the concave maximization over the
// simplex of Dirichlet weights, and the 2-d problem conditioned on the
// interlacing root of the compressed matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sphint/detail/optimize.hpp"
#include "sphint/errors.hpp"
#include "sphint/measures.hpp"

namespace sphint {

/// Sorted distinct eigenvalues with multiplicities. Indices in
/// [bulk_first, bulk_last] form the bulk; those below and above are
/// outliers whose limit weight is zero.
struct DiscreteModel {
  std::vector<double> etas;
  std::vector<std::int64_t> mult;
  std::size_t bulk_first = 0;
  std::size_t bulk_last = 0;

  static DiscreteModel make(std::vector<double> etas, std::vector<std::int64_t> mult,
                            std::size_t bulk_first, std::size_t bulk_last) {
    if (etas.size() != mult.size()) throw ShapeError("model: etas and mult differ in length");
    if (etas.empty()) throw DomainError("model: no eigenvalues");
    if (bulk_first > bulk_last || bulk_last >= etas.size()) {
      throw DomainError("model: invalid bulk range");
    }
    for (std::size_t i = 0; i < etas.size(); ++i) {
      if (!std::isfinite(etas[i])) throw DomainError("model: non-finite eigenvalue");
      if (mult[i] < 1) throw DomainError("model: multiplicities must be positive");
      if (i > 0 && !(etas[i] > etas[i - 1])) {
        throw DomainError("model: etas must be strictly increasing");
      }
    }
    return DiscreteModel{std::move(etas), std::move(mult), bulk_first, bulk_last};
  }

  std::size_t size() const { return etas.size(); }
  bool is_bulk(std::size_t i) const { return i >= bulk_first && i <= bulk_last; }
  std::size_t top_outliers() const { return etas.size() - 1 - bulk_last; }
  std::size_t bottom_outliers() const { return bulk_first; }

  std::int64_t total() const { return std::accumulate(mult.begin(), mult.end(), std::int64_t{0}); }

  /// Limit weights: N_i over the bulk count, zero on outliers.
  std::vector<double> alphas() const {
    double bulk = 0.0;
    for (std::size_t i = bulk_first; i <= bulk_last; ++i) bulk += static_cast<double>(mult[i]);
    std::vector<double> a(etas.size(), 0.0);
    for (std::size_t i = bulk_first; i <= bulk_last; ++i) {
      a[i] = static_cast<double>(mult[i]) / bulk;
    }
    return a;
  }

  SpectralMeasure bulk_measure() const {
    const auto a = alphas();
    std::vector<Atom> atoms;
    double s = 0.0;
    for (std::size_t i = bulk_first; i <= bulk_last; ++i) s += a[i];
    for (std::size_t i = bulk_first; i <= bulk_last; ++i) atoms.push_back({etas[i], a[i] / s});
    return SpectralMeasure::atoms(std::move(atoms));
  }

  /// Same spectrum under x -> -x, with indices reversed.
  DiscreteModel reflected() const {
    DiscreteModel m;
    m.etas.assign(etas.rbegin(), etas.rend());
    for (auto& e : m.etas) e = -e;
    m.mult.assign(mult.rbegin(), mult.rend());
    m.bulk_first = etas.size() - 1 - bulk_last;
    m.bulk_last = etas.size() - 1 - bulk_first;
    return m;
  }
};

/// Tilts: top is non-increasing and nonnegative, bottom is nonpositive and
/// stored from the one closest to zero (theta_{-l}) to the most negative
/// (theta_{-1}).
struct ThetaSpec {
  std::vector<double> top;
  std::vector<double> bottom;

  void validate() const {
    for (std::size_t i = 0; i < top.size(); ++i) {
      if (!std::isfinite(top[i]) || top[i] < 0.0) throw DomainError("thetas: top must be >= 0");
      if (i > 0 && top[i] > top[i - 1]) throw DomainError("thetas: top must be non-increasing");
    }
    for (std::size_t i = 0; i < bottom.size(); ++i) {
      if (!std::isfinite(bottom[i]) || bottom[i] > 0.0) {
        throw DomainError("thetas: bottom must be <= 0");
      }
      if (i > 0 && bottom[i] > bottom[i - 1]) {
        throw DomainError("thetas: bottom must be non-increasing");
      }
    }
  }
};

/// Outlier locations: top is non-increasing and at or above the right
/// edge; bottom is non-increasing (lambda_{-l} first) and at or below the
/// left edge.
struct OutlierSpec {
  std::vector<double> top;
  std::vector<double> bottom;

  void validate(const SupportEdges& e) const {
    for (std::size_t i = 0; i < top.size(); ++i) {
      if (!std::isfinite(top[i]) || top[i] < e.right) {
        throw DomainError("lambdas: top outliers must lie at or above the right edge");
      }
      if (i > 0 && top[i] > top[i - 1]) throw DomainError("lambdas: top must be non-increasing");
    }
    for (std::size_t i = 0; i < bottom.size(); ++i) {
      if (!std::isfinite(bottom[i]) || bottom[i] > e.left) {
        throw DomainError("lambdas: bottom outliers must lie at or below the left edge");
      }
      if (i > 0 && bottom[i] > bottom[i - 1]) {
        throw DomainError("lambdas: bottom must be non-increasing");
      }
    }
  }
};

enum class Regime { TiltBinds, InverseBinds, ZeroTilt };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::TiltBinds: return "tilt-binds";
    case Regime::InverseBinds: return "inverse-binds";
    case Regime::ZeroTilt: return "zero-tilt";
  }
  return "?";
}

struct JBreakdown {
  double value = 0.0;
  double v_star = 0.0;
  Regime regime = Regime::ZeroTilt;
};

namespace detail {

inline void check_tilt_side(const SupportEdges& e, double theta, double lambda) {
  if (!std::isfinite(theta) || !std::isfinite(lambda)) {
    throw DomainError("theta and lambda must be finite");
  }
  if (theta > 0.0 && lambda < e.right) {
    throw DomainError("positive theta requires lambda >= right support edge");
  }
  if (theta < 0.0 && lambda > e.left) {
    throw DomainError("negative theta requires lambda <= left support edge");
  }
}

inline Regime regime_of(const SpectralMeasure& mu, const SupportEdges& e, double theta,
                        double lambda) {
  if (theta > 0.0) {
    const double g = lambda > e.right ? stieltjes(mu, lambda) : stieltjes_edge_limit(mu, Side::Right);
    return g <= theta ? Regime::TiltBinds : Regime::InverseBinds;
  }
  const double g = lambda < e.left ? stieltjes(mu, lambda) : stieltjes_edge_limit(mu, Side::Left);
  return g >= theta ? Regime::TiltBinds : Regime::InverseBinds;
}

}  // namespace detail

/// v = lambda when the tilt binds, G^{-1}(theta) otherwise.
inline double v_star(const SpectralMeasure& mu, double theta, double lambda) {
  if (theta == 0.0) throw DomainError("v_star: theta must be nonzero");
  const auto e = support_edges(mu);
  detail::check_tilt_side(e, theta, lambda);
  return detail::regime_of(mu, e, theta, lambda) == Regime::TiltBinds
             ? lambda
             : stieltjes_inverse(mu, theta);
}

/// J(mu, theta, lambda) without the beta/2 prefactor.
inline JBreakdown j_one(const SpectralMeasure& mu, double theta, double lambda) {
  const auto e = support_edges(mu);
  if (theta == 0.0) {
    if (!std::isfinite(lambda)) throw DomainError("j_one: lambda must be finite");
    return {0.0, kInf, Regime::ZeroTilt};
  }
  detail::check_tilt_side(e, theta, lambda);
  const Regime regime = detail::regime_of(mu, e, theta, lambda);
  const double v = regime == Regime::TiltBinds ? lambda : stieltjes_inverse(mu, theta);
  double value = theta * lambda - std::log(std::abs(theta)) - log_potential(mu, v) - 1.0;
  if (v != lambda) value += (v - lambda) * stieltjes(mu, v);
  return {value, v, regime};
}

/// Sum of j_one over paired top and bottom tilts.
inline double j_multi(const SpectralMeasure& mu, const ThetaSpec& thetas,
                      const OutlierSpec& lambdas) {
  if (thetas.top.size() != lambdas.top.size() || thetas.bottom.size() != lambdas.bottom.size()) {
    throw ShapeError("j_multi: thetas and lambdas differ in shape");
  }
  thetas.validate();
  lambdas.validate(support_edges(mu));
  double s = 0.0;
  for (std::size_t i = 0; i < thetas.top.size(); ++i) s += j_one(mu, thetas.top[i], lambdas.top[i]).value;
  for (std::size_t i = 0; i < thetas.bottom.size(); ++i) {
    s += j_one(mu, thetas.bottom[i], lambdas.bottom[i]).value;
  }
  return s;
}

/// theta * sum eta_i gamma_i + sum alpha_i ln(gamma_i / alpha_i).
inline double simplex_objective(const DiscreteModel& model, double theta,
                                const std::vector<double>& gamma) {
  if (gamma.size() != model.size()) throw ShapeError("simplex_objective: gamma has wrong length");
  const auto a = model.alphas();
  const double top = model.etas.back();
  double lin = 0.0, mass = 0.0, ent = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    lin += (model.etas[i] - top) * gamma[i];
    mass += gamma[i];
    if (a[i] > 0.0) ent += a[i] * std::log(gamma[i] / a[i]);
  }
  return theta * (top * mass + lin) + ent;
}

struct SimplexSolution {
  double value = 0.0;
  std::vector<double> gamma;
  double kkt_residual = 0.0;
};

/// Maximizer of simplex_objective over the probability simplex for
/// theta >= 0. Bulk weights are alpha_i / (nu - theta eta_i); any mass left
/// over when nu = theta eta_top goes to the top outlier.
inline SimplexSolution simplex_solve_1d(const DiscreteModel& model, double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw DomainError("simplex_oracle_1d: theta must be finite and >= 0");
  }
  const std::size_t n = model.size();
  const auto a = model.alphas();
  if (theta == 0.0) return {0.0, a, 0.0};
  const std::size_t t = n - 1;
  const double top = model.etas[t];
  const bool top_is_outlier = !model.is_bulk(t);

  // bulk sum as a function of s = nu - theta * eta_top
  auto h = [&](double s, double* deriv) {
    double f = 0.0, df = 0.0;
    for (std::size_t i = model.bulk_first; i <= model.bulk_last; ++i) {
      const double d = s + theta * (top - model.etas[i]);
      f += a[i] / d;
      df -= a[i] / (d * d);
    }
    if (deriv) *deriv = df;
    return f - 1.0;
  };

  std::vector<double> gamma(n, 0.0);
  double s = 0.0;
  if (top_is_outlier && h(0.0, nullptr) <= 0.0) {
    s = 0.0;
  } else {
    double lo = 0.0, hi = 1.0;
    // the top bulk atom alone would put the root at its weight
    s = std::clamp(a[model.bulk_last], 1e-300, 1.0);
    for (int it = 0; it < 200; ++it) {
      double d = 0.0;
      const double f = h(s, &d);
      if (f > 0.0) {
        lo = s;
      } else {
        hi = s;
      }
      if (f == 0.0 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
      double next = s - f / d;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-16 * s) {
        s = next;
        break;
      }
      s = next;
    }
  }
  double mass = 0.0;
  for (std::size_t i = model.bulk_first; i <= model.bulk_last; ++i) {
    gamma[i] = a[i] / (s + theta * (top - model.etas[i]));
    mass += gamma[i];
  }
  if (top_is_outlier && s == 0.0) gamma[t] = std::max(0.0, 1.0 - mass);
  double total = std::accumulate(gamma.begin(), gamma.end(), 0.0);
  const double residual = std::abs(total - 1.0);
  if (!(residual <= 1e-10)) {
    throw ConvergenceError("simplex_oracle_1d: KKT residual " + std::to_string(residual));
  }
  return {simplex_objective(model, theta, gamma), gamma, residual};
}

/// Supremum of the Dirichlet-weight variational problem. Negative theta is
/// handled by reflecting the spectrum.
inline double simplex_oracle_1d(const DiscreteModel& model, double theta) {
  if (theta < 0.0) return simplex_solve_1d(model.reflected(), -theta).value;
  return simplex_solve_1d(model, theta).value;
}

/// Roots of sum gamma_i / (chi - eta_i) in each gap between consecutive
/// etas. A zero weight at a gap endpoint can push the root onto it.
inline std::vector<double> interlacing_roots(const DiscreteModel& model,
                                             const std::vector<double>& gamma) {
  const std::size_t n = model.size();
  if (gamma.size() != n) throw ShapeError("interlacing_roots: gamma has wrong length");
  double total = 0.0;
  for (double g : gamma) {
    if (!(g >= 0.0)) throw DomainError("interlacing_roots: weights must be nonnegative");
    total += g;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("interlacing_roots: weights must sum to 1");

  auto f = [&](double chi) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (gamma[i] > 0.0) s += gamma[i] / (chi - model.etas[i]);
    }
    return s;
  };
  std::vector<double> roots;
  roots.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double lo = model.etas[j], hi = model.etas[j + 1];
    if (gamma[j] == 0.0 && f(lo) <= 0.0) {
      roots.push_back(lo);
      continue;
    }
    if (gamma[j + 1] == 0.0 && f(hi) >= 0.0) {
      roots.push_back(hi);
      continue;
    }
    roots.push_back(detail::bisect_decreasing(f, lo, hi));
  }
  return roots;
}

namespace detail {

inline std::vector<double> softmax(const std::vector<double>& z) {
  // last logit pinned at zero
  std::vector<double> g(z.size() + 1);
  double m = 0.0;
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (g[i] = std::exp(z[i] - m));
  s += (g.back() = std::exp(-m));
  for (auto& v : g) v /= s;
  return g;
}

inline std::vector<double> logits(const std::vector<double>& gamma) {
  std::vector<double> z(gamma.size() - 1);
  const double last = std::log(std::max(gamma.back(), 1e-300));
  for (std::size_t i = 0; i + 1 < gamma.size(); ++i) {
    z[i] = std::log(std::max(gamma[i], 1e-300)) - last;
  }
  return z;
}

}  // namespace detail

/// Value of the 2-d conditional problem: J(mu, theta2, chi(gamma)) plus the
/// 1-d objective with theta1, maximized over gamma by multi-start
/// Nelder-Mead on softmax logits. chi is the interlacing root in the top
/// gap, or the top eigenvalue itself when its multiplicity is at least 2.
inline double conditional_oracle_2d(const DiscreteModel& model, double theta1, double theta2) {
  if (!(theta1 >= theta2 && theta2 >= 0.0) || !std::isfinite(theta1)) {
    throw DomainError("conditional_oracle_2d: need theta1 >= theta2 >= 0");
  }
  const std::size_t n = model.size();
  const std::size_t t = n - 1;
  const bool repeated_top = model.mult[t] >= 2;
  if (!repeated_top) {
    if (model.top_outliers() < 2 || model.mult[t - 1] != 1) {
      throw DomainError(
          "conditional_oracle_2d: need two simple top outliers or a repeated top eigenvalue");
    }
  }
  if (theta1 == 0.0) return 0.0;
  const auto mu = model.bulk_measure();
  const auto a = model.alphas();

  auto objective = [&](const std::vector<double>& gamma) {
    double chi = model.etas[t];
    if (!repeated_top) {
      // root of sum gamma_i/(chi - eta_i) in the top gap only
      auto f = [&](double x) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += gamma[i] / (x - model.etas[i]);
        return s;
      };
      chi = gamma[t] > 0.0 ? detail::bisect_decreasing(f, model.etas[t - 1], model.etas[t])
                           : model.etas[t - 1];
    }
    const double j2 = theta2 == 0.0 ? 0.0 : j_one(mu, theta2, chi).value;
    return j2 + simplex_objective(model, theta1, gamma);
  };
  std::function<double(const std::vector<double>&)> loss = [&](const std::vector<double>& z) {
    const auto g = detail::softmax(z);
    for (double v : g) {
      if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
    }
    return -objective(g);
  };

  std::vector<std::vector<double>> starts;
  {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = a[i] > 0.0 ? a[i] : 0.05;
    const double s = std::accumulate(g.begin(), g.end(), 0.0);
    for (auto& v : g) v /= s;
    starts.push_back(detail::logits(g));
  }
  {
    // warm start from the 1-d solution with a little mass on every index
    auto g = simplex_solve_1d(model, theta1).gamma;
    for (auto& v : g) v = 0.9 * v + 0.1 / static_cast<double>(n);
    starts.push_back(detail::logits(g));
  }
  std::mt19937_64 rng(0x5eed2d0ULL + n);
  std::gamma_distribution<double> gd(1.0, 1.0);
  while (starts.size() < 10) {
    std::vector<double> g(n);
    for (auto& v : g) v = gd(rng) + 1e-3;
    const double s = std::accumulate(g.begin(), g.end(), 0.0);
    for (auto& v : g) v /= s;
    starts.push_back(detail::logits(g));
  }

  double best = -std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (const auto& z0 : starts) {
    auto r = detail::nelder_mead(loss, z0, 1.0, 1e-13, 1e-9, 40000);
    // restart from the incumbent until it stops improving
    for (int k = 0; k < 8; ++k) {
      auto again = detail::nelder_mead(loss, r.x, 0.25, 1e-13, 1e-9, 40000);
      const bool improved = again.value < r.value - 1e-12;
      if (again.value <= r.value) r = again;
      if (!improved) break;
    }
    any_converged = any_converged || r.converged;
    best = std::max(best, -r.value);
  }
  if (!any_converged || !std::isfinite(best)) {
    throw ConvergenceError("conditional_oracle_2d: no start converged");
  }
  return best;
}

/// Residual of J(h) - J(l) = sum alpha_i ln(|eta_i - l| / |eta_i - h|) + theta (h - l)
/// for a discrete measure with both points in the tilt-binding regime.
inline double transport_identity_check(const SpectralMeasure& mu, double theta, double lam_low,
                                       double lam_high) {
  const auto* d = std::get_if<DiscreteAtoms>(&mu.law());
  if (!d) throw DomainError("transport_identity_check: measure must be discrete");
  const auto e = support_edges(mu);
  if (!(lam_low >= e.right && lam_high >= lam_low)) {
    throw DomainError("transport_identity_check: need right edge <= lam_low <= lam_high");
  }
  if (!(theta > 0.0) || !(lam_low > e.right) || stieltjes(mu, lam_low) > theta) {
    throw DomainError("transport_identity_check: tilt must bind at lam_low");
  }
  const double jl = j_one(mu, theta, lam_low).value;
  const double jh = j_one(mu, theta, lam_high).value;
  double logs = 0.0;
  for (const auto& at : d->atoms) {
    logs += at.weight * std::log(std::abs(at.position - lam_low) / std::abs(at.position - lam_high));
  }
  return std::abs(jh - jl - logs - theta * (lam_high - lam_low));
}

}  // namespace sphint
