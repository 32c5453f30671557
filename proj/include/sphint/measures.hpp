#pragma once

// Compactly supported spectral measures: Stieltjes transforms, their
// inverses off the support, logarithmic potentials, support edges and
// bin discretizations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "sphint/detail/optimize.hpp"
#include "sphint/detail/quadrature.hpp"
#include "sphint/errors.hpp"

namespace sphint {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double position = 0.0;
  double weight = 0.0;
};

struct DiscreteAtoms {
  std::vector<Atom> atoms;
};

/// Semicircle law on [-2, 2].
struct Semicircle {};

/// Marchenko-Pastur law with ratio alpha in (0, 1], edges (1 -+ sqrt(alpha))^2.
struct MarchenkoPastur {
  double alpha = 1.0;
};

/// Density sampled on a uniform grid over [lo, hi], linearly interpolated.
struct TabulatedDensity {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;

  double step() const { return (hi - lo) / static_cast<double>(values.size() - 1); }
  double node(std::size_t k) const { return lo + step() * static_cast<double>(k); }
};

struct SupportEdges {
  double left = 0.0;
  double right = 0.0;
};

enum class Side { Left, Right };

/// A compactly supported probability measure. Named laws carry an affine
/// pushforward x -> scale * x + shift so that dilations and reflections stay
/// in closed form; atoms and tabulated densities are transformed in place.
class SpectralMeasure {
 public:
  using Law = std::variant<DiscreteAtoms, Semicircle, MarchenkoPastur, TabulatedDensity>;

  static SpectralMeasure atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw DomainError("atoms: empty measure");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!std::isfinite(atoms[i].position)) throw DomainError("atoms: non-finite position");
      if (!(atoms[i].weight > 0.0)) throw DomainError("atoms: weights must be strictly positive");
      if (i > 0 && !(atoms[i].position > atoms[i - 1].position)) {
        throw DomainError("atoms: positions must be strictly increasing");
      }
      total += atoms[i].weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("atoms: weights must sum to 1");
    return SpectralMeasure(DiscreteAtoms{std::move(atoms)});
  }

  static SpectralMeasure delta(double x) { return atoms({{x, 1.0}}); }

  static SpectralMeasure semicircle() { return SpectralMeasure(Semicircle{}); }

  static SpectralMeasure marchenko_pastur(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw DomainError("marchenko_pastur: alpha must lie in (0, 1]");
    }
    return SpectralMeasure(MarchenkoPastur{alpha});
  }

  static SpectralMeasure tabulated(double lo, double hi, std::vector<double> values) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw DomainError("density: support must be a bounded interval lo < hi");
    }
    if (values.size() < 2) throw DomainError("density: need at least two grid values");
    TabulatedDensity d{lo, hi, std::move(values)};
    double mass = 0.0;
    for (std::size_t k = 0; k < d.values.size(); ++k) {
      if (!(d.values[k] >= 0.0) || !std::isfinite(d.values[k])) {
        throw DomainError("density: values must be finite and nonnegative");
      }
      const double w = (k == 0 || k + 1 == d.values.size()) ? 0.5 : 1.0;
      mass += w * d.values[k];
    }
    mass *= d.step();
    if (std::abs(mass - 1.0) > 1e-8) throw DomainError("density: must integrate to 1");
    return SpectralMeasure(std::move(d));
  }

  const Law& law() const { return law_; }
  double scale() const { return scale_; }
  double shift() const { return shift_; }

  bool is_discrete() const { return std::holds_alternative<DiscreteAtoms>(law_); }

  /// Affine pushforward x -> a x + b.
  SpectralMeasure affine(double a, double b) const {
    if (!(a != 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw DomainError("affine: scale must be finite and nonzero");
    }
    if (const auto* d = std::get_if<DiscreteAtoms>(&law_)) {
      std::vector<Atom> out;
      out.reserve(d->atoms.size());
      for (const auto& at : d->atoms) out.push_back({a * at.position + b, at.weight});
      if (a < 0.0) std::reverse(out.begin(), out.end());
      SpectralMeasure m{DiscreteAtoms{std::move(out)}};
      return m;
    }
    if (const auto* t = std::get_if<TabulatedDensity>(&law_)) {
      TabulatedDensity d;
      double lo = a * t->lo + b, hi = a * t->hi + b;
      d.values.reserve(t->values.size());
      for (double v : t->values) d.values.push_back(v / std::abs(a));
      if (a < 0.0) {
        std::swap(lo, hi);
        std::reverse(d.values.begin(), d.values.end());
      }
      d.lo = lo;
      d.hi = hi;
      return SpectralMeasure(std::move(d));
    }
    SpectralMeasure m = *this;
    m.scale_ = a * scale_;
    m.shift_ = a * shift_ + b;
    return m;
  }

  SpectralMeasure dilate(double factor) const { return affine(factor, 0.0); }
  SpectralMeasure reflect() const { return affine(-1.0, 0.0); }

 private:
  explicit SpectralMeasure(Law law) : law_(std::move(law)) {}

  Law law_;
  double scale_ = 1.0;
  double shift_ = 0.0;
};

namespace detail {

inline double sc_stieltjes(double z) {
  const double s = std::sqrt((z - 2.0) * (z + 2.0));
  return z > 0 ? 0.5 * (z - s) : 0.5 * (z + s);
}

inline double sc_log_potential(double v) {
  const double a = std::abs(v);
  if (a <= 2.0) return 0.25 * v * v - 0.5;
  const double s = std::sqrt((a - 2.0) * (a + 2.0));
  return 0.25 * a * a - 0.25 * a * s + std::log(0.5 * (a + s)) - 0.5;
}

inline double sc_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
         std::asin(0.5 * x) / std::numbers::pi;
}

struct MpGeometry {
  double alpha, lminus, lplus, center, radius;
  explicit MpGeometry(double a)
      : alpha(a),
        lminus((1.0 - std::sqrt(a)) * (1.0 - std::sqrt(a))),
        lplus((1.0 + std::sqrt(a)) * (1.0 + std::sqrt(a))),
        center(0.5 * (lminus + lplus)),
        radius(0.5 * (lplus - lminus)) {}
  double x_of(double phi) const { return center - radius * std::cos(phi); }
  // density(x) dx expressed in the angle variable; smooth on [0, pi]
  double weight(double phi) const {
    const double s = std::sin(phi);
    const double x = x_of(phi);
    if (x <= 0.0) {
      // alpha == 1 at phi == 0: sin^2/x -> finite limit radius/(...)
      return radius * radius / (2.0 * std::numbers::pi * alpha) * (2.0 / radius);
    }
    return radius * radius * s * s / (2.0 * std::numbers::pi * alpha * x);
  }
  double phi_of(double x) const {
    const double c = std::clamp((center - x) / radius, -1.0, 1.0);
    return std::acos(c);
  }
};

inline double mp_stieltjes(double alpha, double z) {
  const MpGeometry g(alpha);
  if (z == 0.0) return -1.0 / (1.0 - alpha);
  const double root = std::sqrt((z - g.lminus) * (z - g.lplus));
  const double s = z > g.lplus ? 1.0 : -1.0;
  return ((z + alpha - 1.0) - s * root) / (2.0 * alpha * z);
}

inline double mp_edge_limit(double alpha, Side side) {
  const MpGeometry g(alpha);
  const double e = side == Side::Right ? g.lplus : g.lminus;
  if (e == 0.0) return -kInf;
  return (e + alpha - 1.0) / (2.0 * alpha * e);
}

inline double mp_log_potential(double alpha, double v) {
  const MpGeometry g(alpha);
  auto f = [&](double phi) {
    const double d = std::abs(v - g.x_of(phi));
    return d == 0.0 ? 0.0 : g.weight(phi) * std::log(d);
  };
  if (v > g.lminus && v < g.lplus) {
    const double p0 = g.phi_of(v);
    const auto lo = integrate_log_endpoint(f, 0.0, p0, p0, 1e-11);
    const auto hi = integrate_log_endpoint(f, p0, std::numbers::pi, p0, 1e-11);
    if (!std::isfinite(lo.value + hi.value) || lo.error + hi.error > 1e-10) {
      throw NumericalError("log_potential: quadrature did not converge");
    }
    return lo.value + hi.value;
  }
  return integrate_checked(f, 0.0, std::numbers::pi, 1e-10, "log_potential");
}

inline double mp_cdf(double alpha, double x) {
  const MpGeometry g(alpha);
  if (x <= g.lminus) return 0.0;
  if (x >= g.lplus) return 1.0;
  auto f = [&](double phi) { return g.weight(phi); };
  return integrate(f, 0.0, g.phi_of(x), 1e-14).value;
}

template <class F>
double mp_expectation(double alpha, F&& fn) {
  const MpGeometry g(alpha);
  auto f = [&](double phi) { return g.weight(phi) * fn(g.x_of(phi)); };
  return integrate(f, 0.0, std::numbers::pi, 1e-13).value;
}

template <class F>
double sc_expectation(F&& fn) {
  auto f = [&](double phi) {
    const double s = std::sin(phi);
    return 2.0 / std::numbers::pi * s * s * fn(-2.0 * std::cos(phi));
  };
  return integrate(f, 0.0, std::numbers::pi, 1e-13).value;
}

// (log1p(u) / u) - 1 without cancellation for small u
inline double log1p_ratio_minus_one(double u) {
  if (std::abs(u) < 1e-4) return u * (-0.5 + u * (1.0 / 3.0 - 0.25 * u));
  return std::log1p(u) / u - 1.0;
}

/// Integral of the linear interpolant on one grid segment against 1/(z - x).
inline double segment_stieltjes(double x0, double x1, double f0, double f1, double z) {
  const double h = x1 - x0;
  const double dist = std::min(std::abs(z - x0), std::abs(z - x1));
  if (dist > 2.0 * h) {
    const auto& rule = GaussLegendre<8>::instance();
    return rule.apply([&](double x) { return (f0 + (f1 - f0) * (x - x0) / h) / (z - x); },
                      x0, x1);
  }
  const double slope = (f1 - f0) / h;
  const double u = h / (z - x1);
  return f1 * std::log1p(u) + slope * h * log1p_ratio_minus_one(u);
}

/// Integral of the linear interpolant on one grid segment against ln|v - x|.
inline double segment_log_potential(double x0, double x1, double f0, double f1, double v) {
  const double h = x1 - x0;
  const double dist = (v < x0) ? x0 - v : (v > x1 ? v - x1 : 0.0);
  if (dist > 2.0 * h) {
    const auto& rule = GaussLegendre<8>::instance();
    return rule.apply(
        [&](double x) { return (f0 + (f1 - f0) * (x - x0) / h) * std::log(std::abs(v - x)); },
        x0, x1);
  }
  const double slope = (f1 - f0) / h;
  const double c0 = f0 + slope * (v - x0);
  auto prim = [&](double t) {
    if (t == 0.0) return 0.0;
    const double lt = std::log(std::abs(t));
    return c0 * (t * lt - t) + slope * (0.5 * t * t * lt - 0.25 * t * t);
  };
  return prim(x1 - v) - prim(x0 - v);
}

inline double density_mass_below(const TabulatedDensity& d, double x) {
  if (x <= d.lo) return 0.0;
  if (x >= d.hi) return 1.0;
  const double h = d.step();
  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < d.values.size(); ++k) {
    const double x0 = d.node(k), x1 = d.node(k + 1);
    const double f0 = d.values[k], f1 = d.values[k + 1];
    if (x >= x1) {
      mass += 0.5 * h * (f0 + f1);
    } else {
      const double t = x - x0;
      mass += f0 * t + 0.5 * (f1 - f0) / h * t * t;
      break;
    }
  }
  return std::min(mass, 1.0);
}

}  // namespace detail

/// Leftmost and rightmost points of the support.
inline SupportEdges support_edges(const SpectralMeasure& mu) {
  const double a = mu.scale(), b = mu.shift();
  auto mapped = [&](double l, double r) {
    double x = a * l + b, y = a * r + b;
    if (x > y) std::swap(x, y);
    return SupportEdges{x, y};
  };
  return std::visit(
      [&](const auto& law) -> SupportEdges {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, DiscreteAtoms>) {
          return {law.atoms.front().position, law.atoms.back().position};
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return mapped(-2.0, 2.0);
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
          const detail::MpGeometry g(law.alpha);
          return mapped(g.lminus, g.lplus);
        } else {
          return {law.lo, law.hi};
        }
      },
      mu.law());
}

/// Cauchy-Stieltjes transform G(z) = integral of 1/(z - x), for z strictly
/// outside the closed convex hull of the support.
inline double stieltjes(const SpectralMeasure& mu, double z) {
  const auto e = support_edges(mu);
  if (!(z > e.right || z < e.left)) {
    throw DomainError("stieltjes: z = " + std::to_string(z) + " lies in the support [" +
                      std::to_string(e.left) + ", " + std::to_string(e.right) + "]");
  }
  const double a = mu.scale(), b = mu.shift();
  const double u = (z - b) / a;
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, DiscreteAtoms>) {
          double g = 0.0;
          for (const auto& at : law.atoms) g += at.weight / (z - at.position);
          return g;
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return detail::sc_stieltjes(u) / a;
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
          return detail::mp_stieltjes(law.alpha, u) / a;
        } else {
          double g = 0.0;
          for (std::size_t k = 0; k + 1 < law.values.size(); ++k) {
            g += detail::segment_stieltjes(law.node(k), law.node(k + 1), law.values[k],
                                           law.values[k + 1], z);
          }
          return g;
        }
      },
      mu.law());
}

/// Limit of G(z) as z approaches the given support edge from outside.
/// Infinite when the measure has mass concentrating at the edge.
inline double stieltjes_edge_limit(const SpectralMeasure& mu, Side side) {
  const double a = mu.scale();
  // the base-law side that maps onto the requested side
  const Side base = (a > 0.0) == (side == Side::Right) ? Side::Right : Side::Left;
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, DiscreteAtoms>) {
          return side == Side::Right ? kInf : -kInf;
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return (base == Side::Right ? 1.0 : -1.0) / a;
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
          return detail::mp_edge_limit(law.alpha, base) / a;
        } else {
          const std::size_t n = law.values.size();
          if (side == Side::Right) {
            if (law.values[n - 1] > 0.0) return kInf;
            double g = law.values[n - 2];  // touching segment, exact
            for (std::size_t k = 0; k + 2 < n; ++k) {
              g += detail::segment_stieltjes(law.node(k), law.node(k + 1), law.values[k],
                                             law.values[k + 1], law.hi);
            }
            return g;
          }
          if (law.values[0] > 0.0) return -kInf;
          double g = -law.values[1];
          for (std::size_t k = 1; k + 1 < n; ++k) {
            g += detail::segment_stieltjes(law.node(k), law.node(k + 1), law.values[k],
                                           law.values[k + 1], law.lo);
          }
          return g;
        }
      },
      mu.law());
}

/// Solves G(v) = theta off the support: v > r for theta > 0, v < l for
/// theta < 0. When theta is beyond the range of G on that side the matching
/// support edge is returned.
inline double stieltjes_inverse(const SpectralMeasure& mu, double theta) {
  if (theta == 0.0 || !std::isfinite(theta)) {
    throw DomainError("stieltjes_inverse: theta must be finite and nonzero");
  }
  const auto e = support_edges(mu);
  if (std::holds_alternative<Semicircle>(mu.law())) {
    // G(v) = G_sc((v - b)/a)/a, and G_sc^{-1}(t) = t + 1/t for 0 < |t| <= 1
    const double a = mu.scale(), b = mu.shift();
    const double t = a * theta;
    if (std::abs(t) >= 1.0) return theta > 0 ? e.right : e.left;
    return a * (t + 1.0 / t) + b;
  }
  if (theta > 0.0) {
    const double g_edge = stieltjes_edge_limit(mu, Side::Right);
    if (theta >= g_edge) return e.right;
    // G(v) <= 1/(v - r) and G(v) >= 1/(v - l) for v > r
    double lo = std::max(e.right, e.left + 1.0 / theta);
    double hi = e.right + 1.0 / theta;
    auto f = [&](double v) {
      return (v <= e.right ? g_edge : stieltjes(mu, v)) - theta;
    };
    return detail::bisect_decreasing(f, lo, hi);
  }
  const double g_edge = stieltjes_edge_limit(mu, Side::Left);
  if (theta <= g_edge) return e.left;
  double lo = e.left + 1.0 / theta;
  double hi = std::min(e.left, e.right + 1.0 / theta);
  auto f = [&](double v) { return (v >= e.left ? g_edge : stieltjes(mu, v)) - theta; };
  return detail::bisect_decreasing(f, lo, hi);
}

/// Logarithmic potential: integral of ln|v - x| d mu(x). Equals -infinity
/// when v sits on an atom.
inline double log_potential(const SpectralMeasure& mu, double v) {
  const double a = mu.scale(), b = mu.shift();
  const double u = (v - b) / a;
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, DiscreteAtoms>) {
          double s = 0.0;
          for (const auto& at : law.atoms) s += at.weight * std::log(std::abs(v - at.position));
          return s;
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return std::log(std::abs(a)) + detail::sc_log_potential(u);
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
          return std::log(std::abs(a)) + detail::mp_log_potential(law.alpha, u);
        } else {
          double s = 0.0;
          for (std::size_t k = 0; k + 1 < law.values.size(); ++k) {
            s += detail::segment_log_potential(law.node(k), law.node(k + 1), law.values[k],
                                               law.values[k + 1], v);
          }
          return s;
        }
      },
      mu.law());
}

/// mu((-inf, x)), the mass strictly below x.
inline double mass_below(const SpectralMeasure& mu, double x) {
  const double a = mu.scale(), b = mu.shift();
  const double u = (x - b) / a;
  auto oriented = [&](double cdf_u) { return a > 0.0 ? cdf_u : 1.0 - cdf_u; };
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, DiscreteAtoms>) {
          double s = 0.0;
          for (const auto& at : law.atoms) {
            if (at.position < x) s += at.weight;
          }
          return s;
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return oriented(detail::sc_cdf(u));
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
          return oriented(detail::mp_cdf(law.alpha, u));
        } else {
          return detail::density_mass_below(law, x);
        }
      },
      mu.law());
}

/// Integral of a bounded test function against mu.
template <class F>
double expectation(const SpectralMeasure& mu, F&& fn) {
  const double a = mu.scale(), b = mu.shift();
  auto mapped = [&](double x) { return fn(a * x + b); };
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, DiscreteAtoms>) {
          double s = 0.0;
          for (const auto& at : law.atoms) s += at.weight * fn(at.position);
          return s;
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return detail::sc_expectation(mapped);
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
          return detail::mp_expectation(law.alpha, mapped);
        } else {
          const auto& rule = detail::GaussLegendre<8>::instance();
          double s = 0.0;
          const double h = law.step();
          for (std::size_t k = 0; k + 1 < law.values.size(); ++k) {
            const double x0 = law.node(k), f0 = law.values[k], f1 = law.values[k + 1];
            s += rule.apply([&](double x) { return (f0 + (f1 - f0) * (x - x0) / h) * fn(x); },
                            x0, x0 + h);
          }
          return s;
        }
      },
      mu.law());
}

/// Smallest x with mu((-inf, x]) >= u.
inline double quantile(const SpectralMeasure& mu, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile: level must lie in [0, 1]");
  const auto e = support_edges(mu);
  if (const auto* d = std::get_if<DiscreteAtoms>(&mu.law())) {
    double c = 0.0;
    for (const auto& at : d->atoms) {
      c += at.weight;
      if (c >= u - 1e-15) return at.position;
    }
    return d->atoms.back().position;
  }
  double lo = e.left, hi = e.right;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mass_below(mu, mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Bins [lo + j eps, lo + (j+1) eps), the last one closed, collapsed onto
/// their left endpoints. Every support point moves by less than eps.
inline SpectralMeasure discretize(const SpectralMeasure& mu, double lo, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("discretize: epsilon must be positive");
  }
  const auto e = support_edges(mu);
  if (lo > e.left) throw DomainError("discretize: lo must not exceed the left support edge");
  const auto span = (e.right - lo) / epsilon;
  if (span > 1e8) throw DomainError("discretize: too many bins");
  auto bins = static_cast<std::size_t>(std::floor(span)) + 1;
  // guard against floor() landing one bin short through rounding
  while (lo + static_cast<double>(bins) * epsilon < e.right) ++bins;
  std::vector<double> mass(bins, 0.0);

  if (const auto* d = std::get_if<DiscreteAtoms>(&mu.law())) {
    for (const auto& at : d->atoms) {
      auto j = static_cast<std::size_t>(std::max(0.0, std::floor((at.position - lo) / epsilon)));
      if (j >= bins) j = bins - 1;
      while (j > 0 && lo + static_cast<double>(j) * epsilon > at.position) --j;
      while (j + 1 < bins && lo + static_cast<double>(j + 1) * epsilon <= at.position) ++j;
      mass[j] += at.weight;
    }
  } else {
    double prev = 0.0;
    for (std::size_t j = 0; j + 1 < bins; ++j) {
      const double c = mass_below(mu, lo + static_cast<double>(j + 1) * epsilon);
      mass[j] = std::max(0.0, c - prev);
      prev = std::max(prev, c);
    }
    mass[bins - 1] = std::max(0.0, 1.0 - prev);
  }

  double total = 0.0;
  for (double m : mass) {
    if (m > 1e-14) total += m;
  }
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < bins; ++j) {
    if (mass[j] > 1e-14) atoms.push_back({lo + static_cast<double>(j) * epsilon, mass[j] / total});
  }
  // renormalize exactly so the validation accepts it
  double s = 0.0;
  for (const auto& at : atoms) s += at.weight;
  for (auto& at : atoms) at.weight /= s;
  return SpectralMeasure::atoms(std::move(atoms));
}

}  // namespace sphint

namespace sphint {

/// Pushforward of mu under x -> factor * x.
inline SpectralMeasure dilate(const SpectralMeasure& mu, double factor) {
  return mu.dilate(factor);
}

/// Pushforward of mu under x -> -x.
inline SpectralMeasure reflect(const SpectralMeasure& mu) { return mu.reflect(); }

}  // namespace sphint
