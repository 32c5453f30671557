#pragma once

// Large-deviation rate functions for extreme eigenvalues, their duality
// with the spherical integral, annealed spherical integrals and outlier
// interval costs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sphint/detail/optimize.hpp"
#include "sphint/detail/quadrature.hpp"
#include "sphint/errors.hpp"
#include "sphint/measures.hpp"
#include "sphint/spherical.hpp"

namespace sphint {

inline void check_beta(int beta) {
  if (beta != 1 && beta != 2) throw DomainError("beta must be 1 or 2");
}

namespace detail {

// t sqrt(t^2-4)/2 - 2 ln((t + sqrt(t^2-4))/2), an antiderivative of sqrt(t^2-4)
inline double semicircle_rate_primitive(double t) {
  const double s = std::sqrt((t - 2.0) * (t + 2.0));
  return 0.5 * t * s - 2.0 * std::log(0.5 * (t + s));
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

// y - (1-alpha) ln y - 2 alpha integral ln|y - t| d pi_alpha(t)
inline double mp_confining(double y, double alpha) {
  const auto pi = SpectralMeasure::marchenko_pastur(alpha);
  return y - (1.0 - alpha) * std::log(y) - 2.0 * alpha * log_potential(pi, y);
}

}  // namespace detail

/// (beta/2) * integral_2^{|x|} sqrt(t^2 - 4) dt; +infinity inside (-2, 2).
inline double wigner_rate(double x, int beta) {
  check_beta(beta);
  const double a = std::abs(x);
  if (!(a >= 2.0)) return kInf;
  return 0.5 * beta * detail::semicircle_rate_primitive(a);
}

/// Sum of wigner_rate over a vector of extreme eigenvalues.
inline double wigner_rate_vector(const std::vector<double>& xs, int beta) {
  double s = 0.0;
  for (double x : xs) s += wigner_rate(x, beta);
  return s;
}

/// Largest-eigenvalue rate for the Wishart ensemble with ratio alpha:
/// beta/(4(1+alpha)) * integral_{lambda+}^x sqrt((y-lambda-)(y-lambda+))/y dy.
/// +infinity below lambda+.
inline double wishart_rate(double x, double alpha, int beta) {
  check_beta(beta);
  detail::check_alpha(alpha);
  const detail::MpGeometry g(alpha);
  if (!(x >= g.lplus)) return kInf;
  if (x == g.lplus) return 0.0;
  // y = lambda+ + u^2 removes the square-root endpoint
  auto f = [&](double u) {
    const double y = g.lplus + u * u;
    return 2.0 * u * u * std::sqrt(y - g.lminus) / y;
  };
  const double integral =
      detail::integrate_checked(f, 0.0, std::sqrt(x - g.lplus), 1e-11, "wishart_rate");
  return beta / (4.0 * (1.0 + alpha)) * integral;
}

/// Wishart edge rate written through the log potential of pi_alpha:
/// beta/(4(1+alpha)) (f(x) - f(edge)) with f(y) = y - (1-alpha) ln y
/// - 2 alpha integral ln|y-t| d pi_alpha. Covers both the top side
/// (x >= lambda+) and the bottom side (0 < x <= lambda-).
inline double wishart_potential_rate(double x, double alpha, int beta) {
  check_beta(beta);
  detail::check_alpha(alpha);
  const detail::MpGeometry g(alpha);
  if (x > g.lminus && x < g.lplus) return kInf;
  if (!(x > 0.0)) throw DomainError("wishart rate: x must be positive");
  const double edge = x >= g.lplus ? g.lplus : g.lminus;
  return beta / (4.0 * (1.0 + alpha)) *
         (detail::mp_confining(x, alpha) - detail::mp_confining(edge, alpha));
}

/// Smallest-eigenvalue rate in integral form,
/// beta/(4(1+alpha)) * integral_x^{lambda-} sqrt((lambda- - y)(lambda+ - y))/y dy.
inline double wishart_bottom_rate(double x, double alpha, int beta) {
  check_beta(beta);
  detail::check_alpha(alpha);
  const detail::MpGeometry g(alpha);
  if (g.lminus <= 0.0) throw DomainError("wishart bottom rate: alpha = 1 has no hard-edge gap");
  if (!(x > 0.0)) throw DomainError("wishart bottom rate: x must be positive");
  if (x > g.lminus) return kInf;
  if (x == g.lminus) return 0.0;
  // y = lambda- - u^2
  auto f = [&](double u) {
    const double y = g.lminus - u * u;
    return 2.0 * u * u * std::sqrt(g.lplus - y) / y;
  };
  const double integral = detail::integrate_checked(f, 0.0, std::sqrt(g.lminus - x), 1e-11,
                                                    "wishart_bottom_rate");
  return beta / (4.0 * (1.0 + alpha)) * integral;
}

/// theta + 1/theta, the outlier location of a rank-one tilt theta >= 1.
inline double bbp_outlier(double theta) {
  if (!(theta >= 1.0) || !std::isfinite(theta)) throw DomainError("bbp_outlier: need theta >= 1");
  return theta + 1.0 / theta;
}

/// The theta >= 1 solving theta + 1/theta = x.
inline double theta_for_outlier(double x) {
  if (!(x >= 2.0) || !std::isfinite(x)) throw DomainError("theta_for_outlier: need x >= 2");
  return 0.5 * (x + std::sqrt((x - 2.0) * (x + 2.0)));
}

/// sup over theta >= 0 of J(sigma, theta, x) - theta^2/2. The objective is
/// zero for theta <= G(x) and unimodal beyond, with the peak at
/// theta_for_outlier(x).
inline double legendre_check_wigner(double x) {
  if (!(x >= 2.0) || !std::isfinite(x)) throw DomainError("legendre_check_wigner: need x >= 2");
  const auto sigma = SpectralMeasure::semicircle();
  const double lo = x > 2.0 ? stieltjes(sigma, x) : 1.0;
  auto f = [&](double theta) { return j_one(sigma, theta, x).value - 0.5 * theta * theta; };
  const auto best = detail::golden_section_max(f, lo, x + 1.0, 1e-13);
  if (!std::isfinite(best.value)) throw ConvergenceError("legendre_check_wigner: no maximum");
  return std::max(best.value, 0.0);
}

struct RateMinimum {
  double argmin = 0.0;
  double value = 0.0;
};

namespace detail {

// I(x) = x^2/4 - integral ln|x - y| d sigma(y)
inline double wigner_confining(double x) {
  return 0.25 * x * x - log_potential(SpectralMeasure::semicircle(), x);
}

inline double perturbed_wigner_raw(double x, double theta) {
  const auto sigma = SpectralMeasure::semicircle();
  const double tilt = theta == 0.0 ? 0.0 : 0.5 * j_one(sigma, theta, x).value;
  return wigner_confining(x) - tilt;
}

inline RateMinimum perturbed_wigner_inf(double theta) {
  const double t = std::abs(theta);
  auto f = [&](double y) { return perturbed_wigner_raw(y, t); };
  const auto r = golden_section_min(f, 2.0, 2.0 + 10.0 + 2.0 * t, 1e-13);
  if (!std::isfinite(r.value)) throw ConvergenceError("perturbed_wigner_rate: inner minimization");
  return {theta < 0.0 ? -r.x : r.x, r.value};
}

}  // namespace detail

/// Location of the zero of the perturbed Wigner rate; equals
/// theta + 1/theta for theta >= 1 and the edge 2 below that.
inline double perturbed_wigner_argmin(double theta) {
  if (!std::isfinite(theta)) throw DomainError("perturbed_wigner: theta must be finite");
  return detail::perturbed_wigner_inf(theta).argmin;
}

/// I_theta(x) = I(x) - J(sigma, theta, x)/2 - inf_y(...), the per-eigenvalue
/// rate of GOE/GUE plus theta e e^*, without the beta factor. For
/// theta >= 0 it is +infinity below the edge 2; negative theta is the
/// mirror image.
inline double perturbed_wigner_rate(double x, double theta, int beta) {
  check_beta(beta);
  if (!std::isfinite(theta) || !std::isfinite(x)) throw DomainError("perturbed_wigner: non-finite input");
  const double t = std::abs(theta);
  const double y = theta < 0.0 ? -x : x;
  if (theta == 0.0 && x <= -2.0) return perturbed_wigner_rate(-x, 0.0, beta);
  if (!(y >= 2.0)) return kInf;
  const auto inf = detail::perturbed_wigner_inf(t);
  return std::max(0.0, detail::perturbed_wigner_raw(y, t) - inf.value);
}

/// beta * sum_i I_{theta_i}(x_i).
inline double perturbed_wigner_rate_vector(const std::vector<double>& xs,
                                           const std::vector<double>& thetas, int beta) {
  if (xs.size() != thetas.size()) throw ShapeError("perturbed_wigner_rate_vector: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += perturbed_wigner_rate(xs[i], thetas[i], beta);
  return beta * s;
}

namespace detail {

struct WishartTilt {
  double alpha, gamma, tilt, weight;
  int beta;
  MpGeometry g;
  WishartTilt(double gamma_, double alpha_, int beta_)
      : alpha(alpha_),
        gamma(gamma_),
        tilt(gamma_ / ((1.0 + gamma_) * alpha_)),
        weight(beta_ * alpha_ / (4.0 * (1.0 + alpha_))),
        beta(beta_),
        g(alpha_) {}

  double raw(double x) const {
    const double base = wishart_potential_rate(x, alpha, beta);
    if (gamma == 0.0) return base;
    const auto pi = SpectralMeasure::marchenko_pastur(alpha);
    return base - weight * j_one(pi, tilt, x).value;
  }

  RateMinimum inf() const {
    const double span = 10.0 + 2.0 * std::abs(tilt) + 2.0 * std::abs(gamma);
    auto f = [&](double y) { return raw(y); };
    ScalarOptimum r;
    if (gamma >= 0.0) {
      r = golden_section_min(f, g.lplus, g.lplus + span, 1e-13);
    } else {
      const double lo = std::max(g.lminus - span, 1e-9 * g.lminus);
      r = golden_section_min(f, lo, g.lminus, 1e-13);
    }
    if (!std::isfinite(r.value)) throw ConvergenceError("perturbed_wishart_rate: inner minimization");
    return {r.x, r.value};
  }
};

inline void check_wishart_args(double gamma, double alpha, int beta) {
  check_beta(beta);
  check_alpha(alpha);
  if (!(gamma > -1.0) || !std::isfinite(gamma)) throw DomainError("perturbed_wishart: need gamma > -1");
  if (gamma < 0.0 && alpha == 1.0) {
    throw DomainError("perturbed_wishart: negative gamma needs alpha < 1 (no gap at the hard edge)");
  }
}

}  // namespace detail

/// Location of the zero of the perturbed Wishart rate.
inline double perturbed_wishart_argmin(double gamma, double alpha, int beta) {
  detail::check_wishart_args(gamma, alpha, beta);
  return detail::WishartTilt(gamma, alpha, beta).inf().argmin;
}

/// Rate of the extreme eigenvalue of (1/M) S^{1/2} G G^* S^{1/2} with
/// S = I + gamma e e^*: I_alpha(x) minus the spherical-integral tilt
/// (beta alpha / (4(1+alpha))) J(pi_alpha, gamma/((1+gamma) alpha), x),
/// recentred to vanish at its minimum. gamma > 0 acts on the top edge,
/// gamma < 0 on the bottom edge, gamma = 0 on either.
inline double perturbed_wishart_rate(double x, double gamma, double alpha, int beta) {
  detail::check_wishart_args(gamma, alpha, beta);
  if (!std::isfinite(x)) throw DomainError("perturbed_wishart: x must be finite");
  const detail::WishartTilt w(gamma, alpha, beta);
  if (gamma == 0.0) {
    if (x > w.g.lminus && x < w.g.lplus) return kInf;
    if (x < w.g.lplus && alpha == 1.0) throw DomainError("perturbed_wishart: x must be >= lambda+");
    if (!(x > 0.0)) throw DomainError("perturbed_wishart: x must be positive");
    return wishart_potential_rate(x, alpha, beta);
  }
  if (gamma > 0.0) {
    if (!(x >= w.g.lplus)) return kInf;
  } else {
    if (!(x > 0.0)) throw DomainError("perturbed_wishart: x must be positive");
    if (!(x <= w.g.lminus)) return kInf;
  }
  return std::max(0.0, w.raw(x) - w.inf().value);
}

struct AnnealedWishart {
  double value = 0.0;
  double maximizer = 0.0;
  double residual = 0.0;
};

/// sup over a in (0,1) of theta^2 a(1-a) + a' ln(a/a') + (1-a') ln((1-a)/(1-a')),
/// a' = 1/(1+alpha).
inline AnnealedWishart annealed_lambda_wishart(double theta, double alpha) {
  detail::check_alpha(alpha);
  if (!std::isfinite(theta)) throw DomainError("annealed_lambda_wishart: theta must be finite");
  const double ap = 1.0 / (1.0 + alpha);
  if (theta == 0.0) return {0.0, ap, 0.0};
  const double t2 = theta * theta;
  auto foc = [&](double a) { return t2 * (1.0 - 2.0 * a) + ap / a - (1.0 - ap) / (1.0 - a); };
  double a = detail::bisect_decreasing(foc, 0.0, 1.0);
  // polish: the bisection bracket is at machine resolution but the
  // residual scales with the slope
  for (int it = 0; it < 5; ++it) {
    const double d = -2.0 * t2 - ap / (a * a) - (1.0 - ap) / ((1.0 - a) * (1.0 - a));
    const double next = a - foc(a) / d;
    if (!(next > 0.0 && next < 1.0)) break;
    if (std::abs(foc(next)) >= std::abs(foc(a))) break;
    a = next;
  }
  const double residual = std::abs(foc(a));
  if (!(residual <= 1e-10)) {
    throw ConvergenceError("annealed_lambda_wishart: residual " + std::to_string(residual));
  }
  const double value = t2 * a * (1.0 - a) + ap * std::log(a / ap) +
                       (1.0 - ap) * std::log((1.0 - a) / (1.0 - ap));
  return {value, a, residual};
}

/// Sum of annealed_lambda_wishart values over several tilts.
inline double annealed_lambda_wishart_multi(const std::vector<double>& thetas, double alpha) {
  double s = 0.0;
  for (double t : thetas) s += annealed_lambda_wishart(t, alpha).value;
  return s;
}

/// Symmetric p x p matrix R of variances with block weights alpha.
struct VarianceProfile {
  Eigen::MatrixXd R;
  std::vector<double> alpha;

  static VarianceProfile make(Eigen::MatrixXd R, std::vector<double> alpha) {
    const auto p = R.rows();
    if (p < 1 || R.cols() != p) throw ShapeError("profile: R must be square");
    if (static_cast<std::size_t>(p) != alpha.size()) {
      throw ShapeError("profile: alpha length must match R");
    }
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (!(R(i, j) >= 0.0) || !std::isfinite(R(i, j))) {
          throw DomainError("profile: R entries must be finite and nonnegative");
        }
        if (std::abs(R(i, j) - R(j, i)) > 1e-12 * (1.0 + std::abs(R(i, j)))) {
          throw DomainError("profile: R must be symmetric");
        }
      }
    }
    double s = 0.0;
    for (double a : alpha) {
      if (!(a > 0.0)) throw DomainError("profile: block weights must be positive");
      s += a;
    }
    if (std::abs(s - 1.0) > 1e-12) throw DomainError("profile: block weights must sum to 1");
    return {std::move(R), std::move(alpha)};
  }

  std::size_t size() const { return alpha.size(); }
};

struct AssumptionCheck {
  bool negative = false;
  /// Accepted with a zero eigenvalue on the complement of the constants.
  bool semidefinite_boundary = false;
  std::vector<double> eigenvalues;
};

/// Spectrum of psi -> <psi, R psi> restricted to the orthocomplement of
/// (1, ..., 1), and whether it is negative (definite, or semidefinite on
/// the flagged boundary).
inline AssumptionCheck assumption_neg_details(const VarianceProfile& profile) {
  const auto p = static_cast<Eigen::Index>(profile.size());
  AssumptionCheck out;
  if (p == 1) {
    out.negative = true;
    return out;
  }
  // Helmert basis of the complement of the constants
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(p, p - 1);
  for (Eigen::Index k = 1; k < p; ++k) {
    const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
    for (Eigen::Index i = 0; i < k; ++i) Q(i, k - 1) = 1.0 / norm;
    Q(k, k - 1) = -static_cast<double>(k) / norm;
  }
  const Eigen::MatrixXd form = Q.transpose() * profile.R * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form, Eigen::EigenvaluesOnly);
  constexpr double tol = 1e-10;
  bool all_nonpositive = true, any_zero = false;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    out.eigenvalues.push_back(ev);
    if (ev > tol) all_nonpositive = false;
    if (std::abs(ev) <= tol) any_zero = true;
  }
  out.negative = all_nonpositive;
  out.semidefinite_boundary = all_nonpositive && any_zero;
  return out;
}

inline bool assumption_neg_check(const VarianceProfile& profile) {
  return assumption_neg_details(profile).negative;
}

struct AnnealedProfile {
  /// Supremum without the beta/2 prefactor.
  double value = 0.0;
  std::vector<double> maximizer;
  double kkt_residual = 0.0;
  AssumptionCheck assumption;
};

/// sup over the simplex of (theta^2/2) <psi, R psi> + sum alpha_i ln(psi_i/alpha_i),
/// by Newton steps on the affine hull with a damped line search that keeps
/// psi positive. With enforce_assumption the profile must pass
/// assumption_neg_check; without it the result is a local maximizer.
inline AnnealedProfile annealed_lambda_profile(double theta, const VarianceProfile& profile,
                                               bool enforce_assumption = true) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw DomainError("annealed_lambda_profile: theta must be >= 0");
  }
  AnnealedProfile out;
  out.assumption = assumption_neg_details(profile);
  if (enforce_assumption && !out.assumption.negative) {
    throw AssumptionError("annealed_lambda_profile: R is not negative on the complement of the constants");
  }
  const auto p = static_cast<Eigen::Index>(profile.size());
  Eigen::VectorXd alpha(p);
  for (Eigen::Index i = 0; i < p; ++i) alpha(i) = profile.alpha[static_cast<std::size_t>(i)];
  const double t2 = theta * theta;
  auto phi = [&](const Eigen::VectorXd& psi) {
    double s = 0.5 * t2 * psi.dot(profile.R * psi);
    for (Eigen::Index i = 0; i < p; ++i) s += alpha(i) * std::log(psi(i) / alpha(i));
    return s;
  };
  auto residual_of = [&](const Eigen::VectorXd& grad) {
    return (grad.array() - grad.mean()).abs().maxCoeff();
  };

  Eigen::VectorXd psi = alpha;
  if (theta == 0.0 || p == 1) {
    out.value = phi(psi);
    out.maximizer.assign(alpha.data(), alpha.data() + p);
    return out;
  }
  double value = phi(psi);
  double residual = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd grad = t2 * (profile.R * psi) + alpha.cwiseQuotient(psi);
    residual = residual_of(grad);
    if (residual <= 1e-12) break;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(p + 1, p + 1);
    kkt.topLeftCorner(p, p) = t2 * profile.R;
    for (Eigen::Index i = 0; i < p; ++i) kkt(i, i) -= alpha(i) / (psi(i) * psi(i));
    kkt.block(0, p, p, 1).setOnes();
    kkt.block(p, 0, 1, p).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
    rhs.head(p) = -grad;
    Eigen::VectorXd dir = kkt.fullPivLu().solve(rhs).head(p);
    const Eigen::VectorXd projected = grad.array() - grad.mean();
    if (!dir.allFinite() || grad.dot(dir) <= 0.0) dir = projected;  // not an ascent direction
    double step = 1.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (dir(i) < 0.0) step = std::min(step, 0.9 * psi(i) / -dir(i));
    }
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd trial = psi + step * dir;
      const double tv = phi(trial);
      if (tv >= value + 1e-4 * step * grad.dot(dir) || (ls > 40 && tv >= value)) {
        psi = trial;
        psi /= psi.sum();
        value = phi(psi);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  const Eigen::VectorXd grad = t2 * (profile.R * psi) + alpha.cwiseQuotient(psi);
  residual = residual_of(grad);
  if (!(residual <= 1e-8)) {
    throw ConvergenceError("annealed_lambda_profile: KKT residual " + std::to_string(residual));
  }
  out.value = value;
  out.maximizer.assign(psi.data(), psi.data() + p);
  out.kkt_residual = residual;
  return out;
}

/// Block averages of sigma^2 over a uniform p x p partition of [0,1]^2,
/// with equal block weights. Each cell uses tensor Gauss-Legendre rules
/// of two orders that must agree.
inline VarianceProfile profile_discretize(const std::function<double(double, double)>& sigma,
                                          int p) {
  if (p < 1) throw DomainError("profile_discretize: p must be >= 1");
  const auto& lo_rule = detail::GaussLegendre<20>::instance();
  const auto& hi_rule = detail::GaussLegendre<40>::instance();
  auto cell = [&](const auto& rule, double x0, double x1, double y0, double y1) {
    return rule.apply(
        [&](double x) {
          return rule.apply(
              [&](double y) {
                const double s = sigma(x, y);
                if (!std::isfinite(s) || s < 0.0) {
                  throw DomainError("profile_discretize: sigma must be finite and nonnegative");
                }
                return s * s;
              },
              y0, y1);
        },
        x0, x1);
  };
  const double h = 1.0 / p;
  Eigen::MatrixXd R(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const double a = cell(lo_rule, i * h, (i + 1) * h, j * h, (j + 1) * h) * p * p;
      const double b = cell(hi_rule, i * h, (i + 1) * h, j * h, (j + 1) * h) * p * p;
      if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(b))) {
        throw NumericalError("profile_discretize: cell quadrature did not converge");
      }
      R(i, j) = b;
    }
  }
  // symmetrize away quadrature round-off
  const Eigen::MatrixXd Rs = 0.5 * (R + R.transpose());
  return VarianceProfile::make(Rs, std::vector<double>(static_cast<std::size_t>(p), 1.0 / p));
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// sum_i n_i * inf over [a_i, b_i] of the single-outlier rate.
inline double outlier_interval_cost(const std::vector<Interval>& intervals,
                                    const std::vector<long long>& counts,
                                    const std::function<double(double)>& rate, double edge) {
  if (intervals.size() != counts.size()) throw ShapeError("interval cost: counts must match intervals");
  std::vector<Interval> sorted = intervals;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw DomainError("interval cost: each interval needs lo <= hi");
    }
    if (!(iv.lo > edge)) throw DomainError("interval cost: intervals must lie above the edge");
    if (counts[i] < 0) throw DomainError("interval cost: counts must be nonnegative");
  }
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i].lo > sorted[i - 1].hi)) throw DomainError("interval cost: intervals overlap");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (counts[i] == 0) continue;
    const auto best = detail::golden_section_min(rate, intervals[i].lo, intervals[i].hi, 1e-12);
    total += static_cast<double>(counts[i]) * best.value;
  }
  return total;
}

}  // namespace sphint
