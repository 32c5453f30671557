#pragma once

// Finite-N samplers and Monte-Carlo estimators of spherical integrals.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "sphint/errors.hpp"
#include "sphint/ldp.hpp"
#include "sphint/spherical.hpp"

namespace sphint {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

/// How frames are drawn in mc_spherical. Tilted draws from an angular
/// central Gaussian matched to the saddle point and reweights exactly;
/// Uniform draws Haar frames directly.
enum class Proposal { Tilted, Uniform };

struct MCConfig {
  std::size_t n = 0;  ///< matrix dimension; 0 means "take it from the input"
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  int beta = 1;
  Proposal proposal = Proposal::Tilted;
  std::size_t batches = 50;
  std::size_t threads = 0;  ///< 0: SPHINT_THREADS or hardware concurrency

  void validate() const {
    check_beta(beta);
    if (samples < 1) throw DomainError("mc: samples must be >= 1");
    if (batches < 1) throw DomainError("mc: batches must be >= 1");
  }
};

struct MCResult {
  double estimate = 0.0;
  /// Jackknife over batches; infinite when there is a single batch.
  double std_error = 0.0;
  /// Kish effective sample size of the importance weights.
  double ess = 0.0;
  std::size_t samples = 0;
};

struct FrameSample {
  /// Columns are the frame vectors; imaginary parts vanish for beta = 1.
  Eigen::MatrixXcd vectors;
  int beta = 1;
};

namespace detail {

inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("SPHINT_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = static_cast<std::size_t>(v);
    }
  }
  if (n == 0) n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs job(i) for i in [0, jobs) on a few threads. Results must be written
/// to per-index slots so the caller can reduce in index order.
template <class Job>
void parallel_for(std::size_t jobs, std::size_t threads, Job&& job) {
  const std::size_t workers = worker_count(threads, jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < jobs; i += workers) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class T>
inline constexpr bool is_complex_v = !std::is_same_v<T, double>;

inline double abs2(double x) { return x * x; }
inline double abs2(const std::complex<double>& z) { return std::norm(z); }
inline double conj(double x) { return x; }
inline std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }

/// Gaussian scalar with E|z|^2 = 1.
template <class T>
T std_normal(Rng& rng) {
  std::normal_distribution<double> nd;
  if constexpr (is_complex_v<T>) {
    const double a = nd(rng), b = nd(rng);
    return {a * M_SQRT1_2, b * M_SQRT1_2};
  } else {
    return nd(rng);
  }
}

/// Removes the components along the first `count` columns (stored as
/// contiguous length-n blocks) and normalizes. Two passes keep the
/// orthogonality residual at round-off level.
template <class T>
void orthonormalize_against(std::vector<T>& g, const std::vector<T>& frame, std::size_t count,
                            std::size_t n) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < count; ++c) {
      const T* col = frame.data() + c * n;
      T dot{};
      for (std::size_t i = 0; i < n; ++i) dot += conj(col[i]) * g[i];
      for (std::size_t i = 0; i < n; ++i) g[i] -= dot * col[i];
    }
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm += abs2(g[i]);
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < n; ++i) g[i] /= norm;
}

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> haar_frame(std::size_t n, std::size_t count,
                                                            Rng& rng) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Mat g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = std_normal<T>(rng);
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(g.rows(), g.cols());
  const Mat r = qr.matrixQR();
  // make diag(R) positive so the law is exactly Haar
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const T d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

}  // namespace detail

/// count orthonormal vectors of dimension config.n drawn from the Haar law.
inline FrameSample sample_frame(const MCConfig& config, std::size_t count) {
  config.validate();
  if (count > config.n) throw ShapeError("sample_frame: count exceeds dimension");
  auto rng = stream_rng(config.seed, 0);
  FrameSample out;
  out.beta = config.beta;
  if (config.beta == 1) {
    out.vectors = detail::haar_frame<double>(config.n, count, rng).cast<std::complex<double>>();
  } else {
    out.vectors = detail::haar_frame<std::complex<double>>(config.n, count, rng);
  }
  return out;
}

/// Dirichlet((beta/2) N_i) weights through normalized Gamma variables.
inline std::vector<double> sample_dirichlet_weights(const DiscreteModel& model, int beta,
                                                    std::uint64_t seed) {
  check_beta(beta);
  auto rng = stream_rng(seed, 0);
  std::vector<double> g(model.size());
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::gamma_distribution<double> gd(0.5 * beta * static_cast<double>(model.mult[i]), 1.0);
    s += (g[i] = gd(rng));
  }
  for (auto& v : g) v /= s;
  return g;
}

enum class MatrixKind { Goe, Gue, Wishart, Profile, RademacherWigner, UniformWigner };

struct MatrixSpec {
  MatrixKind kind = MatrixKind::Goe;
  int beta = 1;       ///< for Wishart, Profile and the sub-Gaussian Wigner laws
  double alpha = 1.0;  ///< Wishart ratio
  VarianceProfile profile{Eigen::MatrixXd::Ones(1, 1), {1.0}};
};

using SampledMatrix = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

namespace detail {

enum class EntryLaw { Gaussian, Rademacher, Uniform };

// unit-variance real entry
inline double real_entry(EntryLaw law, Rng& rng) {
  switch (law) {
    case EntryLaw::Gaussian: return std::normal_distribution<double>()(rng);
    case EntryLaw::Rademacher: return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
    case EntryLaw::Uniform: return std::uniform_real_distribution<double>(-std::sqrt(3.0), std::sqrt(3.0))(rng);
  }
  return 0.0;
}

/// Wigner matrix with E|X_ij|^2 = 1 off the diagonal and E X_ii^2 = 2 for
/// real, 1 for complex, scaled by sigma(i,j)/sqrt(N).
template <class T, class Scale>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> wigner(std::size_t n, EntryLaw law, Rng& rng,
                                                        Scale&& sigma) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  const auto N = static_cast<Eigen::Index>(n);
  Mat x(N, N);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double scale = s * sigma(i, j);
      if (i == j) {
        const double d = real_entry(law, rng);
        x(i, i) = T(d * scale * (is_complex_v<T> ? 1.0 : std::sqrt(2.0)));
      } else if constexpr (is_complex_v<T>) {
        const double a = real_entry(law, rng), b = real_entry(law, rng);
        x(i, j) = T(a * M_SQRT1_2 * scale, b * M_SQRT1_2 * scale);
        x(j, i) = std::conj(x(i, j));
      } else {
        x(i, j) = x(j, i) = real_entry(law, rng) * scale;
      }
    }
  }
  return x;
}

/// (1/M) S^{1/2} G G^* S^{1/2} with G of size n x m, S diagonal.
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> wishart(std::size_t n, std::size_t m, Rng& rng,
                                                         const std::vector<double>& spikes) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Mat g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = std_normal<T>(rng);
  }
  for (std::size_t i = 0; i < spikes.size() && i < n; ++i) {
    g.row(static_cast<Eigen::Index>(i)) *= std::sqrt(1.0 + spikes[i]);
  }
  Mat w = (g * g.adjoint()) / static_cast<double>(m);
  return 0.5 * (w + Mat(w.adjoint()));
}

inline std::size_t wishart_columns(std::size_t n, double alpha) {
  check_alpha(alpha);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) / alpha)));
}

inline std::vector<Eigen::Index> block_of_rows(const std::vector<double>& alpha, std::size_t n) {
  std::vector<Eigen::Index> block(n);
  double cum = 0.0;
  std::size_t start = 0;
  for (std::size_t b = 0; b < alpha.size(); ++b) {
    cum += alpha[b];
    const auto end = b + 1 == alpha.size()
                         ? n
                         : std::min(n, static_cast<std::size_t>(std::llround(cum * static_cast<double>(n))));
    for (std::size_t i = start; i < end; ++i) block[i] = static_cast<Eigen::Index>(b);
    start = std::max(start, end);
  }
  return block;
}

}  // namespace detail

/// One draw from the requested ensemble, normalized so the spectrum stays
/// bounded as n grows. Real kinds return MatrixXd unless beta = 2.
inline SampledMatrix sample_matrix(const MatrixSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_matrix: n must be >= 1");
  auto rng = stream_rng(seed, 1);
  auto unit = [](Eigen::Index, Eigen::Index) { return 1.0; };
  auto make = [&](auto tag, detail::EntryLaw law) -> SampledMatrix {
    using T = decltype(tag);
    return detail::wigner<T>(n, law, rng, unit);
  };
  switch (spec.kind) {
    case MatrixKind::Goe: return make(double{}, detail::EntryLaw::Gaussian);
    case MatrixKind::Gue: return make(std::complex<double>{}, detail::EntryLaw::Gaussian);
    case MatrixKind::RademacherWigner:
    case MatrixKind::UniformWigner: {
      check_beta(spec.beta);
      const auto law = spec.kind == MatrixKind::RademacherWigner ? detail::EntryLaw::Rademacher
                                                                   : detail::EntryLaw::Uniform;
      if (spec.beta == 2) return make(std::complex<double>{}, law);
      return make(double{}, law);
    }
    case MatrixKind::Wishart: {
      check_beta(spec.beta);
      const std::size_t m = detail::wishart_columns(n, spec.alpha);
      if (spec.beta == 2) return detail::wishart<std::complex<double>>(n, m, rng, {});
      return detail::wishart<double>(n, m, rng, {});
    }
    case MatrixKind::Profile: {
      check_beta(spec.beta);
      const auto block = detail::block_of_rows(spec.profile.alpha, n);
      const Eigen::MatrixXd sig = spec.profile.R.cwiseSqrt();
      auto sigma = [&](Eigen::Index i, Eigen::Index j) { return sig(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]); };
      if (spec.beta == 2) return detail::wigner<std::complex<double>>(n, detail::EntryLaw::Gaussian, rng, sigma);
      return detail::wigner<double>(n, detail::EntryLaw::Gaussian, rng, sigma);
    }
  }
  throw DomainError("sample_matrix: unknown kind");
}

namespace detail {

struct LogSumExp {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;  // relative to max

  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= max) {
      sum += std::exp(x - max);
    } else {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  void merge(const LogSumExp& o) {
    if (o.sum == 0.0) return;
    if (sum == 0.0) {
      *this = o;
      return;
    }
    if (o.max <= max) {
      sum += o.sum * std::exp(o.max - max);
    } else {
      sum = sum * std::exp(max - o.max) + o.sum;
      max = o.max;
    }
  }
  double value() const { return sum > 0.0 ? max + std::log(sum) : -std::numeric_limits<double>::infinity(); }
};

// log(exp(a) - exp(b)) for a >= b, or -inf when the difference vanishes
inline double log_diff_exp(double a, double b) {
  if (!(a > b)) return -std::numeric_limits<double>::infinity();
  return a + std::log1p(-std::exp(b - a));
}

struct BatchTotals {
  LogSumExp w;   // log weights times integrand
  LogSumExp w2;  // squares, for the effective sample size
  std::size_t count = 0;
};

inline MCResult reduce_batches(const std::vector<BatchTotals>& batches, double n_dim) {
  LogSumExp all, all2;
  std::size_t total = 0;
  for (const auto& b : batches) {
    all.merge(b.w);
    all2.merge(b.w2);
    total += b.count;
  }
  MCResult r;
  r.samples = total;
  const double lt = all.value();
  r.estimate = (lt - std::log(static_cast<double>(total))) / n_dim;
  r.ess = std::exp(2.0 * lt - all2.value());
  const std::size_t nb = batches.size();
  if (nb < 2) {
    r.std_error = std::numeric_limits<double>::infinity();
    return r;
  }
  std::vector<double> loo(nb);
  double mean = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double rest = log_diff_exp(lt, batches[b].w.value());
    loo[b] = (rest - std::log(static_cast<double>(total - batches[b].count))) / n_dim;
    mean += loo[b];
  }
  mean /= static_cast<double>(nb);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  r.std_error = std::sqrt(static_cast<double>(nb - 1) / static_cast<double>(nb) * ss);
  if (!std::isfinite(r.std_error)) r.std_error = std::numeric_limits<double>::infinity();
  return r;
}

/// Tilted proposal precisions for one frame column, in the eigenbasis.
/// Coordinates below the saddle point v get v - x_i; the target outlier gets
/// the share of mass left over when the tilt binds; anything above v gets a
/// width of order 1/theta.
inline std::vector<double> column_precision(const std::vector<double>& x, std::size_t bulk_lo,
                                            std::size_t bulk_hi, std::size_t target,
                                            double theta) {
  const std::size_t n = x.size();
  std::vector<double> r(n, 1.0);
  if (theta == 0.0) return r;
  // mirror negative tilts so the target is on the right
  const double sgn = theta > 0.0 ? 1.0 : -1.0;
  const double t = std::abs(theta);
  auto pos = [&](std::size_t i) { return sgn * x[i]; };
  double edge = -std::numeric_limits<double>::infinity();
  for (std::size_t i = bulk_lo; i < bulk_hi; ++i) edge = std::max(edge, pos(i));
  const double nb = static_cast<double>(bulk_hi - bulk_lo);
  auto g = [&](double z) {
    double s = 0.0;
    for (std::size_t i = bulk_lo; i < bulk_hi; ++i) s += 1.0 / (z - pos(i));
    return s / nb;
  };
  const double lambda = pos(target);
  double v = lambda, share = 0.0;
  const double g_lambda = lambda > edge ? g(lambda) : std::numeric_limits<double>::infinity();
  if (g_lambda <= t) {
    share = 1.0 - g_lambda / t;
  } else {
    v = bisect_decreasing([&](double z) { return g(z) - t; }, std::max(edge, lambda),
                          edge + 1.0 / t);
  }
  const double scale = 1.0 + std::abs(v);
  const double floor = 1e-10 * scale;
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == target && share > 0.0) continue;
    const double d = v - pos(i);
    r[i] = d > 0.0 ? std::max(d, floor) : (-d + 1.0 / t);
    inv_sum += 1.0 / r[i];
  }
  if (share > 0.0) {
    r[target] = std::max((1.0 - share) / (share * inv_sum), floor);
  }
  return r;
}

struct ColumnPlan {
  double theta = 0.0;
  std::vector<double> precision;
  double log_det_cov = 0.0;  // -sum ln p_i
};

template <class T>
BatchTotals run_batch(const std::vector<double>& x, const std::vector<ColumnPlan>& plan,
                      std::size_t count, int beta, bool tilted, Rng& rng) {
  const std::size_t n = x.size();
  const std::size_t m = plan.size();
  const double half_beta_n = 0.5 * beta * static_cast<double>(n);
  // real frames: ACG density exponent d/2, complex: d
  const double power = beta == 1 ? 0.5 : 1.0;
  std::vector<T> frame(n * m), g(n);
  std::normal_distribution<double> nd;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> A;
  Eigen::Matrix<T, Eigen::Dynamic, 1> b;
  BatchTotals out;
  for (std::size_t s = 0; s < count; ++s) {
    double log_w = 0.0, exponent = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& p = plan[j].precision;
      for (std::size_t i = 0; i < n; ++i) {
        const double sd = tilted ? 1.0 / std::sqrt(p[i]) : 1.0;
        if constexpr (is_complex_v<T>) {
          g[i] = T(nd(rng) * sd * M_SQRT1_2, nd(rng) * sd * M_SQRT1_2);
        } else {
          g[i] = nd(rng) * sd;
        }
      }
      orthonormalize_against(g, frame, j, n);
      std::copy(g.begin(), g.end(), frame.begin() + static_cast<std::ptrdiff_t>(j * n));
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) exponent += plan[j].theta * x[i] * abs2(g[i]);
      if (!tilted) continue;
      for (std::size_t i = 0; i < n; ++i) quad += p[i] * abs2(g[i]);
      double log_det_a = 0.0;
      if (j > 0) {
        const auto J = static_cast<Eigen::Index>(j);
        A.resize(J, J);
        b.resize(J);
        for (Eigen::Index a = 0; a < J; ++a) {
          const T* ca = frame.data() + static_cast<std::size_t>(a) * n;
          T acc{};
          for (std::size_t i = 0; i < n; ++i) acc += conj(ca[i]) * p[i] * g[i];
          b(a) = acc;
          for (Eigen::Index c = a; c < J; ++c) {
            const T* cc = frame.data() + static_cast<std::size_t>(c) * n;
            T v{};
            for (std::size_t i = 0; i < n; ++i) v += conj(ca[i]) * p[i] * cc[i];
            A(a, c) = v;
            A(c, a) = conj(v);
          }
        }
        Eigen::LLT<decltype(A)> llt(A);
        for (Eigen::Index a = 0; a < J; ++a) log_det_a += 2.0 * std::log(std::real(llt.matrixLLT()(a, a)));
        const auto sol = llt.solve(b);
        quad -= std::real(b.dot(sol));
      }
      const double d = static_cast<double>(n - j);
      log_w += power * (plan[j].log_det_cov + log_det_a + d * std::log(quad));
    }
    const double lv = half_beta_n * exponent + log_w;
    out.w.add(lv);
    out.w2.add(2.0 * lv);
    ++out.count;
  }
  return out;
}

}  // namespace detail

/// Eigenvalues of a Hermitian matrix, ascending.
inline std::vector<double> hermitian_eigenvalues(const SampledMatrix& m) {
  return std::visit(
      [](const auto& a) {
        if (a.rows() != a.cols()) throw ShapeError("matrix must be square");
        const double scale = 1.0 + a.cwiseAbs().maxCoeff();
        if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
          throw DomainError("matrix must be Hermitian");
        }
        using M = std::decay_t<decltype(a)>;
        Eigen::SelfAdjointEigenSolver<M> es(a, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        return std::vector<double>(ev.data(), ev.data() + ev.size());
      },
      m);
}

/// (1/N) log E exp((beta N/2) sum_j theta_j <e_j, X e_j>) over Haar frames,
/// given the spectrum of X. Top tilts pair with the largest eigenvalues in
/// order, bottom tilts (theta_{-l} first) with the smallest.
inline MCResult mc_spherical_spectrum(std::vector<double> x, const ThetaSpec& thetas,
                                      const MCConfig& config) {
  config.validate();
  thetas.validate();
  const std::size_t n = x.size();
  const std::size_t k = thetas.top.size(), l = thetas.bottom.size();
  if (config.n != 0 && config.n != n) throw ShapeError("mc_spherical: config.n differs from the matrix");
  if (n < 1 || k + l > n) throw ShapeError("mc_spherical: need N >= k + l");
  std::sort(x.begin(), x.end());
  MCResult zero;
  zero.samples = config.samples;
  zero.ess = static_cast<double>(config.samples);
  const bool all_zero = std::all_of(thetas.top.begin(), thetas.top.end(), [](double t) { return t == 0.0; }) &&
                        std::all_of(thetas.bottom.begin(), thetas.bottom.end(), [](double t) { return t == 0.0; });
  if (all_zero) return zero;

  std::vector<detail::ColumnPlan> plan;
  const std::size_t bulk_lo = l, bulk_hi = n - k;
  const bool have_bulk = bulk_hi > bulk_lo;
  auto add_column = [&](double theta, std::size_t target) {
    detail::ColumnPlan c;
    c.theta = theta;
    if (config.proposal == Proposal::Tilted && have_bulk) {
      c.precision = detail::column_precision(x, bulk_lo, bulk_hi, target, theta);
    } else {
      c.precision.assign(n, 1.0);
    }
    for (double p : c.precision) c.log_det_cov -= std::log(p);
    plan.push_back(std::move(c));
  };
  for (std::size_t j = 0; j < k; ++j) add_column(thetas.top[j], n - 1 - j);
  for (std::size_t j = 0; j < l; ++j) add_column(thetas.bottom[j], l - 1 - j);

  const bool tilted = config.proposal == Proposal::Tilted && have_bulk;
  const std::size_t nb = std::min(config.batches, config.samples);
  std::vector<detail::BatchTotals> totals(nb);
  detail::parallel_for(nb, config.threads, [&](std::size_t b) {
    const std::size_t count = config.samples / nb + (b < config.samples % nb ? 1 : 0);
    auto rng = stream_rng(config.seed, b);
    totals[b] = config.beta == 1
                    ? detail::run_batch<double>(x, plan, count, 1, tilted, rng)
                    : detail::run_batch<std::complex<double>>(x, plan, count, 2, tilted, rng);
  });
  return detail::reduce_batches(totals, static_cast<double>(n));
}

inline MCResult mc_spherical(const SampledMatrix& matrix, const ThetaSpec& thetas,
                             const MCConfig& config) {
  return mc_spherical_spectrum(hermitian_eigenvalues(matrix), thetas, config);
}

/// Rank-one version of mc_spherical that samples only the Dirichlet
/// squared projections onto the eigenspaces of a discrete model. Draws
/// Gamma(b_i, rate r_i) variables and reweights by
/// (sum r_i gamma_i)^B / prod r_i^{b_i}.
inline MCResult mc_dirichlet_spherical(const DiscreteModel& model, double theta,
                                       const MCConfig& config) {
  config.validate();
  if (!std::isfinite(theta)) throw DomainError("mc_dirichlet_spherical: theta must be finite");
  const double n_total = static_cast<double>(model.total());
  if (config.n != 0 && static_cast<double>(config.n) != n_total) {
    throw ShapeError("mc_dirichlet_spherical: config.n differs from the model");
  }
  MCResult zero;
  zero.samples = config.samples;
  zero.ess = static_cast<double>(config.samples);
  if (theta == 0.0) return zero;
  const DiscreteModel m = theta < 0.0 ? model.reflected() : model;
  const double t = std::abs(theta);
  const std::size_t p = m.size();
  const double half_beta = 0.5 * config.beta;
  std::vector<double> shape(p), rate(p, 1.0);
  double big_b = 0.0;
  for (std::size_t i = 0; i < p; ++i) big_b += (shape[i] = half_beta * static_cast<double>(m.mult[i]));

  if (config.proposal == Proposal::Tilted && p > 1) {
    // same saddle-point construction as the frame sampler, with the top
    // eigenvalue as target and the rest as the bulk
    const std::size_t top = p - 1;
    const double rest = n_total - static_cast<double>(m.mult[top]);
    auto g = [&](double z) {
      double s = 0.0;
      for (std::size_t i = 0; i < top; ++i) s += static_cast<double>(m.mult[i]) / (z - m.etas[i]);
      return s / rest;
    };
    const double lambda = m.etas[top], edge = m.etas[top - 1];
    double v = lambda, share = 0.0;
    const double gl = g(lambda);
    if (gl <= t) {
      share = 1.0 - gl / t;
    } else {
      v = detail::bisect_decreasing([&](double z) { return g(z) - t; }, lambda, edge + 1.0 / t);
    }
    double mean_rest = 0.0;
    for (std::size_t i = 0; i < top; ++i) {
      rate[i] = std::max(v - m.etas[i], 1e-10 * (1.0 + std::abs(v)));
      mean_rest += shape[i] / rate[i];
    }
    rate[top] = share > 0.0 ? shape[top] * (1.0 - share) / (share * mean_rest)
                            : std::max(v - lambda, 1e-10 * (1.0 + std::abs(v)));
  }
  double log_rate_term = 0.0;
  for (std::size_t i = 0; i < p; ++i) log_rate_term += shape[i] * std::log(rate[i]);

  const std::size_t nb = std::min(config.batches, config.samples);
  std::vector<detail::BatchTotals> totals(nb);
  detail::parallel_for(nb, config.threads, [&](std::size_t b) {
    const std::size_t count = config.samples / nb + (b < config.samples % nb ? 1 : 0);
    auto rng = stream_rng(config.seed, b);
    std::vector<std::gamma_distribution<double>> dists;
    for (std::size_t i = 0; i < p; ++i) dists.emplace_back(shape[i], 1.0 / rate[i]);
    std::vector<double> y(p);
    detail::BatchTotals out;
    for (std::size_t s = 0; s < count; ++s) {
      double sum = 0.0, rsum = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        y[i] = dists[i](rng);
        sum += y[i];
        rsum += rate[i] * y[i];
      }
      double lin = 0.0;
      for (std::size_t i = 0; i < p; ++i) lin += m.etas[i] * y[i];
      lin /= sum;
      const double lv = half_beta * n_total * t * lin + big_b * std::log(rsum / sum) - log_rate_term;
      out.w.add(lv);
      out.w2.add(2.0 * lv);
      ++out.count;
    }
    totals[b] = out;
  });
  return detail::reduce_batches(totals, n_total);
}

/// Psi = U1^* U1 where U1 holds the first L rows of a Haar (L+M) x k frame.
inline Eigen::MatrixXcd sample_jacobi_gram(std::size_t L, std::size_t M, std::size_t k, int beta,
                                           std::uint64_t seed) {
  check_beta(beta);
  if (k > L + M) throw ShapeError("sample_jacobi_gram: need L + M >= k");
  auto rng = stream_rng(seed, 2);
  const auto l = static_cast<Eigen::Index>(L);
  if (beta == 1) {
    const Eigen::MatrixXd u = detail::haar_frame<double>(L + M, k, rng);
    const Eigen::MatrixXd top = u.topRows(l);
    return (top.transpose() * top).cast<std::complex<double>>();
  }
  const Eigen::MatrixXcd u = detail::haar_frame<std::complex<double>>(L + M, k, rng);
  const Eigen::MatrixXcd top = u.topRows(l);
  return top.adjoint() * top;
}

struct PerturbedKind {
  enum class Base { Wigner, Wishart } base = Base::Wigner;
  /// thetas for Wigner, gammas for Wishart
  std::vector<double> strengths;
  double alpha = 1.0;
  int beta = 1;
};

struct ExtremeEigenvalues {
  std::vector<double> top;     ///< descending
  std::vector<double> bottom;  ///< ascending
};

/// Samples GOE/GUE + sum theta_i e_i e_i^*, or a Wishart matrix with
/// population covariance I + sum gamma_i e_i e_i^*, and returns as many top
/// eigenvalues as there are positive strengths (at least one) and as many
/// bottom eigenvalues as negative ones.
inline ExtremeEigenvalues mc_perturbed_spectrum(const PerturbedKind& kind, std::size_t n,
                                                std::uint64_t seed) {
  check_beta(kind.beta);
  if (kind.strengths.size() > 8) throw DomainError("mc_perturbed_spectrum: rank must be <= 8");
  if (kind.strengths.size() > n) throw ShapeError("mc_perturbed_spectrum: rank exceeds n");
  auto rng = stream_rng(seed, 3);
  std::vector<double> ev;
  auto spectrum = [&](const auto& mat) {
    using M = std::decay_t<decltype(mat)>;
    Eigen::SelfAdjointEigenSolver<M> es(mat, Eigen::EigenvaluesOnly);
    ev.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  };
  auto unit = [](Eigen::Index, Eigen::Index) { return 1.0; };
  if (kind.base == PerturbedKind::Base::Wigner) {
    for (double t : kind.strengths) {
      if (!std::isfinite(t)) throw DomainError("mc_perturbed_spectrum: non-finite theta");
    }
    auto run = [&](auto tag) {
      using T = decltype(tag);
      auto x = detail::wigner<T>(n, detail::EntryLaw::Gaussian, rng, unit);
      for (std::size_t i = 0; i < kind.strengths.size(); ++i) {
        const auto d = static_cast<Eigen::Index>(i);
        x(d, d) += kind.strengths[i];
      }
      spectrum(x);
    };
    if (kind.beta == 1) {
      run(double{});
    } else {
      run(std::complex<double>{});
    }
  } else {
    for (double g : kind.strengths) {
      if (!(g > -1.0)) throw DomainError("mc_perturbed_spectrum: gammas must exceed -1");
    }
    const std::size_t m = detail::wishart_columns(n, kind.alpha);
    if (kind.beta == 1) {
      spectrum(detail::wishart<double>(n, m, rng, kind.strengths));
    } else {
      spectrum(detail::wishart<std::complex<double>>(n, m, rng, kind.strengths));
    }
  }
  std::size_t k = 0, l = 0;
  for (double s : kind.strengths) {
    if (s > 0.0) ++k;
    if (s < 0.0) ++l;
  }
  k = std::max<std::size_t>(k, 1);
  ExtremeEigenvalues out;
  for (std::size_t i = 0; i < k && i < ev.size(); ++i) out.top.push_back(ev[ev.size() - 1 - i]);
  for (std::size_t i = 0; i < l && i < ev.size(); ++i) out.bottom.push_back(ev[i]);
  return out;
}

}  // namespace sphint
