#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sphint/ldp.hpp"

using namespace sphint;

namespace {

VarianceProfile profile2(double a, double b, double c, double w0 = 0.5) {
  Eigen::MatrixXd R(2, 2);
  R << a, b, b, c;
  return VarianceProfile::make(R, {w0, 1.0 - w0});
}

/// Spiked-covariance outlier (1 + gamma)(1 + alpha/gamma) above the
/// threshold gamma > sqrt(alpha).
double spiked_outlier(double gamma, double alpha) { return (1.0 + gamma) * (1.0 + alpha / gamma); }

}  // namespace

TEST(Ldp, WignerRateExamples) {
  EXPECT_EQ(wigner_rate(2.0, 1), 0.0);
  EXPECT_EQ(wigner_rate(-2.0, 2), 0.0);
  const double closed = 0.5 * (1.5 * std::sqrt(5.0) - 2.0 * std::log((3.0 + std::sqrt(5.0)) / 2.0));
  EXPECT_NEAR(wigner_rate(3.0, 1), closed, 1e-14);
  EXPECT_TRUE(std::isinf(wigner_rate(1.0, 1)));
  EXPECT_THROW(wigner_rate(3.0, 3), DomainError);
  for (double x : {2.01, 2.5, 3.0, 4.0, 7.0}) {
    EXPECT_NEAR(wigner_rate(x, 1), 0.5 * oracle::wigner_integral(x), 1e-11) << x;
    EXPECT_NEAR(wigner_rate(x, 2), oracle::wigner_integral(x), 1e-11) << x;
  }
  EXPECT_DOUBLE_EQ(wigner_rate_vector({3.0, 2.5, -2.2}, 1), wigner_rate(3.0, 1) + wigner_rate(2.5, 1) + wigner_rate(2.2, 1));
}

TEST(Ldp, WishartRateExamples) {
  EXPECT_EQ(wishart_rate(2.25, 0.25, 1), 0.0);
  EXPECT_EQ(wishart_rate(4.0, 1.0, 1), 0.0);
  EXPECT_TRUE(std::isinf(wishart_rate(2.0, 0.25, 1)));
  EXPECT_THROW(wishart_rate(3.0, 0.0, 1), DomainError);
  EXPECT_THROW(wishart_rate(3.0, 1.5, 1), DomainError);
  const double v = wishart_rate(5.0, 0.25, 2);
  EXPECT_GT(v, 0.0);
  for (double alpha : {0.1, 0.25, 0.6, 1.0}) {
    for (double d : {0.01, 0.5, 3.0}) {
      const double x = oracle::mp_edges(alpha).second + d;
      const double ref = 1.0 / (4.0 * (1.0 + alpha)) * oracle::wishart_integral(x, alpha);
      EXPECT_NEAR(wishart_rate(x, alpha, 1), ref, 1e-10) << alpha << " " << d;
      EXPECT_NEAR(wishart_rate(x, alpha, 2), 2.0 * ref, 1e-10);
    }
  }
}

TEST(Ldp, WishartTwoFormsAgree) {
  for (double alpha : {0.25, 0.5}) {
    const auto [lm, lp] = oracle::mp_edges(alpha);
    for (double x : {lp + 0.3, lp + 2.0}) {
      EXPECT_NEAR(wishart_potential_rate(x, alpha, 1), wishart_rate(x, alpha, 1), 1e-6);
    }
    for (double x : {0.5 * lm, 0.9 * lm}) {
      EXPECT_NEAR(wishart_potential_rate(x, alpha, 1), wishart_bottom_rate(x, alpha, 1), 1e-6);
    }
  }
}

TEST(Ldp, BbpMaps) {
  EXPECT_DOUBLE_EQ(bbp_outlier(2.0), 2.5);
  EXPECT_DOUBLE_EQ(theta_for_outlier(2.5), 2.0);
  EXPECT_DOUBLE_EQ(bbp_outlier(1.0), 2.0);
  EXPECT_THROW(bbp_outlier(0.5), DomainError);
  EXPECT_THROW(theta_for_outlier(1.9), DomainError);
  for (double t : {1.0, 1.3, 2.0, 7.5}) EXPECT_NEAR(theta_for_outlier(bbp_outlier(t)), t, 1e-12);
}

TEST(Ldp, LegendreDuality) {
  EXPECT_NEAR(legendre_check_wigner(2.0), 0.0, 1e-12);
  for (double x : {2.05, 2.1, 2.5, 3.0, 4.0}) {
    EXPECT_NEAR(legendre_check_wigner(x), 2.0 * wigner_rate(x, 1), 1e-6) << x;
    EXPECT_NEAR(legendre_check_wigner(x), oracle::wigner_integral(x), 1e-6) << x;
  }
}

TEST(Ldp, LegendreAgainstBruteForce) {
  // sup over a theta grid, independent of the golden-section search
  const oracle::Law sc = oracle::semicircle();
  for (double x : {2.5, 3.0}) {
    double best = 0.0;
    for (int k = 1; k <= 2000; ++k) {
      const double t = 0.002 * k;
      best = std::max(best, oracle::J(sc, t, x) - 0.5 * t * t);
    }
    EXPECT_NEAR(legendre_check_wigner(x), best, 1e-5);
  }
}

TEST(Ldp, PerturbedWignerArgminIsBbp) {
  for (double t : {1.2, 1.5, 2.0, 3.0}) {
    EXPECT_NEAR(perturbed_wigner_argmin(t), bbp_outlier(t), 1e-4) << t;
    EXPECT_NEAR(perturbed_wigner_rate(bbp_outlier(t), t, 1), 0.0, 1e-8);
  }
  EXPECT_NEAR(perturbed_wigner_argmin(0.5), 2.0, 1e-6);
  EXPECT_NEAR(perturbed_wigner_argmin(-2.0), -2.5, 1e-4);
}

TEST(Ldp, PerturbedWignerRate) {
  EXPECT_TRUE(std::isinf(perturbed_wigner_rate(1.5, 2.0, 1)));
  for (double x : {2.2, 3.0, 5.0}) EXPECT_GE(perturbed_wigner_rate(x, 2.0, 1), 0.0);
  // theta = 0 recovers the unperturbed edge rate without beta/2
  for (double x : {2.5, 3.0, 4.0}) {
    EXPECT_NEAR(perturbed_wigner_rate(x, 0.0, 1), 0.5 * oracle::wigner_integral(x), 1e-8) << x;
  }
  // mirror symmetry
  EXPECT_NEAR(perturbed_wigner_rate(-3.0, -2.0, 1), perturbed_wigner_rate(3.0, 2.0, 1), 1e-14);
  EXPECT_NEAR(perturbed_wigner_rate_vector({3.0, 2.7}, {2.0, 1.5}, 2),
              2.0 * (perturbed_wigner_rate(3.0, 2.0, 2) + perturbed_wigner_rate(2.7, 1.5, 2)), 1e-14);
  EXPECT_THROW(perturbed_wigner_rate_vector({3.0}, {2.0, 1.0}, 1), ShapeError);
}

TEST(Ldp, PerturbedWignerAgainstOracle) {
  // I(x) - J/2 recentred, with every piece from the reference oracles
  const oracle::Law sc = oracle::semicircle();
  const double theta = 1.7;
  auto raw = [&](double x) { return 0.25 * x * x - sc.L(x) - 0.5 * oracle::J(sc, theta, x); };
  const auto [xm, vm] = oracle::brent_min(raw, 2.0, 8.0);
  EXPECT_NEAR(xm, bbp_outlier(theta), 1e-6);
  for (double x : {2.3, 3.0, 4.5}) EXPECT_NEAR(perturbed_wigner_rate(x, theta, 1), raw(x) - vm, 1e-8) << x;
}

TEST(Ldp, PerturbedWishart) {
  EXPECT_NEAR(perturbed_wishart_argmin(1.0, 0.25, 1), spiked_outlier(1.0, 0.25), 1e-5);
  EXPECT_NEAR(perturbed_wishart_argmin(2.0, 0.5, 2), spiked_outlier(2.0, 0.5), 1e-5);
  // below the threshold nothing detaches
  EXPECT_NEAR(perturbed_wishart_argmin(0.3, 0.25, 1), 2.25, 1e-5);
  EXPECT_NEAR(perturbed_wishart_rate(spiked_outlier(1.0, 0.25), 1.0, 0.25, 1), 0.0, 1e-8);
  // gamma -> 0 continuity
  for (double x : {2.6, 3.5}) {
    EXPECT_NEAR(perturbed_wishart_rate(x, 1e-6, 0.25, 1), perturbed_wishart_rate(x, 0.0, 0.25, 1), 1e-4);
  }
  // gamma = 0 on the soft edge below: the two displayed forms of I_alpha
  const double lm = oracle::mp_edges(0.25).first;
  EXPECT_NEAR(perturbed_wishart_rate(0.5 * lm, 0.0, 0.25, 1), wishart_bottom_rate(0.5 * lm, 0.25, 1), 1e-6);
  // negative spikes act on the bottom edge
  const double low = perturbed_wishart_argmin(-0.8, 0.25, 1);
  EXPECT_NEAR(low, spiked_outlier(-0.8, 0.25), 1e-5);
  EXPECT_TRUE(std::isinf(perturbed_wishart_rate(1.0, -0.8, 0.25, 1)));
  EXPECT_THROW(perturbed_wishart_rate(3.0, -1.0, 0.25, 1), DomainError);
  EXPECT_THROW(perturbed_wishart_rate(0.1, -0.5, 1.0, 1), DomainError);
}

TEST(Ldp, AnnealedWishart) {
  auto r = annealed_lambda_wishart(0.0, 0.5);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_DOUBLE_EQ(r.maximizer, 1.0 / 1.5);
  r = annealed_lambda_wishart(1.0, 1.0);
  EXPECT_NEAR(r.maximizer, 0.5, 1e-12);
  EXPECT_NEAR(r.value, 0.25, 1e-12);
  r = annealed_lambda_wishart(2.0, 0.25);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_NEAR(r.value, oracle::annealed_wishart(2.0, 0.25), 1e-9);
  EXPECT_DOUBLE_EQ(annealed_lambda_wishart_multi({1.0, 2.0}, 0.25),
                   annealed_lambda_wishart(1.0, 0.25).value + annealed_lambda_wishart(2.0, 0.25).value);
  EXPECT_THROW(annealed_lambda_wishart(1.0, 0.0), DomainError);
}

TEST(Ldp, AssumptionNeg) {
  auto ones = profile2(1.0, 1.0, 1.0);
  auto d = assumption_neg_details(ones);
  EXPECT_TRUE(d.negative);
  EXPECT_TRUE(d.semidefinite_boundary);
  EXPECT_FALSE(assumption_neg_check(profile2(1.0, 0.0, 1.0)));
  d = assumption_neg_details(profile2(2.0, 1.0, 2.0));
  EXPECT_FALSE(d.negative);
  ASSERT_EQ(d.eigenvalues.size(), 1u);
  EXPECT_NEAR(d.eigenvalues[0], 1.0, 1e-14);
  EXPECT_TRUE(assumption_neg_check(profile2(1.0, 2.0, 1.0)));
}

TEST(Ldp, AnnealedProfile) {
  auto r = annealed_lambda_profile(0.0, profile2(1.0, 2.0, 1.0, 0.3));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_DOUBLE_EQ(r.maximizer[0], 0.3);
  // all-ones R: constant quadratic form, maximizer alpha
  r = annealed_lambda_profile(1.5, profile2(1.0, 1.0, 1.0, 0.3));
  EXPECT_NEAR(r.value, 0.5 * 1.5 * 1.5, 1e-12);
  EXPECT_NEAR(r.maximizer[0], 0.3, 1e-9);
  EXPECT_THROW(annealed_lambda_profile(1.0, profile2(1.0, 0.0, 1.0)), AssumptionError);
  // identity R at theta = 1 with the assumption check waived
  r = annealed_lambda_profile(1.0, profile2(1.0, 0.0, 1.0), false);
  const double R[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  const double a[2] = {0.5, 0.5};
  EXPECT_NEAR(r.value, oracle::profile2_grid(1.0, R, a), 1e-4);
  EXPECT_LE(r.kkt_residual, 1e-8);
}

TEST(Ldp, ProfileDiscretize) {
  auto p = profile_discretize([](double, double) { return 2.0; }, 3);
  EXPECT_EQ(p.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(p.R(i, j), 4.0, 1e-12);
    EXPECT_DOUBLE_EQ(p.alpha[static_cast<std::size_t>(i)], 1.0 / 3.0);
  }
  p = profile_discretize([](double x, double y) { return std::sqrt(x + y); }, 2);
  // cell averages of x + y: 1/2, 1, 3/2
  EXPECT_NEAR(p.R(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(p.R(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(p.R(1, 1), 1.5, 1e-12);
  p = profile_discretize([](double x, double y) { return 1.0 + x * y; }, 1);
  EXPECT_NEAR(p.R(0, 0), 1.0 + 2.0 * 0.25 + 1.0 / 9.0, 1e-12);
  EXPECT_THROW(profile_discretize([](double, double) { return 1.0; }, 0), DomainError);
}

TEST(Ldp, IntervalCost) {
  auto wr = [](double x) { return wigner_rate(x, 1); };
  EXPECT_EQ(outlier_interval_cost({{2.5, 3.0}}, {0}, wr, 2.0), 0.0);
  EXPECT_NEAR(outlier_interval_cost({{2.5, 3.0}}, {2}, wr, 2.0), 2.0 * wigner_rate(2.5, 1), 1e-12);
  EXPECT_NEAR(outlier_interval_cost({{2.5, 3.0}, {3.5, 4.0}}, {1, 2}, wr, 2.0),
              wigner_rate(2.5, 1) + 2.0 * wigner_rate(3.5, 1), 1e-12);
  EXPECT_THROW(outlier_interval_cost({{2.5, 3.0}, {2.9, 4.0}}, {1, 1}, wr, 2.0), DomainError);
  EXPECT_THROW(outlier_interval_cost({{1.5, 3.0}}, {1}, wr, 2.0), DomainError);
  EXPECT_THROW(outlier_interval_cost({{2.5, 3.0}}, {1, 1}, wr, 2.0), ShapeError);
}
