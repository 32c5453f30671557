#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sphint/spherical.hpp"

using namespace sphint;

namespace {

const SpectralMeasure kDelta0 = SpectralMeasure::delta(0.0);

DiscreteModel delta_plus_outlier() { return DiscreteModel::make({0.0, 1.0}, {99, 1}, 0, 0); }

}  // namespace

TEST(Spherical, VStarExamples) {
  EXPECT_EQ(v_star(kDelta0, 2.0, 1.0), 1.0);
  EXPECT_NEAR(v_star(kDelta0, 0.5, 1.0), 2.0, 1e-12);
  // G(3) = 0.382 <= 0.5, so the tilt binds and v = lambda
  EXPECT_EQ(v_star(SpectralMeasure::semicircle(), 0.5, 3.0), 3.0);
  // G(2.2) = 0.642 > 0.5: the inverse branch, G^{-1}(0.5) = 2.5
  EXPECT_NEAR(v_star(SpectralMeasure::semicircle(), 0.5, 2.2), 2.5, 1e-12);
  EXPECT_THROW(v_star(SpectralMeasure::semicircle(), 1.0, 1.0), DomainError);
  EXPECT_THROW(v_star(SpectralMeasure::semicircle(), -1.0, 3.0), DomainError);
  EXPECT_THROW(v_star(SpectralMeasure::semicircle(), 0.0, 3.0), DomainError);
  // edge with infinite G: the inverse branch
  EXPECT_NEAR(v_star(kDelta0, 2.0, 0.0), 0.5, 1e-12);
}

TEST(Spherical, JOneExamples) {
  auto r = j_one(SpectralMeasure::semicircle(), 0.0, 3.0);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.regime, Regime::ZeroTilt);
  r = j_one(kDelta0, 1.0, 1.0);
  EXPECT_NEAR(r.value, 0.0, 1e-15);
  r = j_one(kDelta0, 2.0, 1.0);
  EXPECT_NEAR(r.value, 1.0 - std::log(2.0), 1e-15);
  EXPECT_EQ(r.regime, Regime::TiltBinds);
  r = j_one(kDelta0, 0.5, 1.0);
  EXPECT_EQ(r.regime, Regime::InverseBinds);
  EXPECT_STREQ(to_string(Regime::InverseBinds), "inverse-binds");
}

TEST(Spherical, JOneAgainstQuadratureOracle) {
  const std::vector<std::pair<SpectralMeasure, oracle::Law>> cases = {
      {SpectralMeasure::semicircle(), oracle::semicircle()},
      {SpectralMeasure::marchenko_pastur(0.25), oracle::marchenko_pastur(0.25)},
      {SpectralMeasure::marchenko_pastur(1.0), oracle::marchenko_pastur(1.0)},
      {SpectralMeasure::atoms({{-1.0, 0.3}, {0.5, 0.7}}), oracle::atoms({{-1.0, 0.3}, {0.5, 0.7}})},
  };
  for (const auto& [mu, ref] : cases) {
    const double r = support_edges(mu).right;
    for (double theta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      for (double d : {0.0, 0.2, 1.0, 3.0}) {
        if (d == 0.0 && mu.is_discrete()) continue;
        const double lambda = r + d;
        EXPECT_NEAR(j_one(mu, theta, lambda).value, oracle::J(ref, theta, lambda), 1e-8)
            << "theta " << theta << " lambda " << lambda;
      }
    }
  }
}

TEST(Spherical, JMultiExamples) {
  const auto sc = SpectralMeasure::semicircle();
  EXPECT_EQ(j_multi(sc, {{0.0, 0.0}, {}}, {{3.0, 2.5}, {}}), 0.0);
  EXPECT_NEAR(j_multi(kDelta0, {{2.0, 1.0}, {}}, {{1.0, 1.0}, {}}), 1.0 - std::log(2.0), 1e-15);
  EXPECT_NEAR(j_multi(sc, {{1.5, 1.5}, {}}, {{3.0, 3.0}, {}}), 2.0 * j_one(sc, 1.5, 3.0).value, 1e-15);
  EXPECT_THROW(j_multi(sc, {{1.0}, {}}, {{3.0, 2.5}, {}}), ShapeError);
  const double both = j_multi(sc, {{1.0}, {-1.0}}, {{3.0}, {-2.5}});
  EXPECT_NEAR(both, j_one(sc, 1.0, 3.0).value + j_one(sc, -1.0, -2.5).value, 1e-15);
}

TEST(Spherical, SimplexExamples) {
  const auto model = delta_plus_outlier();
  EXPECT_NEAR(simplex_oracle_1d(model, 2.0), 1.0 - std::log(2.0), 1e-12);
  EXPECT_NEAR(simplex_oracle_1d(model, 2.0), oracle::two_point_simplex(2.0), 1e-9);
  EXPECT_NEAR(simplex_oracle_1d(model, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(simplex_oracle_1d(model, 1.0), oracle::two_point_simplex(1.0), 1e-9);
  const auto sol = simplex_solve_1d(model, 0.0);
  EXPECT_EQ(sol.value, 0.0);
  EXPECT_NEAR(sol.gamma[0], 1.0, 1e-15);
  EXPECT_NEAR(sol.gamma[1], 0.0, 1e-15);
}

TEST(Spherical, SimplexMatchesJOneOnRandomModels) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> th(0.1, 5.0);
  for (int i = 0; i < 40; ++i) {
    const auto model = fixtures::random_model(rng);
    const double theta = th(rng);
    const double j = j_one(model.bulk_measure(), theta, model.etas.back()).value;
    const double s = simplex_oracle_1d(model, theta);
    EXPECT_LE(std::abs(s - j), 1e-8 * std::max(1.0, std::abs(j))) << i;
    // the mirrored problem for negative tilts
    const double jb = j_one(model.bulk_measure(), -theta, model.etas.front()).value;
    EXPECT_LE(std::abs(simplex_oracle_1d(model, -theta) - jb), 1e-8 * std::max(1.0, std::abs(jb)));
  }
}

TEST(Spherical, SupremumDominatesFeasiblePoint) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto model = fixtures::random_model(rng);
    const double theta = 0.3 + 0.2 * i;
    const double j = j_one(model.bulk_measure(), theta, model.etas.back()).value;
    EXPECT_GE(j + 1e-12, simplex_objective(model, theta, model.alphas()));
  }
}

TEST(Spherical, InterlacingRoots) {
  auto m = DiscreteModel::make({-1.0, 1.0}, {1, 1}, 0, 1);
  auto r = interlacing_roots(m, {0.5, 0.5});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 0.0, 1e-12);
  m = DiscreteModel::make({0.0, 1.0}, {1, 1}, 0, 1);
  r = interlacing_roots(m, {0.75, 0.25});
  EXPECT_NEAR(r[0], 0.75, 1e-12);
  m = DiscreteModel::make({0.0, 1.0, 2.0}, {1, 1, 1}, 0, 2);
  const std::vector<double> g = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  r = interlacing_roots(m, g);
  ASSERT_EQ(r.size(), 2u);
  auto f = [&](double chi) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += g[i] / (chi - m.etas[i]);
    return s;
  };
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_GT(r[j], m.etas[j]);
    EXPECT_LT(r[j], m.etas[j + 1]);
    EXPECT_GT(f(r[j] - 1e-6), 0.0);
    EXPECT_LT(f(r[j] + 1e-6), 0.0);
  }
  // zero weight at the top pushes the root onto the endpoint
  r = interlacing_roots(DiscreteModel::make({0.0, 1.0}, {1, 1}, 0, 1), {1.0, 0.0});
  EXPECT_EQ(r[0], 1.0);
}

TEST(Spherical, ConditionalOracleExamples) {
  const auto model = DiscreteModel::make({0.0, 1.0, 2.0}, {98, 1, 1}, 0, 0);
  EXPECT_EQ(conditional_oracle_2d(model, 0.0, 0.0), 0.0);
  const double expected = j_one(kDelta0, 3.0, 2.0).value + j_one(kDelta0, 2.0, 1.0).value;
  EXPECT_NEAR(conditional_oracle_2d(model, 3.0, 2.0), expected, 1e-4);
  EXPECT_NEAR(conditional_oracle_2d(model, 2.5, 0.0), simplex_oracle_1d(model, 2.5), 1e-6);
  EXPECT_THROW(conditional_oracle_2d(model, 1.0, 2.0), DomainError);
  EXPECT_THROW(conditional_oracle_2d(DiscreteModel::make({0.0, 1.0}, {9, 1}, 0, 0), 2.0, 1.0), DomainError);
}

TEST(Spherical, ConditionalOracleRepeatedTop) {
  // a doubled top eigenvalue: both tilts see the same outlier
  const auto model = DiscreteModel::make({-0.5, 0.5, 2.0}, {40, 58, 2}, 0, 1);
  const auto mu = model.bulk_measure();
  const double expected = j_one(mu, 3.0, 2.0).value + j_one(mu, 1.5, 2.0).value;
  EXPECT_NEAR(conditional_oracle_2d(model, 3.0, 1.5), expected, 1e-4);
}

TEST(Spherical, TransportIdentity) {
  EXPECT_LE(transport_identity_check(kDelta0, 2.0, 1.0, 1.0), 1e-15);
  EXPECT_LE(transport_identity_check(kDelta0, 2.0, 1.0, 1.5), 1e-10);
  const auto two = SpectralMeasure::atoms({{-1.0, 0.5}, {1.0, 0.5}});
  EXPECT_LE(transport_identity_check(two, 5.0, 2.0, 3.0), 1e-10);
  EXPECT_THROW(transport_identity_check(two, 0.1, 2.0, 3.0), DomainError);
  EXPECT_THROW(transport_identity_check(SpectralMeasure::semicircle(), 2.0, 3.0, 4.0), DomainError);
}

TEST(Spherical, ScalingIdentity) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> th(0.2, 4.0), gap(0.0, 3.0);
  const std::vector<SpectralMeasure> mus = {SpectralMeasure::semicircle(), SpectralMeasure::marchenko_pastur(0.3),
                                            SpectralMeasure::atoms({{-1.0, 0.25}, {0.2, 0.5}, {1.4, 0.25}})};
  for (int i = 0; i < 30; ++i) {
    const auto& mu = mus[static_cast<std::size_t>(i) % mus.size()];
    const double theta = th(rng);
    const double lambda = support_edges(mu).right + gap(rng) + (mu.is_discrete() ? 1e-3 : 0.0);
    const double a = j_one(mu, theta, lambda).value;
    const double b = j_one(dilate(mu, theta), 1.0, theta * lambda).value;
    EXPECT_NEAR(a, b, 1e-10) << i;
  }
}

TEST(Spherical, LambdaDerivative) {
  const auto mu = SpectralMeasure::semicircle();
  const double h = 1e-5;
  for (double theta : {0.5, 1.0, 2.0}) {
    for (double lambda : {2.2, 2.8, 3.5, 5.0}) {
      const double g = stieltjes(mu, lambda);
      if (std::abs(g - theta) < 1e-3) continue;  // regime boundary
      const double fd = (j_one(mu, theta, lambda + h).value - j_one(mu, theta, lambda - h).value) / (2 * h);
      EXPECT_NEAR(fd, std::max(theta - g, 0.0), 1e-6) << theta << " " << lambda;
    }
  }
}

TEST(Spherical, ThetaMonotonicity) {
  const std::vector<SpectralMeasure> mus = {SpectralMeasure::semicircle(), SpectralMeasure::marchenko_pastur(0.5)};
  for (const auto& mu : mus) {
    const double lambda = support_edges(mu).right + 0.7;
    double prev = 0.0;
    for (int k = 1; k <= 60; ++k) {
      const double j = j_one(mu, 0.1 * k, lambda).value;
      EXPECT_GE(j, prev - 1e-12);
      prev = j;
    }
  }
}

TEST(Spherical, NegativeTiltMirror) {
  const std::vector<SpectralMeasure> mus = {SpectralMeasure::semicircle(), SpectralMeasure::marchenko_pastur(0.25),
                                            SpectralMeasure::atoms({{-2.0, 0.1}, {0.0, 0.6}, {0.5, 0.3}})};
  for (const auto& mu : mus) {
    const double l = support_edges(mu).left;
    for (double theta : {0.3, 1.0, 3.0}) {
      for (double d : {0.05, 1.0}) {
        EXPECT_NEAR(j_one(mu, -theta, l - d).value, j_one(reflect(mu), theta, -(l - d)).value, 1e-12);
      }
    }
  }
}

TEST(Spherical, ZeroTiltContinuity) {
  const auto mu = SpectralMeasure::semicircle();
  EXPECT_LT(std::abs(j_one(mu, 1e-2, 3.0).value), 1e-2);
  EXPECT_LT(std::abs(j_one(mu, 1e-4, 3.0).value), 1e-4);
}

TEST(Spherical, ModelValidation) {
  EXPECT_THROW(DiscreteModel::make({0.0, 1.0}, {1}, 0, 0), ShapeError);
  EXPECT_THROW(DiscreteModel::make({1.0, 0.0}, {1, 1}, 0, 1), DomainError);
  EXPECT_THROW(DiscreteModel::make({0.0, 1.0}, {0, 1}, 0, 1), DomainError);
  EXPECT_THROW(DiscreteModel::make({0.0, 1.0}, {1, 1}, 1, 2), DomainError);
  const auto m = DiscreteModel::make({-1.0, 0.0, 1.0, 4.0}, {1, 3, 1, 1}, 1, 2);
  EXPECT_EQ(m.top_outliers(), 1u);
  EXPECT_EQ(m.bottom_outliers(), 1u);
  EXPECT_EQ(m.total(), 6);
  const auto a = m.alphas();
  EXPECT_DOUBLE_EQ(a[1], 0.75);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[3], 0.0);
}
