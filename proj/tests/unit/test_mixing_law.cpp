#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "clutter/bernstein.hpp"
#include "clutter/error.hpp"
#include "clutter/estimators.hpp"
#include "clutter/mixing_law.hpp"
#include "oracles.hpp"

using namespace clutter;

TEST(MixingLaw, PgfValues) {
  const MixingLaw geo(make_builtin_finite(), 1.0);
  const MixingLaw logarithmic(make_builtin_infinite(), 1.0);
  EXPECT_DOUBLE_EQ(geo.pgf(1.0), 1.0);
  EXPECT_NEAR(geo.pgf(0.5), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(logarithmic.pgf(0.5), 1.0 - std::log(1.5) / std::log(2.0), 1e-15);
  EXPECT_THROW(geo.pgf(0.0), DomainError);
  EXPECT_THROW(geo.pgf(1.5), DomainError);
}

TEST(MixingLaw, PmfValues) {
  const MixingLaw geo(make_builtin_finite(), 1.0);
  const MixingLaw logarithmic(make_builtin_infinite(), 1.0);
  EXPECT_EQ(geo.pmf(0), 0.0);
  EXPECT_NEAR(geo.pmf(2), 0.25, 1e-15);
  EXPECT_NEAR(logarithmic.pmf(1), -0.5 / std::log(0.5), 1e-15);
}

TEST(MixingLaw, BuiltinPmfsMatchClosedForms) {
  for (double kappa : {1.0, 9.0, 150.0}) {
    const MixingLaw geo(make_builtin_finite(), kappa);
    const MixingLaw logarithmic(make_builtin_infinite(), kappa);
    for (std::int64_t n = 1; n <= 50; ++n) {
      const double g = oracle::geometric_pmf(1.0 / (kappa + 1.0), n);
      const double l = oracle::logarithmic_pmf(kappa / (1.0 + kappa), n);
      EXPECT_NEAR(geo.pmf(n), g, 1e-12) << kappa << ' ' << n;
      EXPECT_NEAR(logarithmic.pmf(n), l, 1e-12) << kappa << ' ' << n;
    }
  }
}

TEST(MixingLaw, Means) {
  EXPECT_DOUBLE_EQ(MixingLaw(make_builtin_finite(), 1.0).mean(), 2.0);
  EXPECT_GT(MixingLaw(make_builtin_finite(), 1e6).mean(), 1e5);
  EXPECT_NEAR(MixingLaw(make_builtin_infinite(), 1.0).mean(), 1.0 / std::log(2.0), 1e-15);
}

TEST(MixingLaw, SecondMomentMatchesBruteForce) {
  for (const auto& h : {make_builtin_finite(), make_builtin_infinite()}) {
    for (double kappa : {1.0, 9.0}) {
      const MixingLaw law(h, kappa);
      double brute = 0.0;
      for (std::int64_t n = 1; n < 20000; ++n) brute += double(n) * n * law.pmf(n);
      EXPECT_NEAR(law.second_moment(), brute, 1e-9 * brute) << h.name() << ' ' << kappa;
    }
  }
  EXPECT_NEAR(MixingLaw(make_builtin_finite(), 1.0).second_moment(), 6.0, 1e-12);
  EXPECT_NEAR(MixingLaw(make_builtin_infinite(), 1.0).second_moment(), 2.0 / std::log(2.0),
              1e-12);
}

TEST(MixingLaw, UnitClusterStubHasEqualMoments) {
  // h(z) = z: K == 1.
  const auto h = BernsteinModel::custom("identity", [](double z) { return z; },
                                        [](int n, double) { return n == 1 ? 1.0 : 0.0; },
                                        1.0, 0.0);
  const MixingLaw law(h, 3.0);
  EXPECT_DOUBLE_EQ(law.second_moment(), law.mean());
}

TEST(MixingLaw, TableNormalizedAndConsistentWithPgf) {
  for (const auto& h : {make_builtin_finite(), make_builtin_infinite()}) {
    const MixingLaw law(h, 150.0);
    const auto& t = law.table();
    ASSERT_TRUE(t.complete);
    EXPECT_NEAR(t.cdf.back(), 1.0, 1e-10);
    for (double u : {0.25, 0.5, 0.9}) {
      double sum = 0.0;
      for (std::size_t n = 0; n < t.pmf.size(); ++n) sum += t.pmf[n] * std::pow(u, double(n));
      EXPECT_NEAR(sum, law.pgf(u), 1e-8);
    }
  }
}

TEST(MixingLaw, GeometricSamplerMean) {
  const MixingLaw law(make_builtin_finite(), 1.0);
  Rng rng(11);
  double sum = 0.0;
  std::int64_t smallest = 10;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const auto k = law.sample(rng);
    smallest = std::min(smallest, k);
    sum += static_cast<double>(k);
  }
  EXPECT_GE(smallest, 1);
  EXPECT_NEAR(sum / n, 2.0, 0.02);
  // Variance of the geometric law is (1-p)/p^2 = 2.
  EXPECT_NEAR(sum / n, 2.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(MixingLaw, LogarithmicSamplerTotalVariation) {
  const MixingLaw law(make_builtin_infinite(), 150.0);
  // Sampling noise alone gives TV ~ 0.0052 at 1e6 draws; at 4e6 it is ~0.0026.
  Rng rng(20240607);
  const int n = 4'000'000;
  std::vector<double> draws(n);
  for (auto& d : draws) {
    d = static_cast<double>(law.sample(rng));
    ASSERT_GE(d, 1.0);
  }
  const double tv = total_variation(empirical_pmf(draws),
                                    [&](std::int64_t k) { return law.pmf(k); });
  EXPECT_LT(tv, 0.005);
}

TEST(MixingLaw, TableInversionMatchesPmf) {
  // A custom model with closed-form derivatives goes through the table path.
  const auto h = BernsteinModel::custom(
      "geometric-by-table", [](double z) { return z / (z + 1.0); },
      [](int n, double z) {
        return ((n % 2 == 1) ? 1.0 : -1.0) * std::tgamma(n + 1.0) / std::pow(1.0 + z, n + 1);
      },
      1.0, -2.0);
  const MixingLaw law(h, 4.0);
  Rng rng(5);
  const int n = 400'000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = static_cast<double>(law.sample(rng));
  const double tv = total_variation(empirical_pmf(draws),
                                    [](std::int64_t k) { return oracle::geometric_pmf(0.2, k); });
  EXPECT_LT(tv, 0.01);
}

TEST(MixingLaw, NumericalModelHeadAndTail) {
  const auto h = BernsteinModel::custom("log", [](double z) { return std::log1p(z); });
  const MixingLaw law(h, 3.0);
  for (std::int64_t n = 1; n <= 4; ++n) {
    EXPECT_NEAR(law.pmf(n), oracle::logarithmic_pmf(0.75, n), 1e-5) << n;
  }
  const auto& t = law.table();
  EXPECT_TRUE(t.approximate_tail);
  EXPECT_NEAR(t.cdf.back(), 1.0, 1e-9);
  double mean = 0.0;
  for (std::size_t k = 0; k < t.pmf.size(); ++k) mean += k * t.pmf[k];
  EXPECT_NEAR(mean, law.mean(), 1e-4 * law.mean());
}

TEST(MixingLaw, NumericalModelTailCarriesSecondMoment) {
  const auto h = BernsteinModel::custom("log", [](double z) { return std::log1p(z); });
  const MixingLaw law(h, 150.0);
  const double exact = 150.0 * 150.0 / std::log(151.0) + law.mean();
  const auto& t = law.table();
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < t.pmf.size(); ++k) {
    m1 += k * t.pmf[k];
    m2 += static_cast<double>(k) * k * t.pmf[k];
  }
  EXPECT_NEAR(m1, 150.0 / std::log(151.0), 1e-3 * law.mean());
  EXPECT_NEAR(m2, exact, 1e-3 * exact);
}

TEST(ContinuousMixing, FiniteBuiltinIsUnitExponential) {
  const auto xi = continuous_mixing(make_builtin_finite());
  EXPECT_TRUE(xi.is_exponential());
  EXPECT_DOUBLE_EQ(xi.mean(), 1.0);
  for (double s : {0.1, 1.0, 3.0}) EXPECT_NEAR(xi.cdf(s), 1.0 - std::exp(-s), 1e-15);
}

TEST(ContinuousMixing, InfiniteActivityIsRejected) {
  EXPECT_THROW(continuous_mixing(make_builtin_infinite()), DomainError);
}

TEST(ContinuousMixing, NumericalInversionOfSaturatingModel) {
  // h(z) = 2z/(z+2): xi is still a unit exponential, reached here by
  // Gaver-Stehfest inversion rather than the closed form.
  const auto h = BernsteinModel::custom("sat2", [](double z) { return 2.0 * z / (z + 2.0); });
  const auto xi = continuous_mixing(h);
  EXPECT_FALSE(xi.is_exponential());
  for (double s : {0.2, 1.0, 2.5}) EXPECT_NEAR(xi.cdf(s), 1.0 - std::exp(-s), 2e-3) << s;
  Rng rng(3);
  double sum = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) sum += xi.sample(rng);
  EXPECT_NEAR(sum / n, 1.0, 0.02);
}

TEST(GaverStehfest, InvertsKnownTransform) {
  const auto f = [](double s) { return 1.0 / (s + 1.0); };
  for (double t : {0.5, 1.0, 2.0}) EXPECT_NEAR(gaver_stehfest(f, t), std::exp(-t), 1e-4);
  EXPECT_THROW(gaver_stehfest(f, 1.0, 7), DomainError);
}
