#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "clutter/analytic_stats.hpp"
#include "clutter/error.hpp"
#include "oracles.hpp"

using namespace clutter;

TEST(ScaledBessel, MatchesStandardLibrary) {
  for (double x : {1e-8, 0.01, 0.5, 1.0, 5.0, 7.99, 8.0, 15.0, 29.9, 30.0, 45.0, 120.0, 600.0}) {
    const double expected = std::cyl_bessel_i(1.0, x) * std::exp(-x);
    EXPECT_NEAR(scaled_bessel_i1(x), expected, 1e-14 + 2e-14 * expected) << x;
  }
  EXPECT_EQ(scaled_bessel_i1(0.0), 0.0);
  EXPECT_THROW(scaled_bessel_i1(-1.0), DomainError);
}

TEST(ScaledBessel, LargeArgumentsStayFinite) {
  const double x = 1e6;
  EXPECT_NEAR(scaled_bessel_i1(x) * std::sqrt(2.0 * M_PI * x), 1.0, 1e-6);
}

TEST(KTexture, Atom) {
  EXPECT_NEAR(k_texture_law(0.75).atom_at_zero(), 0.4723665527410147, 1e-15);
}

TEST(KTexture, DensityMatchesDirectForm) {
  for (double nu : {0.75, 2.0, 10.0}) {
    const auto law = k_texture_law(nu);
    for (double tau : {1e-6, 0.05, 0.5, 1.0, 2.0, 5.0}) {
      const double expected = oracle::k_texture_density_direct(nu, tau);
      EXPECT_NEAR(law.density(tau), expected, 1e-13 * std::max(1.0, expected)) << nu << ' ' << tau;
    }
    EXPECT_NEAR(law.density(0.0), nu * nu * std::exp(-nu), 1e-15);
  }
}

TEST(KTexture, NormalizationMeanAndVarianceByQuadrature) {
  for (double nu : {0.75, 2.0}) {
    const auto law = k_texture_law(nu);
    const auto f = [&](double t) { return law.density(t); };
    const double hi = law.upper_support();
    const double mass = oracle::integrate(f, 0.0, hi) + law.atom_at_zero();
    const double mean = oracle::integrate([&](double t) { return t * f(t); }, 0.0, hi);
    const double second = oracle::integrate([&](double t) { return t * t * f(t); }, 0.0, hi);
    EXPECT_NEAR(mass, 1.0, 1e-6) << nu;
    EXPECT_NEAR(mean, 1.0, 1e-6) << nu;
    EXPECT_NEAR(second - 1.0, 2.0 / nu, 1e-4) << nu;
  }
}

TEST(KTexture, CdfMatchesPoissonGammaSeries) {
  for (double nu : {0.75, 2.0, 25.0}) {
    const auto law = k_texture_law(nu);
    EXPECT_NEAR(law.cdf(0.0), std::exp(-nu), 1e-15);
    for (double tau : {1e-4, 0.1, 0.5, 0.9, 1.0, 1.7, 3.0, 8.0}) {
      EXPECT_NEAR(law.cdf(tau), oracle::k_texture_cdf_series(nu, tau), 1e-9) << nu << ' ' << tau;
    }
    EXPECT_NEAR(law.cdf(1e3), 1.0, 1e-9);
    EXPECT_EQ(law.cdf(-1.0), 0.0);
  }
}

TEST(KTexture, LargeShapeDoesNotOverflow) {
  const auto law = k_texture_law(1e3);
  EXPECT_TRUE(std::isfinite(law.density(1.0)));
  EXPECT_NEAR(law.cdf(1.0), oracle::k_texture_cdf_series(1e3, 1.0), 1e-8);
}

TEST(GammaLaw, Values) {
  const auto one = gamma_texture_law(1.0);
  for (double tau : {0.0, 0.3, 1.0, 4.0}) EXPECT_NEAR(one.density(tau), std::exp(-tau), 1e-15);
  EXPECT_NEAR(gamma_texture_law(2.0).density(1.0), 4.0 * std::exp(-2.0), 1e-15);
  for (double nu : {0.5, 2.0, 7.0}) {
    const auto law = gamma_texture_law(nu);
    const auto f = [&](double t) { return law.density(t); };
    const double hi = law.upper_support();
    EXPECT_NEAR(oracle::integrate(f, 0.0, hi), 1.0, 1e-6);
    EXPECT_NEAR(oracle::integrate([&](double t) { return t * f(t); }, 0.0, hi), 1.0, 1e-6);
    EXPECT_NEAR(oracle::integrate([&](double t) { return (t - 1) * (t - 1) * f(t); }, 0.0, hi),
                1.0 / nu, 1e-6);
    EXPECT_DOUBLE_EQ(law.variance(), 1.0 / nu);
    EXPECT_DOUBLE_EQ(law.mean(), 1.0);
  }
}

TEST(DegenerateLaw, StepAtOne) {
  const auto law = TextureLaw::degenerate_unit();
  EXPECT_EQ(law.cdf(0.999), 0.0);
  EXPECT_EQ(law.cdf(1.0), 1.0);
  EXPECT_EQ(law.variance(), 0.0);
}

TEST(PolyaAeppli, Values) {
  EXPECT_NEAR(polya_aeppli_pmf(2.0, 0.1, 0), std::exp(-1.8), 1e-15);
  const auto law = CountLaw::polya_aeppli(2.0, 0.1);
  double sum = 0.0;
  for (double p : law.table()) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-10);
  EXPECT_THROW(polya_aeppli_pmf(2.0, 1.0, 3), DomainError);
}

TEST(PolyaAeppli, MatchesPanjerRecursion) {
  for (double p : {0.1, 1.0 / 151.0}) {
    const double nu = 2.0;
    const auto ref = oracle::polya_aeppli_panjer(nu * (1.0 - p), p, 600);
    for (std::size_t n = 0; n <= 600; n += 7) {
      EXPECT_NEAR(polya_aeppli_pmf(nu, p, static_cast<std::int64_t>(n)), ref[n],
                  1e-12 + 1e-9 * ref[n])
          << p << ' ' << n;
    }
  }
}

TEST(NegBin, Values) {
  EXPECT_NEAR(negbin_pmf(2.0, 50.0, 0), std::pow(1.0 + 25.0, -2.0), 1e-15);
  EXPECT_NEAR(negbin_pmf(1.0, 1.0, 1), 0.25, 1e-15);
  const auto law = CountLaw::negative_binomial(2.0, 50.0);
  double mean = 0.0;
  const auto t = law.table();
  for (std::size_t n = 0; n < t.size(); ++n) mean += n * t[n];
  EXPECT_NEAR(mean, 50.0, 1e-9);
}

TEST(NegBin, MatchesRatioRecursion) {
  const auto ref = oracle::negbin_recursive(2.0, 300.0, 3000);
  for (std::size_t n = 0; n <= 3000; n += 13) {
    EXPECT_NEAR(negbin_pmf(2.0, 300.0, static_cast<std::int64_t>(n)), ref[n], 1e-10 * ref[n] + 1e-300);
  }
}

TEST(NegBin, ApproachesGammaDensity) {
  const double nu = 2.0;
  const double nbar = 1e4;
  const auto law = gamma_texture_law(nu);
  for (double x : {0.3, 0.6, 1.0, 1.5, 2.0}) {
    const auto n = static_cast<std::int64_t>(x * nbar);
    const double scaled = negbin_pmf(nu, nbar, n) * nbar;
    EXPECT_NEAR(scaled / law.density(static_cast<double>(n) / nbar), 1.0, 0.01) << x;
  }
}

TEST(TextureCov, Values) {
  EXPECT_DOUBLE_EQ(texture_cov(2.0, 8.0, -2.0, 0.0), 1.0);
  EXPECT_EQ(texture_cov(2.0, 8.0, -2.0, 8.0), 0.0);
  EXPECT_NEAR(texture_cov(2.0, 8.0, -2.0, 8.0 - 1e-12), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(texture_cov(2.0, 8.0, -1.0, 4.0), 0.25);
  EXPECT_EQ(texture_cov(2.0, 8.0, -1.0, 20.0), 0.0);
}

TEST(GaussianLimit, Distances) {
  EXPECT_LT(gaussian_limit_distance(make_builtin_finite(), 1e4, 5.0), 1e-3);
  EXPECT_LT(gaussian_limit_distance(make_builtin_infinite(), 1e4, 5.0), 1e-3);
  EXPECT_EQ(gaussian_limit_distance(make_builtin_finite(), 3.0, 0.0), 0.0);
  // Cross-check against the closed form at moderate nu.
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double z = 5.0 * i / 10000;
    worst = std::max(worst, std::abs(std::pow(1.0 + z / 50.0, -50.0) - std::exp(-z)));
  }
  EXPECT_NEAR(gaussian_limit_distance(make_builtin_infinite(), 50.0, 5.0), worst, 1e-14);
}

TEST(LstMoments, Builtins) {
  const auto m = lst_moments(LimitTransform(make_builtin_finite(), 2.0), 2);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], 1.0);
  EXPECT_NEAR(m[1], 1.0, 1e-6);
  EXPECT_NEAR(m[2], 2.0, 1e-4);
  const auto g = lst_moments(LimitTransform(make_builtin_infinite(), 4.0), 2);
  EXPECT_NEAR(g[2], 1.25, 1e-4);
  EXPECT_THROW(lst_moments(LimitTransform(make_builtin_finite(), 2.0), 3), DomainError);
}

TEST(LawCsv, Headers) {
  std::ostringstream a;
  gamma_texture_law(1.0).write_csv(a, 3);
  EXPECT_EQ(a.str().substr(0, 10), "x,pdf,cdf\n");
  std::ostringstream b;
  CountLaw::negative_binomial(1.0, 1.0).write_csv(b);
  EXPECT_EQ(b.str().substr(0, 10), "n,pmf,cdf\n");
}
