#include <cmath>
#include <complex>
#include <sstream>

#include <gtest/gtest.h>

#include "clutter/error.hpp"
#include "clutter/estimators.hpp"
#include "clutter/speckle.hpp"

using namespace clutter;

namespace {

std::complex<double> lag_correlation(const std::vector<std::complex<double>>& x, std::size_t k) {
  std::complex<double> num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += std::norm(x[i]);
    if (i + k < x.size()) num += x[i + k] * std::conj(x[i]);
  }
  return num / den;
}

}  // namespace

TEST(Speckle, WhiteIsCircular) {
  Rng rng(1);
  const SpeckleSpec spec{1.0, WhiteSpeckle{}, 0.1};
  const auto x = gen_speckle(spec, 1'000'000, rng);
  std::vector<double> re(x.size());
  std::complex<double> mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    re[i] = x[i].real();
    mean += x[i];
  }
  mean /= double(x.size());
  EXPECT_NEAR(summarize(re, 1.0, 0.0).variance, 0.5, 0.005);
  EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(double(x.size())));
}

TEST(Speckle, Ar1LagOne) {
  Rng rng(2);
  const SpeckleSpec spec{2.0, Ar1Speckle{0.9}, 0.1};
  const auto x = gen_speckle(spec, 1'000'000, rng);
  const auto r1 = lag_correlation(x, 1);
  EXPECT_NEAR(r1.real(), 0.9, 0.01);
  EXPECT_NEAR(r1.imag(), 0.0, 0.01);
  EXPECT_NEAR(std::real(lag_correlation(x, 3)), 0.729, 0.02);
  double power = 0.0;
  for (const auto& v : x) power += std::norm(v);
  EXPECT_NEAR(power / double(x.size()), 2.0, 0.06);
}

TEST(Speckle, CustomAcf) {
  Rng rng(3);
  const SpeckleSpec spec{1.0, CustomAcfSpeckle{{1.0, 0.6, 0.2}}, 0.1};
  const std::size_t n = 4096;
  std::vector<std::complex<double>> all;
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = gen_speckle(spec, n, rng);
    all.insert(all.end(), x.begin(), x.end());
  }
  EXPECT_NEAR(std::real(lag_correlation(all, 1)), 0.6, 0.02);
  EXPECT_NEAR(std::real(lag_correlation(all, 2)), 0.2, 0.02);
  EXPECT_NEAR(std::real(lag_correlation(all, 3)), 0.0, 0.02);
}

TEST(Speckle, CustomRejectsIndefiniteAcf) {
  Rng rng(4);
  const SpeckleSpec spec{1.0, CustomAcfSpeckle{{1.0, 0.9, -0.9}}, 0.1};
  EXPECT_THROW(gen_speckle(spec, 64, rng), ModelError);
}

TEST(Speckle, CustomGuardAndValidation) {
  Rng rng(5);
  const SpeckleSpec spec{1.0, CustomAcfSpeckle{{1.0}}, 0.1};
  EXPECT_THROW(gen_speckle(spec, 8193, rng), GuardError);
  const SpeckleSpec bad{1.0, CustomAcfSpeckle{{0.5}}, 0.1};
  EXPECT_THROW(gen_speckle(bad, 8, rng), DomainError);
  const SpeckleSpec rho{1.0, Ar1Speckle{1.0}, 0.1};
  EXPECT_THROW(gen_speckle(rho, 8, rng), DomainError);
  EXPECT_THROW(gen_speckle(SpeckleSpec{}, 0, rng), DomainError);
}

TEST(Compose, UnitTextureKeepsSpeckle) {
  TexturePath path;
  path.change_times = {0.0};
  path.values = {1.0};
  path.duration = 9.9;
  Rng rng(6);
  const auto x = gen_speckle(SpeckleSpec{}, grid_size(0.1, 9.9), rng);
  const auto c = compose(path, x, 0.1);
  EXPECT_EQ(c.z, x);
}

TEST(Compose, ZeroTextureSilences) {
  TexturePath path;
  path.change_times = {0.0, 2.0, 3.0};
  path.values = {1.0, 0.0, 4.0};
  path.duration = 5.0;
  Rng rng(7);
  const auto x = gen_speckle(SpeckleSpec{}, grid_size(0.5, 5.0), rng);
  const auto c = compose(path, x, 0.5);
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    if (c.t[i] >= 2.0 && c.t[i] < 3.0) {
      EXPECT_EQ(c.z[i], std::complex<double>(0.0, 0.0));
    }
    if (c.t[i] >= 3.0) EXPECT_EQ(c.z[i], 2.0 * x[i]);
  }
}

TEST(Compose, LengthMismatch) {
  TexturePath path;
  path.change_times = {0.0};
  path.values = {1.0};
  path.duration = 1.0;
  const std::vector<std::complex<double>> x(3);
  EXPECT_THROW(compose(path, x, 0.1), DomainError);
}

namespace {

ClutterSeries clutter_series(double nu, double dt, std::size_t n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.gamma = 0.25;
  cfg.window = nu / cfg.gamma;
  cfg.dt = dt;
  cfg.duration = dt * static_cast<double>(n - 1);
  cfg.seed = seed;
  const auto path = simulate(make_builtin_finite(), cfg);
  Rng rng = Rng::stream(seed, 1);
  const auto x = gen_speckle(SpeckleSpec{1.0, WhiteSpeckle{}, dt}, n, rng);
  return compose(path, x, dt);
}

}  // namespace

TEST(Compose, HeavyTailsAtSmallShape) {
  const auto c = clutter_series(0.75, 1.0, 1'000'000, 8);
  std::vector<double> re(c.z.size());
  double power = 0.0;
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    re[i] = c.z[i].real();
    power += std::norm(c.z[i]);
  }
  const double k = excess_kurtosis(re);
  EXPECT_GT(k, 1.0);
  EXPECT_NEAR(k, 8.0, 2.0);
  EXPECT_NEAR(power / double(c.z.size()), 1.0, 0.05);
}

TEST(Compose, ConditionalExponentiality) {
  const auto c = clutter_series(2.0, 1.0, 1'000'000, 9);
  std::vector<double> tau(c.tau);
  std::nth_element(tau.begin(), tau.begin() + tau.size() * 9 / 10, tau.end());
  const double q90 = tau[tau.size() * 9 / 10];
  std::vector<double> ratio;
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    if (c.tau[i] > q90) ratio.push_back(std::norm(c.z[i]) / c.tau[i]);
  }
  ASSERT_GT(ratio.size(), 1000u);
  const double d = ks_distance(ratio, [](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-v); });
  EXPECT_LT(d, ks_critical_value(ratio.size(), 0.01));
}

TEST(Compose, CsvHeader) {
  TexturePath path;
  path.change_times = {0.0};
  path.values = {1.0};
  path.duration = 0.0;
  const std::vector<std::complex<double>> x{{1.0, -2.0}};
  std::ostringstream os;
  compose(path, x, 0.1).write_csv(os);
  EXPECT_EQ(os.str(), "t,re,im,tau\n0,1,-2,1\n");
}
