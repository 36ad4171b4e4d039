#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "clutter/bernstein.hpp"
#include "clutter/rng.hpp"

namespace clutter {

/// Truncated PMF of K together with its running CDF.
struct PmfTable {
  std::vector<double> pmf;  // pmf[n], n = 0..n_max
  std::vector<double> cdf;  // cdf[n] = sum_{m <= n} pmf[m]
  bool complete = false;    // cdf.back() >= 1 - 1e-10
  bool approximate_tail = false;

  std::int64_t n_max() const {
    return static_cast<std::int64_t>(pmf.size()) - 1;
  }
};

/// The cluster-size variable K(kappa) with PGF 1 - h(kappa(1-u))/h(kappa).
///
/// PMF values come from the Taylor coefficients of h at kappa. Models with
/// closed-form derivatives are exact for every n; purely numerical models use
/// finite-difference coefficients for small n (at most order 20) followed by
/// a shifted negative-binomial tail whose mass, mean and second moment match
/// phi_K(1) = 1, E[K] and E[K^2]. That tail is approximate.
///
/// The cumulative table is built on first use and shared between copies.
class MixingLaw {
 public:
  static constexpr std::int64_t kMaxTableSize = 10'000'000;

  MixingLaw(BernsteinModel model, double kappa);

  const BernsteinModel& model() const { return model_; }
  double kappa() const { return kappa_; }

  /// E[u^K] for u in (0, 1]; DomainError otherwise.
  double pgf(double u) const;
  /// Pr[K = n]; zero for n <= 0.
  double pmf(std::int64_t n) const;
  /// kappa h1 / h(kappa).
  double mean() const;
  /// E[K^2] = -kappa^2 h''(0) / h(kappa) + E[K].
  double second_moment() const;

  /// Draws K >= 1. Builtin models use dedicated geometric and logarithmic
  /// generators; other models invert the cumulative table (smallest n with
  /// CDF(n) >= U). Throws GuardError if that table could not reach
  /// 1 - 1e-10 within kMaxTableSize entries.
  std::int64_t sample(Rng& rng) const;

  /// Cumulative table, grown until mass >= 1 - 1e-10 or kMaxTableSize.
  const PmfTable& table() const;

  /// CSV with header `n,p`.
  void write_pmf_csv(std::ostream& out) const;

 private:
  struct Cache;
  double generic_pmf(std::int64_t n) const;

  BernsteinModel model_;
  double kappa_;
  double h_kappa_;
  std::shared_ptr<Cache> cache_;
};

/// The limit law xi of K / E[K] for finite-activity models: LST
/// g(z) = 1 - h((C/h1) z) / C, unit mean.
class ContinuousMixing {
 public:
  /// Throws DomainError for infinite-activity models (the limit law is a
  /// point mass at 0).
  static ContinuousMixing from_model(const BernsteinModel& model);

  double lst(double z) const;
  double cdf(double s) const;
  double sample(Rng& rng) const;
  double mean() const { return 1.0; }
  /// True when the law is the closed-form unit exponential.
  bool is_exponential() const { return exponential_; }

 private:
  ContinuousMixing() = default;

  BernsteinModel model_ = make_builtin_finite();
  double limit_ = 1.0;
  bool exponential_ = false;
  // Tabulated CDF (Gaver-Stehfest inversion), used when !exponential_.
  std::shared_ptr<const std::vector<double>> grid_;
  std::shared_ptr<const std::vector<double>> grid_cdf_;
};

inline ContinuousMixing continuous_mixing(const BernsteinModel& model) {
  return ContinuousMixing::from_model(model);
}

/// Inverse Laplace transform by the Gaver-Stehfest formula with `terms`
/// (even) coefficients: f(t) ~ ln2/t sum_k V_k F(k ln2 / t).
double gaver_stehfest(const std::function<double(double)>& transform, double t,
                      int terms = 12);

}  // namespace clutter
