#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "clutter/bernstein.hpp"

namespace clutter {

/// e^{-x} I_1(x) for x >= 0: power series below x = 30, Hankel asymptotic
/// expansion above.
double scaled_bessel_i1(double x);

/// Reference marginal law of the texture.
class TextureLaw {
 public:
  enum class Kind { k_texture, gamma, degenerate_unit };

  /// Finite-activity example: atom e^{-nu} at 0 plus
  /// nu e^{-nu} e^{-nu tau} tau^{-1/2} I_1(2 nu sqrt(tau)) on tau > 0.
  static TextureLaw k_texture(double nu);
  /// Unit-mean gamma law with shape nu.
  static TextureLaw gamma(double nu);
  /// Point mass at 1 (the nu -> inf limit).
  static TextureLaw degenerate_unit();

  Kind kind() const { return kind_; }
  double nu() const { return nu_; }
  double atom_at_zero() const;
  /// Density of the absolutely continuous part, tau > 0. At tau = 0 the
  /// k_texture density returns its finite right limit nu^2 e^{-nu}.
  double density(double tau) const;
  /// Pr[tau' <= tau], atom included.
  double cdf(double tau) const;
  double mean() const { return 1.0; }
  double variance() const;
  /// Point beyond which the continuous mass is below 1e-10 (Chernoff bound).
  double upper_support() const;

  /// CSV `x,pdf,cdf` on `points` equispaced abscissae over [0, x_max]
  /// (x_max <= 0 selects upper_support()).
  void write_csv(std::ostream& out, std::size_t points, double x_max = 0.0) const;

 private:
  TextureLaw(Kind kind, double nu);

  Kind kind_;
  double nu_;
  // k_texture: cumulative integral of the density at table_x_ (adaptive
  // Gauss-Kronrod per cell), evaluated by cubic Hermite interpolation.
  std::shared_ptr<const std::vector<double>> table_x_;
  std::shared_ptr<const std::vector<double>> table_cdf_;
};

inline TextureLaw k_texture_law(double nu) { return TextureLaw::k_texture(nu); }
inline TextureLaw gamma_texture_law(double nu) { return TextureLaw::gamma(nu); }

/// Compound-Poisson count law: Poisson(nu (1-p)) clusters of geometric size.
double polya_aeppli_pmf(double nu, double p, std::int64_t n);
/// Negative binomial with shape nu and mean nbar.
double negbin_pmf(double nu, double nbar, std::int64_t n);

/// Reference count law of the window count N_T.
class CountLaw {
 public:
  enum class Kind { polya_aeppli, negative_binomial };

  static CountLaw polya_aeppli(double nu, double p);
  static CountLaw negative_binomial(double nu, double nbar);

  Kind kind() const { return kind_; }
  double pmf(std::int64_t n) const;
  double mean() const;
  /// pmf[0..n_max] with n_max the first index where the cumulative mass
  /// reaches 1 - 1e-12 (capped at 1e7 entries).
  std::vector<double> table() const;
  /// CSV `n,pmf,cdf` over table().
  void write_csv(std::ostream& out) const;

 private:
  CountLaw(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_;  // nu
  double b_;  // p or nbar
};

/// Autocovariance of the texture: (-h2/nu)(1 - s/window) on [0, window],
/// zero beyond.
double texture_cov(double nu, double window, double h2, double s);

/// sup over z in [0, z_max] of |G(z) - e^{-z}| on a 10001-point grid.
double gaussian_limit_distance(const BernsteinModel& model, double nu,
                               double z_max);

/// E[tau^m] = (-1)^m G^(m)(0) for m = 0..order (order <= 2), by one-sided
/// finite differences.
std::vector<double> lst_moments(const LimitTransform& transform, int order);

}  // namespace clutter
