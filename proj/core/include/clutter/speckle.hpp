#pragma once

#include <complex>
#include <iosfwd>
#include <variant>
#include <vector>

#include "clutter/rng.hpp"
#include "clutter/texture_sim.hpp"

namespace clutter {

struct WhiteSpeckle {};
struct Ar1Speckle {
  double rho = 0.9;  // lag-1 correlation, in [0, 1)
};
/// acf[k] is the correlation at lag k*dt (acf[0] == 1); lags past the end
/// are uncorrelated.
struct CustomAcfSpeckle {
  std::vector<double> acf;
};

using SpeckleCorrelation = std::variant<WhiteSpeckle, Ar1Speckle, CustomAcfSpeckle>;

struct SpeckleSpec {
  double variance = 1.0;  // E|x|^2
  SpeckleCorrelation correlation = WhiteSpeckle{};
  double dt = 0.1;

  void validate() const;
};

inline constexpr std::size_t kMaxCustomSpeckleLength = 8192;

/// Zero-mean circular complex Gaussian series of length n. AR1 starts from
/// its stationary law. Custom factors the dense Toeplitz covariance; throws
/// ModelError if it is not positive semidefinite and GuardError for
/// n > 8192.
std::vector<std::complex<double>> gen_speckle(const SpeckleSpec& spec,
                                              std::size_t n, Rng& rng);

struct ClutterSeries {
  std::vector<double> t;
  std::vector<std::complex<double>> z;
  std::vector<double> tau;

  void write_csv(std::ostream& out) const;  // t,re,im,tau
};

/// z_i = sqrt(tau(i dt)) x_i with tau from sample_on_grid (normalized).
/// Throws DomainError when the speckle length does not match the grid.
ClutterSeries compose(const TexturePath& path,
                      const std::vector<std::complex<double>>& speckle,
                      double dt);

/// Grid length used by compose for a path of the given duration.
std::size_t grid_size(double dt, double duration);

}  // namespace clutter
