#include "clutter/speckle.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "clutter/csv.hpp"
#include "clutter/error.hpp"

namespace clutter {

void SpeckleSpec::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw DomainError("speckle variance must be positive and finite");
  }
  if (!(dt > 0.0)) throw DomainError("speckle dt must be > 0");
  if (const auto* ar = std::get_if<Ar1Speckle>(&correlation)) {
    if (!(ar->rho >= 0.0 && ar->rho < 1.0)) {
      throw DomainError("AR1 rho must lie in [0, 1)");
    }
  }
  if (const auto* c = std::get_if<CustomAcfSpeckle>(&correlation)) {
    if (c->acf.empty() || std::abs(c->acf.front() - 1.0) > 1e-9) {
      throw DomainError("custom speckle acf must start with acf[0] = 1");
    }
  }
}

namespace {

std::vector<std::complex<double>> custom_speckle(const SpeckleSpec& spec,
                                                 const std::vector<double>& acf,
                                                 std::size_t n, Rng& rng) {
  if (n > kMaxCustomSpeckleLength) {
    throw GuardError("custom-ACF speckle is limited to n <= 8192 samples");
  }
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto lag = static_cast<std::size_t>(std::abs(i - j));
      cov(i, j) = lag < acf.size() ? spec.variance * acf[lag] : 0.0;
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double tol = 1e-10 * spec.variance * static_cast<double>(n);
  if (ldlt.info() != Eigen::Success || d.minCoeff() < -tol) {
    throw ModelError("custom speckle acf is not positive semidefinite");
  }
  Eigen::VectorXd re(m);
  Eigen::VectorXd im(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto w = rng.complex_normal(1.0);
    const double s = std::sqrt(std::max(d(i), 0.0));
    re(i) = s * w.real();
    im(i) = s * w.imag();
  }
  // cov = P^T L D L^T P, so P^T L D^{1/2} w has covariance cov.
  re = ldlt.transpositionsP().transpose() * (ldlt.matrixL() * re);
  im = ldlt.transpositionsP().transpose() * (ldlt.matrixL() * im);
  std::vector<std::complex<double>> out(n);
  for (Eigen::Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = {re(i), im(i)};
  return out;
}

}  // namespace

std::vector<std::complex<double>> gen_speckle(const SpeckleSpec& spec,
                                              std::size_t n, Rng& rng) {
  spec.validate();
  if (n == 0) throw DomainError("speckle length must be >= 1");
  if (const auto* c = std::get_if<CustomAcfSpeckle>(&spec.correlation)) {
    return custom_speckle(spec, c->acf, n, rng);
  }
  std::vector<std::complex<double>> out(n);
  if (const auto* ar = std::get_if<Ar1Speckle>(&spec.correlation)) {
    const double innovation = spec.variance * (1.0 - ar->rho * ar->rho);
    out[0] = rng.complex_normal(spec.variance);
    for (std::size_t i = 1; i < n; ++i) {
      out[i] = ar->rho * out[i - 1] + rng.complex_normal(innovation);
    }
    return out;
  }
  for (auto& x : out) x = rng.complex_normal(spec.variance);
  return out;
}

std::size_t grid_size(double dt, double duration) {
  if (!(dt > 0.0) || duration < 0.0) {
    throw DomainError("grid needs dt > 0 and duration >= 0");
  }
  return static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12))) + 1;
}

ClutterSeries compose(const TexturePath& path,
                      const std::vector<std::complex<double>>& speckle,
                      double dt) {
  const std::size_t n = grid_size(dt, path.duration);
  if (speckle.size() != n) {
    throw DomainError("compose: speckle has " + std::to_string(speckle.size()) +
                      " samples, the texture grid has " + std::to_string(n));
  }
  ClutterSeries out;
  out.tau = sample_on_grid(path, dt, path.duration, true);
  out.t.resize(n);
  out.z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.t[i] = static_cast<double>(i) * dt;
    out.z[i] = std::sqrt(out.tau[i]) * speckle[i];
  }
  return out;
}

void ClutterSeries::write_csv(std::ostream& out) const {
  out << "t,re,im,tau\n";
  for (std::size_t i = 0; i < z.size(); ++i) {
    out << csv::number(t[i]) << ',' << csv::number(z[i].real()) << ','
        << csv::number(z[i].imag()) << ',' << csv::number(tau[i]) << '\n';
  }
}

}  // namespace clutter
