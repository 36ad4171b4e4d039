#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace clutter {

struct EmpiricalSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double zero_fraction = 0.0;
  // (lag, value); lag 0 holds the unbiased variance, lags >= dt use 1/n.
  std::vector<std::pair<double, double>> autocov;
  std::vector<double> ecdf;  // sorted samples

  /// Value at the grid lag nearest to `lag`.
  double autocov_at(double lag) const;
  /// Flat JSON record (the ecdf is omitted).
  std::string to_json() const;
};

/// Moments, exact-zero fraction and autocovariance at lags k*dt up to
/// max_lag. Throws DomainError on empty input or max_lag > (n-1) dt.
EmpiricalSummary summarize(std::span<const double> samples, double dt,
                           double max_lag);

/// sup |ECDF - cdf| over the sample points, both one-sided gaps, ties
/// handled by comparing against the left limit of the cdf.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

using EmpiricalPmf = std::map<std::int64_t, double>;

/// Relative frequencies of the rounded sample values.
EmpiricalPmf empirical_pmf(std::span<const double> samples);

/// (1/2) sum |emp - pmf| over the empirical support plus (1/2) of the
/// analytic mass outside it (1 - sum of pmf over that support). A table
/// covers n = 0..size-1 and is zero past its end.
double total_variation(const EmpiricalPmf& empirical,
                       const std::function<double(std::int64_t)>& pmf);
double total_variation(const EmpiricalPmf& empirical,
                       std::span<const double> pmf_table);

double excess_kurtosis(std::span<const double> samples);

/// Every `stride`-th sample starting at index 0.
std::vector<double> thin(std::span<const double> samples, std::size_t stride);

/// Standard error of an autocovariance estimate at a lag beyond the
/// dependence range (Bartlett): sqrt((c0^2 + 2 sum_{0<j*dt<=dep} c_j^2) / n).
double bartlett_standard_error(const EmpiricalSummary& summary,
                               double dependence_lag);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> density;

  void write_csv(std::ostream& out) const;  // bin_left,bin_right,density
};

/// Density histogram over [lo, hi) with `bins` equal bins; samples outside
/// are counted in the normalization but not binned.
Histogram histogram(std::span<const double> samples, std::size_t bins,
                    double lo, double hi);

}  // namespace clutter
