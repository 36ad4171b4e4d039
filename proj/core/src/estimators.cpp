#include "clutter/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "clutter/csv.hpp"
#include "clutter/error.hpp"

namespace clutter {

double EmpiricalSummary::autocov_at(double lag) const {
  if (autocov.empty()) throw DomainError("summary has no autocovariance");
  const auto it = std::min_element(
      autocov.begin(), autocov.end(), [lag](const auto& a, const auto& b) {
        return std::abs(a.first - lag) < std::abs(b.first - lag);
      });
  return it->second;
}

std::string EmpiricalSummary::to_json() const {
  nlohmann::json lags = nlohmann::json::array();
  nlohmann::json values = nlohmann::json::array();
  for (const auto& [lag, value] : autocov) {
    lags.push_back(lag);
    values.push_back(value);
  }
  nlohmann::json j{{"n", n},
                   {"mean", mean},
                   {"variance", variance},
                   {"zero_fraction", zero_fraction},
                   {"autocov_lags", lags},
                   {"autocov", values}};
  return j.dump();
}

EmpiricalSummary summarize(std::span<const double> samples, double dt,
                           double max_lag) {
  if (samples.empty()) throw DomainError("summarize: empty sample");
  if (!(dt > 0.0)) throw DomainError("summarize: dt must be > 0");
  const std::size_t n = samples.size();
  if (max_lag < 0.0 || max_lag > (n - 1) * dt * (1.0 + 1e-12)) {
    throw DomainError("summarize: max_lag exceeds the sample span");
  }
  EmpiricalSummary s;
  s.n = n;
  double sum = 0.0;
  std::size_t zeros = 0;
  for (double x : samples) {
    sum += x;
    if (x == 0.0) ++zeros;
  }
  s.mean = sum / n;
  s.zero_fraction = static_cast<double>(zeros) / n;

  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = samples[i] - s.mean;
  double ss = 0.0;
  for (double c : centered) ss += c * c;
  s.variance = n > 1 ? ss / (n - 1) : 0.0;

  const auto lags = static_cast<std::size_t>(std::floor(max_lag / dt + 1e-9));
  s.autocov.reserve(lags + 1);
  s.autocov.emplace_back(0.0, s.variance);
  for (std::size_t k = 1; k <= lags; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) acc += centered[i] * centered[i + k];
    s.autocov.emplace_back(k * dt, acc / n);
  }
  s.ecdf.assign(samples.begin(), samples.end());
  std::sort(s.ecdf.begin(), s.ecdf.end());
  return s;
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    // ECDF jumps from i/n to j/n at x[i].
    const double below = cdf(std::nextafter(x[i], -INFINITY));
    const double at = cdf(x[i]);
    d = std::max({d, std::abs(below - i / n), std::abs(at - j / n)});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("ks_critical_value: need n > 0 and alpha in (0, 1)");
  }
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

EmpiricalPmf empirical_pmf(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("empirical_pmf: empty sample");
  EmpiricalPmf pmf;
  for (double x : samples) pmf[std::llround(x)] += 1.0;
  const double n = static_cast<double>(samples.size());
  for (auto& [k, v] : pmf) v /= n;
  return pmf;
}

double total_variation(const EmpiricalPmf& empirical,
                       const std::function<double(std::int64_t)>& pmf) {
  double sum = 0.0;
  double covered = 0.0;
  for (const auto& [k, freq] : empirical) {
    const double p = pmf(k);
    sum += std::abs(freq - p);
    covered += p;
  }
  // Analytic mass off the empirical support.
  sum += std::max(0.0, 1.0 - covered);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

double total_variation(const EmpiricalPmf& empirical,
                       std::span<const double> pmf_table) {
  return total_variation(empirical, [&](std::int64_t k) {
    return (k >= 0 && static_cast<std::size_t>(k) < pmf_table.size())
               ? pmf_table[static_cast<std::size_t>(k)]
               : 0.0;
  });
}

double excess_kurtosis(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("excess_kurtosis: need >= 2 samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : samples) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

std::vector<double> thin(std::span<const double> samples, std::size_t stride) {
  if (stride == 0) throw DomainError("thin: stride must be >= 1");
  std::vector<double> out;
  out.reserve(samples.size() / stride + 1);
  for (std::size_t i = 0; i < samples.size(); i += stride) out.push_back(samples[i]);
  return out;
}

double bartlett_standard_error(const EmpiricalSummary& summary,
                               double dependence_lag) {
  if (summary.autocov.empty() || summary.n == 0) {
    throw DomainError("bartlett_standard_error: empty summary");
  }
  double acc = summary.autocov.front().second * summary.autocov.front().second;
  for (std::size_t k = 1; k < summary.autocov.size(); ++k) {
    if (summary.autocov[k].first > dependence_lag * (1.0 + 1e-12)) break;
    acc += 2.0 * summary.autocov[k].second * summary.autocov[k].second;
  }
  return std::sqrt(acc / static_cast<double>(summary.n));
}

void Histogram::write_csv(std::ostream& out) const {
  out << "bin_left,bin_right,density\n";
  const double width = (hi - lo) / static_cast<double>(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    out << csv::number(lo + i * width) << ',' << csv::number(lo + (i + 1) * width)
        << ',' << csv::number(density[i]) << '\n';
  }
}

Histogram histogram(std::span<const double> samples, std::size_t bins,
                    double lo, double hi) {
  if (samples.empty() || bins == 0 || !(hi > lo)) {
    throw DomainError("histogram: need samples, bins > 0 and hi > lo");
  }
  Histogram h{lo, hi, std::vector<double>(bins, 0.0)};
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : samples) {
    if (x < lo || x >= hi) continue;
    const auto i = std::min(bins - 1, static_cast<std::size_t>((x - lo) / width));
    h.density[i] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(samples.size()) * width);
  for (auto& d : h.density) d *= scale;
  return h;
}

}  // namespace clutter
