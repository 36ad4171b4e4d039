#include "clutter/analytic_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "clutter/csv.hpp"
#include "clutter/error.hpp"

namespace clutter {

namespace {

constexpr double kLogTailTarget = 23.025850929940457;  // -ln(1e-10)
constexpr std::size_t kKTextureCells = 4000;

void require_positive_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("shape parameter nu must be positive and finite");
  }
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double k_texture_density(double nu, double tau) {
  if (tau < 0.0) return 0.0;
  if (tau == 0.0) return nu * nu * std::exp(-nu);
  const double root = std::sqrt(tau);
  const double x = 2.0 * nu * root;
  // -nu - nu tau + x == -nu (1 - sqrt(tau))^2; never overflows.
  const double exponent = -nu * (1.0 - root) * (1.0 - root);
  return nu * std::exp(exponent) * scaled_bessel_i1(x) / root;
}

double gamma_density(double nu, double tau) {
  if (tau < 0.0) return 0.0;
  if (tau == 0.0) {
    if (nu < 1.0) return INFINITY;
    return nu == 1.0 ? 1.0 : 0.0;
  }
  return std::exp(nu * std::log(nu) - std::lgamma(nu) + (nu - 1.0) * std::log(tau) -
                  nu * tau);
}

}  // namespace

double scaled_bessel_i1(double x) {
  if (!(x >= 0.0)) throw DomainError("scaled_bessel_i1 needs x >= 0");
  if (x == 0.0) return 0.0;
  if (x < 30.0) {
    const double half = 0.5 * x;
    const double q = half * half;
    double term = half;
    double sum = term;
    for (int k = 0; k < 500; ++k) {
      term *= q / ((k + 1.0) * (k + 2.0));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-x);
  }
  // Hankel expansion with mu = 4 nu^2 = 4.
  constexpr double mu = 4.0;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

TextureLaw::TextureLaw(Kind kind, double nu) : kind_(kind), nu_(nu) {}

TextureLaw TextureLaw::k_texture(double nu) {
  require_positive_nu(nu);
  TextureLaw law(Kind::k_texture, nu);
  const double hi = law.upper_support();
  auto xs = std::make_shared<std::vector<double>>(kKTextureCells + 1);
  auto cs = std::make_shared<std::vector<double>>(kKTextureCells + 1);
  const double width = hi / kKTextureCells;
  auto f = [nu](double t) { return k_texture_density(nu, t); };
  double total = std::exp(-nu);
  (*xs)[0] = 0.0;
  (*cs)[0] = total;
  for (std::size_t i = 1; i <= kKTextureCells; ++i) {
    const double a = (i - 1) * width;
    const double b = i * width;
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 8, 1e-13);
    (*xs)[i] = b;
    (*cs)[i] = total;
  }
  law.table_x_ = std::move(xs);
  law.table_cdf_ = std::move(cs);
  return law;
}

TextureLaw TextureLaw::gamma(double nu) {
  require_positive_nu(nu);
  return TextureLaw(Kind::gamma, nu);
}

TextureLaw TextureLaw::degenerate_unit() {
  return TextureLaw(Kind::degenerate_unit, INFINITY);
}

double TextureLaw::atom_at_zero() const {
  return kind_ == Kind::k_texture ? std::exp(-nu_) : 0.0;
}

double TextureLaw::density(double tau) const {
  switch (kind_) {
    case Kind::k_texture:
      return k_texture_density(nu_, tau);
    case Kind::gamma:
      return gamma_density(nu_, tau);
    case Kind::degenerate_unit:
      return 0.0;
  }
  return 0.0;
}

double TextureLaw::cdf(double tau) const {
  if (tau < 0.0) return 0.0;
  switch (kind_) {
    case Kind::gamma:
      return boost::math::gamma_p(nu_, nu_ * tau);
    case Kind::degenerate_unit:
      return tau >= 1.0 ? 1.0 : 0.0;
    case Kind::k_texture:
      break;
  }
  const auto& xs = *table_x_;
  const auto& cs = *table_cdf_;
  if (tau >= xs.back()) return cs.back();
  const double width = xs[1] - xs[0];
  const auto i = std::min(static_cast<std::size_t>(tau / width), xs.size() - 2);
  // Cubic Hermite on the cell with the density as the exact slope.
  const double a = xs[i];
  const double h = xs[i + 1] - a;
  const double s = (tau - a) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double value = h00 * cs[i] + h10 * h * density(a) + h01 * cs[i + 1] +
                       h11 * h * density(xs[i + 1]);
  return std::clamp(value, cs[i], cs[i + 1]);
}

double TextureLaw::variance() const {
  switch (kind_) {
    case Kind::k_texture:
      return 2.0 / nu_;
    case Kind::gamma:
      return 1.0 / nu_;
    case Kind::degenerate_unit:
      return 0.0;
  }
  return 0.0;
}

double TextureLaw::upper_support() const {
  switch (kind_) {
    case Kind::k_texture:
      // Pr[tau > x] <= exp(nu - nu x / 2).
      return 2.0 * (nu_ + kLogTailTarget) / nu_;
    case Kind::gamma:
      // Pr[tau > x] <= 2^nu exp(-nu x / 2).
      return 2.0 * (nu_ * std::numbers::ln2 + kLogTailTarget) / nu_;
    case Kind::degenerate_unit:
      return 1.0;
  }
  return 1.0;
}

void TextureLaw::write_csv(std::ostream& out, std::size_t points,
                           double x_max) const {
  if (points < 2) throw DomainError("law table needs at least 2 points");
  if (x_max <= 0.0) x_max = upper_support();
  out << "x,pdf,cdf\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double x = x_max * static_cast<double>(i) / (points - 1);
    out << csv::number(x) << ',' << csv::number(density(x)) << ','
        << csv::number(cdf(x)) << '\n';
  }
}

double polya_aeppli_pmf(double nu, double p, std::int64_t n) {
  require_positive_nu(nu);
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("Polya-Aeppli parameter p must lie in (0, 1)");
  }
  if (n < 0) return 0.0;
  const double rate = nu * (1.0 - p);
  if (n == 0) return std::exp(-rate);
  const double dn = static_cast<double>(n);
  const double log_rate = std::log(rate);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double peak = -INFINITY;
  std::vector<double> logs(static_cast<std::size_t>(n));
  for (std::int64_t k = 1; k <= n; ++k) {
    const double dk = static_cast<double>(k);
    const double v = -rate + dk * log_rate - std::lgamma(dk + 1.0) +
                     log_choose(dn - 1.0, dk - 1.0) + (dn - dk) * log_q +
                     dk * log_p;
    logs[static_cast<std::size_t>(k - 1)] = v;
    peak = std::max(peak, v);
  }
  double sum = 0.0;
  for (double v : logs) sum += std::exp(v - peak);
  return std::exp(peak) * sum;
}

double negbin_pmf(double nu, double nbar, std::int64_t n) {
  require_positive_nu(nu);
  if (!(nbar > 0.0)) throw DomainError("negative binomial mean must be > 0");
  if (n < 0) return 0.0;
  const double dn = static_cast<double>(n);
  const double ratio = nbar / nu;
  return std::exp(std::lgamma(dn + nu) - std::lgamma(nu) - std::lgamma(dn + 1.0) +
                  dn * std::log(ratio) - (nu + dn) * std::log1p(ratio));
}

CountLaw CountLaw::polya_aeppli(double nu, double p) {
  polya_aeppli_pmf(nu, p, 0);  // parameter validation
  return CountLaw(Kind::polya_aeppli, nu, p);
}

CountLaw CountLaw::negative_binomial(double nu, double nbar) {
  negbin_pmf(nu, nbar, 0);
  return CountLaw(Kind::negative_binomial, nu, nbar);
}

double CountLaw::pmf(std::int64_t n) const {
  return kind_ == Kind::polya_aeppli ? polya_aeppli_pmf(a_, b_, n)
                                     : negbin_pmf(a_, b_, n);
}

double CountLaw::mean() const {
  return kind_ == Kind::polya_aeppli ? a_ * (1.0 - b_) / b_ : b_;
}

std::vector<double> CountLaw::table() const {
  std::vector<double> out;
  double total = 0.0;
  for (std::int64_t n = 0; n < 10'000'000; ++n) {
    const double p = pmf(n);
    out.push_back(p);
    total += p;
    if (total >= 1.0 - 1e-12 && static_cast<double>(n) > mean()) break;
  }
  return out;
}

void CountLaw::write_csv(std::ostream& out) const {
  const auto t = table();
  out << "n,pmf,cdf\n";
  double total = 0.0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    total += t[n];
    out << n << ',' << csv::number(t[n]) << ',' << csv::number(total) << '\n';
  }
}

double texture_cov(double nu, double window, double h2, double s) {
  require_positive_nu(nu);
  if (!(window > 0.0)) throw DomainError("window must be > 0");
  const double lag = std::abs(s);
  if (lag >= window) return 0.0;
  return (-h2 / nu) * (1.0 - lag / window);
}

double gaussian_limit_distance(const BernsteinModel& model, double nu,
                               double z_max) {
  if (!(z_max >= 0.0)) throw DomainError("z_max must be >= 0");
  const LimitTransform g(model, nu);
  constexpr int kPoints = 10001;
  double worst = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double z = z_max * i / (kPoints - 1);
    worst = std::max(worst, std::abs(g(z) - std::exp(-z)));
  }
  return worst;
}

std::vector<double> lst_moments(const LimitTransform& transform, int order) {
  if (order < 0 || order > 2) {
    throw DomainError("lst_moments supports orders 0..2");
  }
  std::vector<double> moments{transform(0.0)};
  for (int m = 1; m <= order; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    moments.push_back(sign * transform.derivative(m, 0.0).value);
  }
  return moments;
}

}  // namespace clutter
