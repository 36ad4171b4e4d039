#include "clutter/mixing_law.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>

#include "clutter/error.hpp"
#include "clutter/csv.hpp"

namespace clutter {

namespace {

constexpr double kMassTarget = 1.0 - 1e-10;
constexpr int kMaxNumericOrder = 20;

}  // namespace

struct MixingLaw::Cache {
  // Numerical models only: finite-difference head and moment-matched tail.
  std::vector<double> head;  // head[n], n = 0..head_max
  double tail_mass = 0.0;
  double tail_ratio = 0.0;
  double tail_shape = 1.0;  // negative-binomial shape; 1 is geometric

  std::once_flag table_once;
  PmfTable table;
};

MixingLaw::MixingLaw(BernsteinModel model, double kappa)
    : model_(std::move(model)), kappa_(kappa), cache_(std::make_shared<Cache>()) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("mixing law: kappa must be positive and finite");
  }
  h_kappa_ = model_(kappa_);
  if (!(h_kappa_ > 0.0)) {
    throw ModelError("mixing law: h(kappa) must be positive");
  }
  if (model_.has_closed_form_derivatives()) return;

  auto& head = cache_->head;
  head.push_back(0.0);
  double scale = 1.0;  // kappa^n / n!
  double head_mass = 0.0;
  double head_mean = 0.0;
  double head_second = 0.0;
  for (int n = 1; n <= kMaxNumericOrder; ++n) {
    scale *= kappa_ / n;
    const auto d = model_.derivative_estimate(n, kappa_);
    const double sign = (n % 2 == 0) ? -1.0 : 1.0;  // -(-1)^n
    const double p = sign * d.value * scale / h_kappa_;
    const double err = d.error * scale / h_kappa_;
    if (!std::isfinite(p) || p < -1e-9 || err > std::max(1e-7, 0.01 * p)) break;
    const double clamped = std::max(p, 0.0);
    head.push_back(clamped);
    head_mass += clamped;
    head_mean += n * clamped;
    head_second += static_cast<double>(n) * n * clamped;
  }
  const auto head_max = static_cast<double>(head.size() - 1);
  cache_->tail_mass = std::max(0.0, 1.0 - head_mass);
  if (cache_->tail_mass > 1e-12) {
    // Shifted negative-binomial tail on n > head_max carrying the remaining
    // mass, mean and second moment; geometric when the second moment leaves
    // no room for overdispersion.
    const double m = cache_->tail_mass;
    const double tail_mean = (mean() - head_mean) / m;
    const double shift = head_max + 1.0;
    const double excess = tail_mean - shift;
    const double var =
        (second_moment() - head_second) / m - tail_mean * tail_mean;
    if (excess > 0.0 && std::isfinite(var) && var > excess * 1.000001) {
      cache_->tail_ratio = 1.0 - excess / var;
      cache_->tail_shape = excess * (1.0 - cache_->tail_ratio) / cache_->tail_ratio;
    } else {
      cache_->tail_ratio = excess > 0.0 ? excess / (1.0 + excess) : 0.0;
    }
  }
}

double MixingLaw::pgf(double u) const {
  if (!(u > 0.0 && u <= 1.0)) {
    throw DomainError("pgf argument must lie in (0, 1]");
  }
  return 1.0 - model_(kappa_ * (1.0 - u)) / h_kappa_;
}

double MixingLaw::generic_pmf(std::int64_t n) const {
  const auto& head = cache_->head;
  const auto head_max = static_cast<std::int64_t>(head.size()) - 1;
  if (n <= head_max) return head[static_cast<std::size_t>(n)];
  const double r = cache_->tail_ratio;
  const double k = static_cast<double>(n - head_max - 1);
  if (r == 0.0) return k == 0.0 ? cache_->tail_mass : 0.0;
  const double a = cache_->tail_shape;
  return cache_->tail_mass *
         std::exp(std::lgamma(k + a) - std::lgamma(a) - std::lgamma(k + 1.0) +
                  a * std::log1p(-r) + k * std::log(r));
}

double MixingLaw::pmf(std::int64_t n) const {
  if (n <= 0) return 0.0;
  if (!model_.has_closed_form_derivatives()) return generic_pmf(n);
  const int order = static_cast<int>(std::min<std::int64_t>(n, 1 << 30));
  const double sign = (order % 2 == 0) ? -1.0 : 1.0;  // -(-1)^n
  return sign * model_.taylor_term(order, kappa_) / h_kappa_;
}

double MixingLaw::mean() const { return kappa_ * model_.h1() / h_kappa_; }

double MixingLaw::second_moment() const {
  return -kappa_ * kappa_ * model_.h2() / h_kappa_ + mean();
}

const PmfTable& MixingLaw::table() const {
  std::call_once(cache_->table_once, [this] {
    auto& t = cache_->table;
    t.approximate_tail = !model_.has_closed_form_derivatives();
    t.pmf.push_back(0.0);
    t.cdf.push_back(0.0);
    double total = 0.0;
    for (std::int64_t n = 1; n < kMaxTableSize; ++n) {
      const double p = pmf(n);
      total += p;
      t.pmf.push_back(p);
      t.cdf.push_back(total);
      if (total >= kMassTarget) break;
    }
    t.complete = total >= kMassTarget;
  });
  return cache_->table;
}

std::int64_t MixingLaw::sample(Rng& rng) const {
  switch (model_.kind()) {
    case ModelKind::finite_builtin: {
      // Geometric on {1, 2, ...} with success probability 1/(kappa+1).
      const double p = 1.0 / (kappa_ + 1.0);
      const double n = std::floor(std::log(rng.uniform()) / std::log1p(-p));
      return 1 + static_cast<std::int64_t>(std::min(n, 4.0e18));
    }
    case ModelKind::infinite_builtin: {
      // Kemp's second accelerated generator for the logarithmic law.
      const double p = kappa_ / (1.0 + kappa_);
      const double r = -std::log1p(kappa_);  // ln(1 - p)
      while (true) {
        const double v = rng.uniform();
        if (v >= p) return 1;
        const double q = -std::expm1(r * rng.uniform());
        if (v <= q * q) {
          const double n = std::floor(1.0 + std::log(v) / std::log(q));
          if (n >= 1.0) return static_cast<std::int64_t>(std::min(n, 4.0e18));
          continue;
        }
        return v >= q ? 1 : 2;
      }
    }
    case ModelKind::custom:
      break;
  }
  const auto& t = table();
  if (!t.complete) {
    throw GuardError(
        "mixing law: PMF mass below 1 - 1e-10 at the table ceiling; the "
        "cluster-size tail is too heavy for inversion sampling");
  }
  const double u = rng.uniform();
  const auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), u);
  if (it == t.cdf.end()) return t.n_max();
  return static_cast<std::int64_t>(it - t.cdf.begin());
}

void MixingLaw::write_pmf_csv(std::ostream& out) const {
  const auto& t = table();
  out << "n,p\n";
  for (std::size_t n = 0; n < t.pmf.size(); ++n) {
    out << n << ',' << csv::number(t.pmf[n]) << '\n';
  }
}

double gaver_stehfest(const std::function<double(double)>& transform, double t,
                      int terms) {
  if (terms < 2 || terms % 2 != 0) {
    throw DomainError("Gaver-Stehfest needs an even number of terms");
  }
  if (!(t > 0.0)) throw DomainError("Gaver-Stehfest needs t > 0");
  const int half = terms / 2;
  auto fact = [](int k) { return std::tgamma(k + 1.0); };
  const double ln2 = std::log(2.0);
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    double v = 0.0;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      v += std::pow(j, half) * fact(2 * j) /
           (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) *
            fact(2 * j - k));
    }
    if ((k + half) % 2 != 0) v = -v;
    sum += v * transform(k * ln2 / t);
  }
  return sum * ln2 / t;
}

ContinuousMixing ContinuousMixing::from_model(const BernsteinModel& model) {
  const auto limit = model.activity_limit();
  if (!limit) {
    throw DomainError(
        "continuous mixing law requires a finite-activity model; for infinite "
        "activity K/E[K] degenerates to a point mass at 0");
  }
  ContinuousMixing law;
  law.model_ = model;
  law.limit_ = *limit;
  if (model.kind() == ModelKind::finite_builtin) {
    law.exponential_ = true;
    return law;
  }

  // CDF = inverse Laplace transform of g(z)/z on a log-spaced grid.
  auto cdf_transform = [&law](double z) { return law.lst(z) / z; };
  auto grid = std::make_shared<std::vector<double>>();
  auto values = std::make_shared<std::vector<double>>();
  constexpr int kPerDecade = 40;
  double running = 0.0;
  for (int i = 0;; ++i) {
    const double s = 1e-4 * std::pow(10.0, static_cast<double>(i) / kPerDecade);
    const double f = gaver_stehfest(cdf_transform, s, 12);
    running = std::clamp(std::max(running, f), 0.0, 1.0);
    grid->push_back(s);
    values->push_back(running);
    if ((running >= 1.0 - 1e-6 && s > 1.0) || s > 1e6) break;
  }
  law.grid_ = std::move(grid);
  law.grid_cdf_ = std::move(values);
  return law;
}

double ContinuousMixing::lst(double z) const {
  if (exponential_) return 1.0 / (1.0 + z);
  return 1.0 - model_((limit_ / model_.h1()) * z) / limit_;
}

double ContinuousMixing::cdf(double s) const {
  if (s <= 0.0) return 0.0;
  if (exponential_) return -std::expm1(-s);
  const auto& g = *grid_;
  const auto& f = *grid_cdf_;
  if (s >= g.back()) return f.back();
  if (s <= g.front()) return f.front() * s / g.front();
  const auto it = std::upper_bound(g.begin(), g.end(), s);
  const auto i = static_cast<std::size_t>(it - g.begin());
  const double w = (s - g[i - 1]) / (g[i] - g[i - 1]);
  return f[i - 1] + w * (f[i] - f[i - 1]);
}

double ContinuousMixing::sample(Rng& rng) const {
  if (exponential_) return rng.exponential();
  const auto& g = *grid_;
  const auto& f = *grid_cdf_;
  const double u = rng.uniform();
  if (u <= f.front()) return f.front() > 0.0 ? g.front() * u / f.front() : 0.0;
  if (u > f.back()) {
    // Residual mass beyond the table (< 1e-6): exponential continuation.
    return g.back() * (1.0 + 0.1 * rng.exponential());
  }
  const auto it = std::lower_bound(f.begin(), f.end(), u);
  const auto i = static_cast<std::size_t>(it - f.begin());
  const double df = f[i] - f[i - 1];
  if (df <= 0.0) return g[i];
  return g[i - 1] + (u - f[i - 1]) / df * (g[i] - g[i - 1]);
}

}  // namespace clutter
