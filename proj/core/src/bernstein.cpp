#include "clutter/bernstein.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <json.hpp>

#include "clutter/error.hpp"

namespace clutter {

struct BernsteinModel::State {
  std::string name;
  ModelKind kind = ModelKind::custom;
  Function h;
  Derivative derivative;  // empty: finite differences
  Derivative taylor;      // empty: derived from `derivative`
  double h1 = 0.0;
  double h2 = 0.0;
  Activity activity = InfiniteActivity{};
};

namespace {

constexpr int kMaxNumericTaylorOrder = 20;

double signed_exp(bool negative, double log_magnitude) {
  const double v = std::exp(log_magnitude);
  return negative ? -v : v;
}

// (-1)^(n+1): the sign pattern of every Bernstein derivative.
bool derivative_is_negative(int n) { return n % 2 == 0; }

Activity classify_activity(const BernsteinModel::Function& h) {
  const double p4 = h(1e4);
  const double p6 = h(1e6);
  const double p8 = h(1e8);
  if (!std::isfinite(p8) || p8 <= 0.0) return InfiniteActivity{};
  const bool flat_low = (p6 - p4) < 1e-3 * std::abs(p6);
  const bool flat_high = (p8 - p6) < 1e-3 * std::abs(p8);
  if (flat_low && flat_high) return FiniteActivity{p8};
  return InfiniteActivity{};
}

}  // namespace

BernsteinModel::BernsteinModel(std::shared_ptr<const State> state)
    : state_(std::move(state)) {}

BernsteinModel BernsteinModel::custom(std::string name, Function h,
                                      Derivative derivative,
                                      std::optional<double> h1,
                                      std::optional<double> h2) {
  if (!h) throw DomainError("custom Bernstein model needs a function");
  auto state = std::make_shared<State>();
  state->name = std::move(name);
  state->kind = ModelKind::custom;
  state->h = std::move(h);
  state->derivative = std::move(derivative);
  BernsteinModel probe{state};
  state->h1 = h1 ? *h1 : probe.derivative(1, 0.0);
  state->h2 = h2 ? *h2 : probe.derivative(2, 0.0);
  state->activity = classify_activity(state->h);
  return BernsteinModel{std::move(state)};
}

double BernsteinModel::operator()(double z) const {
  if (!(z >= 0.0)) {
    throw DomainError("Bernstein function evaluated at negative argument " +
                      std::to_string(z));
  }
  return state_->h(z);
}

numdiff::Estimate BernsteinModel::derivative_estimate(int n, double z) const {
  if (n < 1) throw DomainError("derivative order must be >= 1");
  if (!(z >= 0.0)) throw DomainError("derivative at negative argument");
  if (state_->derivative) return {state_->derivative(n, z), 0.0};
  return numdiff::half_line_derivative(state_->h, n, z);
}

double BernsteinModel::derivative(int n, double z) const {
  return derivative_estimate(n, z).value;
}

double BernsteinModel::taylor_term(int n, double z) const {
  if (n < 1) throw DomainError("Taylor term order must be >= 1");
  if (!(z >= 0.0)) throw DomainError("Taylor term at negative argument");
  if (state_->taylor) return state_->taylor(n, z);
  if (z == 0.0) return 0.0;
  if (!state_->derivative && n > kMaxNumericTaylorOrder) {
    throw DomainError("finite-difference derivatives refused beyond order " +
                      std::to_string(kMaxNumericTaylorOrder));
  }
  const double d = derivative(n, z);
  if (d == 0.0) return 0.0;
  return signed_exp(d < 0.0, std::log(std::abs(d)) + n * std::log(z) -
                                 std::lgamma(n + 1.0));
}

bool BernsteinModel::has_closed_form_derivatives() const {
  return static_cast<bool>(state_->derivative);
}

double BernsteinModel::h1() const { return state_->h1; }
double BernsteinModel::h2() const { return state_->h2; }
const Activity& BernsteinModel::activity() const { return state_->activity; }

std::optional<double> BernsteinModel::activity_limit() const {
  if (const auto* f = std::get_if<FiniteActivity>(&state_->activity)) {
    return f->limit;
  }
  return std::nullopt;
}

ModelKind BernsteinModel::kind() const { return state_->kind; }
const std::string& BernsteinModel::name() const { return state_->name; }

BernsteinModel make_builtin_finite() {
  auto state = std::make_shared<BernsteinModel::State>();
  state->name = "finite-k";
  state->kind = ModelKind::finite_builtin;
  state->h = [](double z) { return z / (z + 1.0); };
  // h^(n)(z) = (-1)^(n+1) n! (z+1)^-(n+1)
  state->derivative = [](int n, double z) {
    return signed_exp(derivative_is_negative(n),
                      std::lgamma(n + 1.0) - (n + 1.0) * std::log1p(z));
  };
  // h^(n)(z) z^n / n! = (-1)^(n+1) (z/(z+1))^n / (z+1)
  state->taylor = [](int n, double z) {
    if (z == 0.0) return 0.0;
    return signed_exp(derivative_is_negative(n),
                      n * std::log(z / (z + 1.0)) - std::log1p(z));
  };
  state->h1 = 1.0;
  state->h2 = -2.0;
  state->activity = FiniteActivity{1.0};
  return BernsteinModel{std::move(state)};
}

BernsteinModel make_builtin_infinite() {
  auto state = std::make_shared<BernsteinModel::State>();
  state->name = "infinite-gamma";
  state->kind = ModelKind::infinite_builtin;
  state->h = [](double z) { return std::log1p(z); };
  // h^(n)(z) = (-1)^(n+1) (n-1)! (1+z)^-n
  state->derivative = [](int n, double z) {
    return signed_exp(derivative_is_negative(n),
                      std::lgamma(static_cast<double>(n)) - n * std::log1p(z));
  };
  // h^(n)(z) z^n / n! = (-1)^(n+1) (z/(1+z))^n / n
  state->taylor = [](int n, double z) {
    if (z == 0.0) return 0.0;
    return signed_exp(derivative_is_negative(n),
                      n * std::log(z / (1.0 + z)) - std::log(n));
  };
  state->h1 = 1.0;
  state->h2 = -1.0;
  state->activity = InfiniteActivity{};
  return BernsteinModel{std::move(state)};
}

BernsteinModel from_log_lst(const std::function<double(double)>& log_lst,
                            double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("from_lst: nu must be positive and finite");
  }
  const double at_zero = log_lst(0.0);
  if (!(std::abs(at_zero) <= 1e-9)) {
    throw ModelError("transform does not satisfy G(0) = 1 (ln G(0) = " +
                     std::to_string(at_zero) + ")");
  }
  auto h = [log_lst, nu](double z) { return -log_lst(nu * z) / nu; };

  double previous = h(0.0);
  double previous_z = 0.0;
  for (int e = -48; e <= 64; ++e) {
    const double z = std::pow(10.0, e / 8.0);
    const double value = h(z);
    if (!std::isfinite(value)) {
      throw ModelError("h is not finite at z = " + std::to_string(z));
    }
    if (value < -1e-12) {
      throw ModelError("h is negative at z = " + std::to_string(z));
    }
    if (value < previous - 1e-12 * std::max(1.0, std::abs(previous))) {
      throw ModelError("h decreases between z = " + std::to_string(previous_z) +
                       " and z = " + std::to_string(z));
    }
    previous = value;
    previous_z = z;
  }
  if (!(h(1e8) / 1e8 < 1e-4)) {
    throw ModelError("h(z)/z does not vanish at large z (degenerate texture)");
  }
  return BernsteinModel::custom("lst", std::move(h), {}, 1.0);
}

BernsteinModel from_lst(const std::function<double(double)>& lst, double nu) {
  const double at_zero = lst(0.0);
  if (!(std::abs(at_zero - 1.0) <= 1e-9)) {
    throw ModelError("transform does not satisfy G(0) = 1 (G(0) = " +
                     std::to_string(at_zero) + ")");
  }
  return from_log_lst([lst](double z) { return std::log(lst(z)); }, nu);
}

bool ValidationReport::passed() const {
  for (const auto& c : conditions) {
    if (!c.passed) return false;
  }
  return !conditions.empty();
}

const ConditionResult* ValidationReport::find(std::string_view name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : conditions) {
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"worst_margin", c.worst_margin},
                   {"probe", c.probe}});
  }
  return out.dump();
}

ValidationReport check_bernstein(const BernsteinModel& model,
                                 std::span<const double> grid, int max_order) {
  if (max_order < 0 || max_order > 6) {
    throw DomainError("check_bernstein: max_order must be in [0, 6]");
  }
  if (grid.empty()) throw DomainError("check_bernstein: empty probe grid");
  for (double z : grid) {
    if (!(z > 0.0) || !std::isfinite(z)) {
      throw DomainError("check_bernstein: grid must lie in (0, inf)");
    }
  }

  ValidationReport report;
  auto add = [&report](std::string name, double margin, double probe) {
    const bool ok = std::isfinite(margin) && margin >= 0.0;
    report.conditions.push_back({std::move(name), ok, margin, probe});
  };

  add("h_at_zero", 1e-12 - std::abs(model(0.0)), 0.0);

  for (int n = 0; n <= max_order; ++n) {
    double worst = std::numeric_limits<double>::infinity();
    double worst_z = grid.front();
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (double z : grid) {
      const auto est = model.derivative_estimate(n + 1, z);
      const double margin = sign * est.value + 1e-9 + 4.0 * est.error;
      if (!(margin >= worst)) {
        worst = margin;
        worst_z = z;
      }
    }
    add("cm_order_" + std::to_string(n), worst, worst_z);
  }

  constexpr double kLarge = 1e8;
  const double at_large = model(kLarge);
  add("sublinear_growth", 1e-4 - at_large / kLarge, kLarge);

  const double h1 = model.h1();
  add("finite_h1", (std::isfinite(h1) && h1 > 0.0) ? h1 : -1.0, 0.0);
  const double h2 = model.h2();
  add("finite_h2", std::isfinite(h2) ? 1e-9 - h2 : -1.0, 0.0);

  if (auto c = model.activity_limit()) {
    add("activity_limit", 1e-3 * *c - std::abs(at_large - *c), kLarge);
  }
  return report;
}

LimitTransform::LimitTransform(BernsteinModel model, double nu)
    : model_(std::move(model)), nu_(nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("limit transform: nu must be positive and finite");
  }
}

double LimitTransform::log_value(double z) const {
  return -nu_ * model_(z / (nu_ * model_.h1()));
}

double LimitTransform::operator()(double z) const {
  return std::exp(log_value(z));
}

numdiff::Estimate LimitTransform::derivative(int n, double z) const {
  return numdiff::half_line_derivative([this](double x) { return (*this)(x); },
                                       n, z);
}

LimitTransform limit_transform(const BernsteinModel& model, double nu) {
  return LimitTransform(model, nu);
}

}  // namespace clutter
