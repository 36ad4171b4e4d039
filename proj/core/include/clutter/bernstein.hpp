#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "clutter/numdiff.hpp"

namespace clutter {

/// lim_{z->inf} h(z) = limit < inf: the texture is a finite-activity process
/// realizable exactly as a windowed compound-Poisson process.
struct FiniteActivity {
  double limit = 0.0;
};

/// h(z) grows without bound: the texture is only approximated by the
/// windowed compound-Poisson construction.
struct InfiniteActivity {};

using Activity = std::variant<FiniteActivity, InfiniteActivity>;

enum class ModelKind { finite_builtin, infinite_builtin, custom };

/// A Bernstein function h on [0, inf) with h(0) = 0 and sublinear growth,
/// together with h1 = h'(0) > 0 and h2 = h''(0) <= 0.
///
/// Values are immutable and cheap to copy (shared state).
class BernsteinModel {
 public:
  using Function = std::function<double(double)>;
  using Derivative = std::function<double(int, double)>;

  /// Builds a model from an arbitrary function. Missing derivative closures
  /// fall back to finite differences; missing h1/h2 are estimated
  /// numerically at 0; the activity is classified by probing h at 1e4, 1e6
  /// and 1e8. No Bernstein checks are run here (see check_bernstein).
  static BernsteinModel custom(std::string name, Function h,
                               Derivative derivative = {},
                               std::optional<double> h1 = std::nullopt,
                               std::optional<double> h2 = std::nullopt);

  /// h(z) for z >= 0. Throws DomainError for negative z.
  double operator()(double z) const;
  double eval(double z) const { return (*this)(z); }

  /// h^(n)(z), n >= 1.
  double derivative(int n, double z) const;

  /// h^(n)(z) together with a finite-difference error estimate (zero for
  /// closed forms).
  numdiff::Estimate derivative_estimate(int n, double z) const;

  /// h^(n)(z) z^n / n!, evaluated without overflow when a closed form is
  /// available; this is the quantity the mixing PMF is built from.
  double taylor_term(int n, double z) const;

  bool has_closed_form_derivatives() const;

  double h1() const;
  double h2() const;
  const Activity& activity() const;
  bool is_finite_activity() const {
    return std::holds_alternative<FiniteActivity>(activity());
  }
  /// The limit C for finite-activity models.
  std::optional<double> activity_limit() const;

  ModelKind kind() const;
  const std::string& name() const;

 private:
  struct State;
  explicit BernsteinModel(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;

  friend BernsteinModel make_builtin_finite();
  friend BernsteinModel make_builtin_infinite();
};

/// h(z) = z / (z + 1): finite activity with C = 1, h1 = 1, h2 = -2.
BernsteinModel make_builtin_finite();

/// h(z) = ln(1 + z): infinite activity, h1 = 1, h2 = -1.
BernsteinModel make_builtin_infinite();

/// Recovers h from the Laplace-Stieltjes transform G of a unit-mean
/// infinitely divisible texture: h(z) = -ln G(nu z) / nu, with h1 fixed to 1.
/// Throws ModelError when G(0) != 1 (1e-9), when h is negative or decreasing
/// on the probe grid, or when h(z)/z does not vanish at z = 1e8.
BernsteinModel from_lst(const std::function<double(double)>& lst, double nu);

/// Same as from_lst but takes ln G directly, which avoids underflow when G
/// decays faster than double range at large arguments.
BernsteinModel from_log_lst(const std::function<double(double)>& log_lst,
                            double nu);

struct ConditionResult {
  std::string name;
  bool passed = false;
  double worst_margin = 0.0;  // >= 0 when satisfied
  double probe = 0.0;         // argument at which the worst margin occurred
};

struct ValidationReport {
  std::vector<ConditionResult> conditions;

  bool passed() const;
  const ConditionResult* find(std::string_view name) const;
  /// JSON array of flat {name, passed, worst_margin, probe} records.
  std::string to_json() const;
};

/// Numerically checks the side conditions a model has to satisfy:
///   h_at_zero          |h(0)| <= 1e-12
///   cm_order_<n>       (-1)^n h^(n+1)(z) >= -1e-9 on the grid, n = 0..max_order
///   sublinear_growth   h(1e8)/1e8 < 1e-4
///   finite_h1          0 < h1 < inf
///   finite_h2          -inf < h2 <= 0
///   activity_limit     |h(1e8) - C| < 1e-3 C  (finite-activity models only)
/// For derivatives obtained by finite differences the sign tolerance is
/// widened by four times the extrapolation error estimate.
/// Throws DomainError if the grid has non-positive points or max_order > 6.
ValidationReport check_bernstein(const BernsteinModel& model,
                                 std::span<const double> grid, int max_order);

/// G(z) = exp(-nu h(z / (nu h1))): the LST of the unit-mean texture marginal.
class LimitTransform {
 public:
  LimitTransform(BernsteinModel model, double nu);

  double operator()(double z) const;
  double log_value(double z) const;
  /// G^(n)(z) by finite differences.
  numdiff::Estimate derivative(int n, double z) const;

  double nu() const { return nu_; }
  const BernsteinModel& model() const { return model_; }

 private:
  BernsteinModel model_;
  double nu_;
};

LimitTransform limit_transform(const BernsteinModel& model, double nu);

}  // namespace clutter
