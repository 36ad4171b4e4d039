#include "clutter/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "clutter/error.hpp"

namespace clutter::numdiff {
namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Plain n-th order difference quotient with step h.
double difference(const std::function<double(double)>& f, int order, double x,
                  double h, Stencil stencil) {
  double sum = 0.0;
  for (int k = 0; k <= order; ++k) {
    const double sign = ((order - k) % 2 == 0) ? 1.0 : -1.0;
    const double offset = stencil == Stencil::central
                              ? (k - 0.5 * order) * h
                              : static_cast<double>(k) * h;
    sum += sign * binomial(order, k) * f(x + offset);
  }
  return sum / std::pow(h, order);
}

}  // namespace

Estimate derivative(const std::function<double(double)>& f, int order, double x,
                    double step, Stencil stencil, int levels) {
  if (order < 1) throw DomainError("derivative order must be >= 1");
  if (!(step > 0.0)) throw DomainError("finite-difference step must be > 0");
  levels = std::max(levels, 1);

  // Ridders-style tableau: row i uses step/2^i, column j removes the j-th
  // error term (h^2 per column for central stencils, h per column forward).
  const double ratio = stencil == Stencil::central ? 4.0 : 2.0;
  std::vector<std::vector<double>> table(levels);
  Estimate best{difference(f, order, x, step, stencil),
                std::numeric_limits<double>::infinity()};
  table[0].push_back(best.value);
  double h = step;
  for (int i = 1; i < levels; ++i) {
    h *= 0.5;
    table[i].push_back(difference(f, order, x, h, stencil));
    double factor = ratio;
    for (int j = 1; j <= i; ++j) {
      const double refined =
          (factor * table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
      table[i].push_back(refined);
      factor *= ratio;
      const double err = std::max(std::abs(refined - table[i][j - 1]),
                                  std::abs(refined - table[i - 1][j - 1]));
      if (err <= best.error) best = {refined, err};
    }
    if (std::abs(table[i][i] - table[i - 1][i - 1]) >= 2.0 * best.error) break;
  }
  if (!std::isfinite(best.error)) best.error = 0.0;
  return best;
}

Estimate half_line_derivative(const std::function<double(double)>& f, int order,
                              double x) {
  if (x < 0.0) throw DomainError("derivative requested at negative argument");
  const double scale = std::max(x, 1.0);
  const double min_step = scale * 1e-3;
  if (x >= 0.5 * order * min_step) {
    const double step = std::min(scale * 0.1, 2.0 * x / order);
    return derivative(f, order, x, step, Stencil::central, 6);
  }
  return derivative(f, order, x, scale * 0.1, Stencil::forward, 8);
}

}  // namespace clutter::numdiff
