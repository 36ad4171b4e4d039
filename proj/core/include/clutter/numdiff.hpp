#pragma once

#include <functional>

namespace clutter::numdiff {

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // |difference| between the last two extrapolation levels
};

enum class Stencil { central, forward };

// n-th derivative of f at x from finite differences with base step `step`,
// refined by `levels` rounds of Richardson extrapolation (step halving).
Estimate derivative(const std::function<double(double)>& f, int order, double x,
                    double step, Stencil stencil, int levels);

// Derivative of a function defined on [0, inf): a six-level central tableau
// when the stencil fits inside the domain, otherwise an eight-level forward
// tableau. The base step scales as max(x, 1).
Estimate half_line_derivative(const std::function<double(double)>& f, int order,
                              double x);

}  // namespace clutter::numdiff
