#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "clutter/bernstein.hpp"

namespace clutter::cli {

/// Tabulated Laplace-Stieltjes transform G(z) of a unit-mean texture.
/// -ln G is interpolated with a monotone piecewise cubic (Fritsch-Carlson)
/// and continued past the last node as a + b ln z, which keeps it increasing
/// and concave.
class LstTable {
 public:
  /// Rows `z,G` (a non-numeric header line is skipped). z must be ascending
  /// and start at 0 with G(0) = 1 (the point is added when z starts above
  /// 0); G must be nonincreasing and positive. Throws ModelError otherwise.
  static LstTable parse(std::istream& in);
  static LstTable load(const std::string& path);

  double log_value(double z) const;  // ln G(z)
  /// Slope of -ln G at 0, i.e. the texture mean implied by the table.
  double initial_slope() const { return slope_.front(); }

 private:
  std::vector<double> z_;
  std::vector<double> minus_log_;
  std::vector<double> slope_;
};

/// The Bernstein model h(z) = -ln G(nu z) / nu for a tabulated G.
BernsteinModel model_from_table(const LstTable& table, double nu);

}  // namespace clutter::cli
