#include "lst_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "clutter/error.hpp"

namespace clutter::cli {

namespace {

bool parse_row(const std::string& line, double& z, double& g) {
  std::string text = line;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream row(text);
  return static_cast<bool>(row >> z >> g);
}

}  // namespace

LstTable LstTable::parse(std::istream& in) {
  std::vector<double> zs;
  std::vector<double> gs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double z = 0.0;
    double g = 0.0;
    if (!parse_row(line, z, g)) {
      if (zs.empty() && line_no == 1) continue;  // header
      throw ModelError("LST table line " + std::to_string(line_no) +
                       " is not a `z,G` pair");
    }
    zs.push_back(z);
    gs.push_back(g);
  }
  if (!zs.empty() && zs.front() > 0.0) {
    zs.insert(zs.begin(), 0.0);
    gs.insert(gs.begin(), 1.0);
  }
  if (zs.size() < 3) throw ModelError("LST table needs at least 3 rows");
  if (zs.front() != 0.0 || std::abs(gs.front() - 1.0) > 1e-9) {
    throw ModelError("LST table must satisfy G(0) = 1");
  }
  for (std::size_t i = 1; i < zs.size(); ++i) {
    if (!(zs[i] > zs[i - 1])) throw ModelError("LST table z must be ascending");
    if (!(gs[i] > 0.0) || gs[i] > gs[i - 1]) {
      throw ModelError("LST table G must be positive and nonincreasing");
    }
  }

  LstTable t;
  t.z_ = zs;
  t.minus_log_.resize(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) t.minus_log_[i] = -std::log(gs[i]);
  t.minus_log_[0] = 0.0;

  // Fritsch-Carlson slopes.
  const std::size_t n = zs.size();
  std::vector<double> h(n - 1);
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = zs[k + 1] - zs[k];
    d[k] = (t.minus_log_[k + 1] - t.minus_log_[k]) / h[k];
  }
  t.slope_.assign(n, 0.0);
  t.slope_.front() = d.front();
  t.slope_.back() = d.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] * d[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    t.slope_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  return t;
}

LstTable LstTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open LST table '" + path + "'");
  return parse(in);
}

double LstTable::log_value(double z) const {
  if (z <= 0.0) return 0.0;
  const std::size_t n = z_.size();
  if (z >= z_.back()) {
    return -(minus_log_.back() + z_.back() * slope_.back() * std::log(z / z_.back()));
  }
  const auto it = std::upper_bound(z_.begin(), z_.end(), z);
  const auto k = std::min(static_cast<std::size_t>(it - z_.begin()) - 1, n - 2);
  const double h = z_[k + 1] - z_[k];
  const double s = (z - z_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double value = (2 * s3 - 3 * s2 + 1) * minus_log_[k] +
                       (s3 - 2 * s2 + s) * h * slope_[k] +
                       (-2 * s3 + 3 * s2) * minus_log_[k + 1] +
                       (s3 - s2) * h * slope_[k + 1];
  return -value;
}

BernsteinModel model_from_table(const LstTable& table, double nu) {
  return from_log_lst([table](double z) { return table.log_value(z); }, nu);
}

}  // namespace clutter::cli
