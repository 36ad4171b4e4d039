#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "clutter/bernstein.hpp"
#include "clutter/texture_sim.hpp"

namespace clutter::cli {

struct Check {
  std::string suite;
  std::string model;
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteModel {
  std::string label;  // finite-k, infinite-gamma or custom-lst
  BernsteinModel model;
};

struct SuiteSettings {
  SimConfig sim;        // gamma, window, kappa, duration, dt, seed, mode
  double z_max = 5.0;  // gaussian-limit range
};

/// Suites: marginal, covariance, moments, gaussian-limit.
std::vector<Check> run_suite(const std::string& suite, const SuiteModel& model,
                             const SuiteSettings& settings);

void print_checks(std::ostream& out, const std::vector<Check>& checks);

}  // namespace clutter::cli
