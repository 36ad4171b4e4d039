#include "clutter/texture_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "clutter/csv.hpp"
#include "clutter/error.hpp"
#include "clutter/mixing_law.hpp"

namespace clutter {

namespace {

constexpr double kMaxExpectedArrivals = 1e9;

std::size_t grid_last_index(double dt, double duration) {
  if (!(dt > 0.0)) throw DomainError("grid spacing dt must be > 0");
  if (duration < 0.0) throw DomainError("duration must be >= 0");
  return static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12)));
}

}  // namespace

std::string_view to_string(SimMode mode) {
  switch (mode) {
    case SimMode::finite_exact:
      return "finite_exact";
    case SimMode::infinite_approx:
      return "infinite_approx";
    case SimMode::discrete_windowed:
      return "discrete_windowed";
  }
  return "unknown";
}

SimMode sim_mode_from_string(std::string_view text) {
  if (text == "finite_exact") return SimMode::finite_exact;
  if (text == "infinite_approx") return SimMode::infinite_approx;
  if (text == "discrete_windowed") return SimMode::discrete_windowed;
  throw DomainError("unknown simulation mode '" + std::string(text) + "'");
}

void SimConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(name) + " must be positive and finite");
    }
  };
  positive(gamma, "gamma");
  positive(window, "window T");
  positive(kappa, "kappa");
  positive(duration, "duration");
  positive(dt, "dt");
  if (!(dt < window)) {
    throw DomainError("dt must be smaller than the window T");
  }
}

std::string SimConfig::to_json() const {
  nlohmann::json j{{"gamma", gamma},       {"window", window},
                   {"kappa", kappa},       {"duration", duration},
                   {"dt", dt},             {"seed", seed},
                   {"mode", to_string(mode)}, {"nu", nu()}};
  return j.dump();
}

SimConfig SimConfig::from_json(std::string_view text) {
  SimConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    cfg.gamma = j.at("gamma").get<double>();
    cfg.window = j.at("window").get<double>();
    cfg.kappa = j.at("kappa").get<double>();
    cfg.duration = j.at("duration").get<double>();
    cfg.dt = j.at("dt").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.mode = sim_mode_from_string(j.at("mode").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed SimConfig record: ") + e.what());
  }
  return cfg;
}

double TexturePath::value_at(double t) const {
  if (values.empty()) return 0.0;
  const auto it = std::upper_bound(change_times.begin(), change_times.end(), t);
  if (it == change_times.begin()) return values.front();
  return values[static_cast<std::size_t>(it - change_times.begin()) - 1];
}

std::vector<double> poisson_arrivals(double rate, double t_begin, double t_end,
                                     Rng& rng) {
  if (!(rate > 0.0)) throw DomainError("arrival rate must be > 0");
  if (!(t_end >= t_begin)) throw DomainError("arrival interval is reversed");
  const double expected = rate * (t_end - t_begin);
  if (!(expected < kMaxExpectedArrivals)) {
    throw GuardError("expected arrival count " + std::to_string(expected) +
                     " exceeds the 1e9 memory guard");
  }
  std::vector<double> arrivals;
  arrivals.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
  double t = t_begin;
  while (true) {
    t += rng.exponential() / rate;
    if (t > t_end) break;
    arrivals.push_back(t);
  }
  return arrivals;
}

TexturePath windowed_process(std::span<const double> arrivals,
                             std::span<const double> marks, double window,
                             double duration) {
  if (arrivals.size() != marks.size()) {
    throw DomainError("windowed_process: marks are not aligned with arrivals");
  }
  if (!(window > 0.0)) throw DomainError("windowed_process: window must be > 0");
  if (!(duration >= 0.0)) throw DomainError("windowed_process: duration < 0");
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (i > 0 && arrivals[i] < arrivals[i - 1]) {
      throw DomainError("windowed_process: arrivals must be ascending");
    }
    if (!(marks[i] >= 0.0)) {
      throw DomainError("windowed_process: marks must be non-negative");
    }
  }

  const std::size_t n = arrivals.size();
  std::size_t next_in = 0;   // next arrival to enter (at a - window)
  std::size_t next_out = 0;  // next arrival to leave (at a)
  std::size_t present = 0;
  // Neumaier-compensated running sum; reset exactly when the window empties.
  double sum = 0.0;
  double carry = 0.0;
  auto accumulate = [&](double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };
  auto current = [&] {
    if (present == 0) {
      sum = 0.0;
      carry = 0.0;
    }
    return std::max(0.0, sum + carry);
  };

  TexturePath path;
  path.duration = duration;
  while (next_in < n && arrivals[next_in] - window <= 0.0) {
    accumulate(marks[next_in++]);
    ++present;
  }
  while (next_out < n && arrivals[next_out] <= 0.0) {
    accumulate(-marks[next_out++]);
    --present;
  }
  path.change_times.push_back(0.0);
  path.values.push_back(current());

  while (next_in < n || next_out < n) {
    const double t_in = next_in < n ? arrivals[next_in] - window : INFINITY;
    const double t_out = next_out < n ? arrivals[next_out] : INFINITY;
    const double t = std::min(t_in, t_out);
    if (t > duration) break;
    while (next_in < n && arrivals[next_in] - window == t) {
      accumulate(marks[next_in++]);
      ++present;
    }
    while (next_out < n && arrivals[next_out] == t) {
      accumulate(-marks[next_out++]);
      --present;
    }
    path.change_times.push_back(t);
    path.values.push_back(current());
  }
  return path;
}

TexturePath simulate_finite_exact(const BernsteinModel& model,
                                  const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto mixing = continuous_mixing(model);
  const double limit = *model.activity_limit();
  const double rate = cfg.gamma * limit;
  const double mark_scale = 1.0 / (rate * cfg.window);

  const auto arrivals =
      poisson_arrivals(rate, 0.0, cfg.duration + cfg.window, rng);
  std::vector<double> marks(arrivals.size());
  for (auto& m : marks) m = mixing.sample(rng) * mark_scale;
  return windowed_process(arrivals, marks, cfg.window, cfg.duration);
}

TexturePath simulate_discrete_windowed(const BernsteinModel& model,
                                       const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const MixingLaw law(model, cfg.kappa);
  const double rate = cfg.gamma * model(cfg.kappa);
  const auto arrivals =
      poisson_arrivals(rate, 0.0, cfg.duration + cfg.window, rng);
  std::vector<double> marks(arrivals.size());
  for (auto& m : marks) m = static_cast<double>(law.sample(rng));
  auto path = windowed_process(arrivals, marks, cfg.window, cfg.duration);
  path.normalization = rate * cfg.window * law.mean();
  return path;
}

TexturePath simulate_infinite_approx(const BernsteinModel& model,
                                     const SimConfig& cfg, Rng& rng) {
  if (!(cfg.kappa >= 10.0)) {
    throw DomainError("infinite-activity approximation requires kappa >= 10");
  }
  if (cfg.kappa < 100.0) {
    std::clog << "warning: kappa = " << cfg.kappa
              << " < 100; the windowed approximation is coarse\n";
  }
  auto path = simulate_discrete_windowed(model, cfg, rng);
  const double scale = 1.0 / path.normalization;
  for (auto& v : path.values) v *= scale;
  path.normalization = 1.0;
  return path;
}

TexturePath simulate(const BernsteinModel& model, const SimConfig& cfg) {
  Rng rng(cfg.seed);
  switch (cfg.mode) {
    case SimMode::finite_exact:
      return simulate_finite_exact(model, cfg, rng);
    case SimMode::infinite_approx:
      return simulate_infinite_approx(model, cfg, rng);
    case SimMode::discrete_windowed:
      return simulate_discrete_windowed(model, cfg, rng);
  }
  throw DomainError("unknown simulation mode");
}

std::vector<double> sample_on_grid(const TexturePath& path, double dt,
                                   double duration, bool normalize) {
  const std::size_t last = grid_last_index(dt, duration);
  std::vector<double> out(last + 1, 0.0);
  if (path.values.empty()) return out;
  const double scale = normalize ? 1.0 / path.normalization : 1.0;
  std::size_t j = 0;
  const std::size_t m = path.change_times.size();
  for (std::size_t i = 0; i <= last; ++i) {
    const double t = static_cast<double>(i) * dt;
    while (j + 1 < m && path.change_times[j + 1] <= t) ++j;
    out[i] = path.values[j] * scale;
  }
  return out;
}

void write_grid_csv(std::ostream& out, const TexturePath& path, double dt) {
  const auto samples = sample_on_grid(path, dt, path.duration);
  out << "t,tau\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << csv::number(static_cast<double>(i) * dt) << ','
        << csv::number(samples[i]) << '\n';
  }
}

void write_events_csv(std::ostream& out, const TexturePath& path) {
  out << "change_time,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    out << csv::number(path.change_times[i]) << ','
        << csv::number(path.values[i]) << '\n';
  }
}

}  // namespace clutter
