#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clutter/bernstein.hpp"
#include "clutter/rng.hpp"

namespace clutter {

enum class SimMode {
  finite_exact,       // exact finite-activity texture, exponential-type marks
  infinite_approx,    // windowed integer process divided by its mean
  discrete_windowed,  // raw integer window counts N_T(t)
};

std::string_view to_string(SimMode mode);
SimMode sim_mode_from_string(std::string_view text);

struct SimConfig {
  double gamma = 0.25;  // Poisson rate scale
  double window = 8.0;  // window length T
  double kappa = 150.0;
  double duration = 1e4;
  double dt = 0.1;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::finite_exact;

  double nu() const { return gamma * window; }

  /// Throws DomainError unless all scales are positive and dt < window.
  void validate() const;

  /// Flat JSON object; from_json(to_json()) reproduces the config exactly.
  std::string to_json() const;
  static SimConfig from_json(std::string_view text);
};

/// Piecewise-constant right-continuous path: values[i] holds on
/// [change_times[i], change_times[i+1]), the last value up to `duration`.
struct TexturePath {
  std::vector<double> change_times;
  std::vector<double> values;
  double normalization = 1.0;  // E[N_T] for raw window counts, 1 otherwise
  double duration = 0.0;

  double value_at(double t) const;
  std::size_t size() const { return values.size(); }
};

/// Poisson arrival times on (t_begin, t_end] with independent exponential
/// gaps of mean 1/rate. Throws GuardError if rate * (t_end - t_begin) >= 1e9.
std::vector<double> poisson_arrivals(double rate, double t_begin, double t_end,
                                     Rng& rng);
inline std::vector<double> poisson_arrivals(double rate, double t_end,
                                            Rng& rng) {
  return poisson_arrivals(rate, 0.0, t_end, rng);
}

/// Sliding-window sum: the value at t is the sum of marks whose arrival a
/// satisfies t < a <= t + window, i.e. a mark is present on [a - window, a).
/// Event-driven; change points are the entry/exit times clipped to
/// [0, duration].
TexturePath windowed_process(std::span<const double> arrivals,
                             std::span<const double> marks, double window,
                             double duration);

/// Exact finite-activity texture: rate gamma*C, marks xi / (gamma*C*T).
TexturePath simulate_finite_exact(const BernsteinModel& model,
                                  const SimConfig& cfg, Rng& rng);

/// Raw window counts N_T(t): rate gamma*h(kappa), integer marks K_i.
/// normalization is set to E[N_T] = rate * T * E[K].
TexturePath simulate_discrete_windowed(const BernsteinModel& model,
                                       const SimConfig& cfg, Rng& rng);

/// N_T(t) / E[N_T]: approximates an infinite-activity texture for large
/// kappa. Requires kappa >= 10; warns on stderr below 100.
TexturePath simulate_infinite_approx(const BernsteinModel& model,
                                     const SimConfig& cfg, Rng& rng);

/// Dispatches on cfg.mode with an Rng seeded from cfg.seed.
TexturePath simulate(const BernsteinModel& model, const SimConfig& cfg);

/// tau(i dt) for i = 0..floor(duration/dt), right-continuous at change
/// points. Values are divided by path.normalization when `normalize` is set.
std::vector<double> sample_on_grid(const TexturePath& path, double dt,
                                   double duration, bool normalize = false);

/// CSV `t,tau` on the grid.
void write_grid_csv(std::ostream& out, const TexturePath& path, double dt);
/// CSV `change_time,value`.
void write_events_csv(std::ostream& out, const TexturePath& path);

}  // namespace clutter
