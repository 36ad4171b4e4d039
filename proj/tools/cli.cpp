#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "clutter/analytic_stats.hpp"
#include "clutter/bernstein.hpp"
#include "clutter/error.hpp"
#include "clutter/estimators.hpp"
#include "clutter/speckle.hpp"
#include "clutter/texture_sim.hpp"
#include "lst_table.hpp"
#include "validate.hpp"

#ifndef CLUTTER_VERSION
#define CLUTTER_VERSION "unknown"
#endif

namespace clutter::cli {

namespace {

namespace fs = std::filesystem;

// A flag combination that parsed but is not usable.
struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Scales {
  double gamma;
  double window;
  double nu;
};

// Any two of gamma, T and nu fix the third. With only one given, gamma falls
// back to `default_gamma` when there is one.
Scales resolve_scales(std::optional<double> gamma, std::optional<double> window,
                      std::optional<double> nu,
                      std::optional<double> default_gamma) {
  for (const auto& [v, name] : {std::pair{gamma, "--gamma"}, std::pair{window, "--T"},
                                std::pair{nu, "--nu"}}) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) {
      throw FlagError(std::string(name) + " must be positive");
    }
  }
  const int given = (gamma ? 1 : 0) + (window ? 1 : 0) + (nu ? 1 : 0);
  if (given == 3) {
    if (std::abs(*gamma * *window - *nu) > 1e-9 * *nu) {
      throw FlagError("--gamma, --T and --nu are inconsistent (nu != gamma * T)");
    }
    return {*gamma, *window, *nu};
  }
  if (given < 2 && !gamma && default_gamma) gamma = default_gamma;
  if (gamma && window) return {*gamma, *window, *gamma * *window};
  if (gamma && nu) return {*gamma, *nu / *gamma, *nu};
  if (window && nu) return {*nu / *window, *window, *nu};
  throw FlagError("two of --gamma, --T and --nu are required");
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  const char* env = std::getenv("CLUTTER_SEED");
  if (env == nullptr || *env == '\0') return flag_seed;
  std::uint64_t value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FlagError("CLUTTER_SEED is not an unsigned integer: '" + std::string(text) + "'");
  }
  return value;
}

struct ModelFlags {
  std::string model;
  std::string lst_file;
  std::optional<double> gamma;
  std::optional<double> window;
  std::optional<double> nu;
  double kappa = 150.0;
};

void add_model_flags(CLI::App* app, ModelFlags& f, bool model_required) {
  auto* opt = app->add_option("--model", f.model, "finite-k, infinite-gamma or custom-lst")
                  ->check(CLI::IsMember({"finite-k", "infinite-gamma", "custom-lst"}));
  if (model_required) opt->required();
  app->add_option("--lst-file", f.lst_file, "CSV of (z, G) pairs for --model custom-lst");
  app->add_option("--gamma", f.gamma, "Poisson rate scale gamma");
  app->add_option("--T", f.window, "window length T");
  app->add_option("--nu", f.nu, "shape nu = gamma * T");
  app->add_option("--kappa", f.kappa, "cluster-size parameter kappa")->capture_default_str();
}

BernsteinModel make_model(const ModelFlags& f, const std::string& name, double nu) {
  if (name == "finite-k") return make_builtin_finite();
  if (name == "infinite-gamma") return make_builtin_infinite();
  if (f.lst_file.empty()) throw FlagError("--model custom-lst needs --lst-file");
  const auto table = LstTable::load(f.lst_file);
  auto model = model_from_table(table, nu);
  std::vector<double> grid;
  for (int e = -16; e <= 24; ++e) grid.push_back(std::pow(10.0, e / 4.0));
  const auto report = check_bernstein(model, grid, 2);
  if (!report.passed()) {
    std::string failed;
    for (const auto& c : report.conditions) {
      if (!c.passed) failed += " " + c.name;
    }
    throw ModelError("tabulated transform is not a valid texture LST:" + failed);
  }
  return model;
}

std::string replica_name(const std::string& stem, int index, int count) {
  if (count == 1) return stem + ".csv";
  std::ostringstream s;
  s << stem << "_r" << std::setw(3) << std::setfill('0') << index << ".csv";
  return s.str();
}

// --- simulate ---------------------------------------------------------------

struct SimulateFlags {
  ModelFlags model;
  double duration = 1e4;
  double dt = 0.1;
  std::uint64_t seed = 1;
  std::string mode;
  std::string out = ".";
  bool events = false;
  std::string speckle = "none";
  double sigma2 = 1.0;
  double rho = 0.9;
  std::string acf_file;
  int replications = 1;
  int jobs = 1;
};

struct ReplicaSummary {
  EmpiricalSummary summary;
  std::optional<double> ks;
  std::string ks_law;
};

std::vector<double> load_acf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FlagError("cannot open ACF file '" + path + "'");
  std::vector<double> acf;
  double v = 0.0;
  while (in >> v) acf.push_back(v);
  if (acf.empty()) throw FlagError("ACF file '" + path + "' holds no values");
  return acf;
}

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  std::optional<SpeckleSpec> speckle;
  BernsteinModel model = make_builtin_finite();
  try {
    const auto s = resolve_scales(f.model.gamma, f.model.window, f.model.nu, std::nullopt);
    cfg.gamma = s.gamma;
    cfg.window = s.window;
    cfg.kappa = f.model.kappa;
    cfg.duration = f.duration;
    cfg.dt = f.dt;
    cfg.seed = effective_seed(f.seed);
    cfg.validate();
    if (f.replications < 1) throw FlagError("--replications must be >= 1");
    if (f.jobs < 1) throw FlagError("--jobs must be >= 1");
    if (f.speckle != "none") {
      SpeckleSpec spec;
      spec.variance = f.sigma2;
      spec.dt = f.dt;
      if (f.speckle == "ar1") spec.correlation = Ar1Speckle{f.rho};
      if (f.speckle == "custom") {
        if (f.acf_file.empty()) throw FlagError("--speckle custom needs --acf-file");
        spec.correlation = CustomAcfSpeckle{load_acf(f.acf_file)};
      }
      spec.validate();
      speckle = spec;
    }
  } catch (const DomainError& e) {
    throw FlagError(e.what());
  }

  model = make_model(f.model, f.model.model, cfg.nu());
  if (f.mode.empty()) {
    cfg.mode = model.is_finite_activity() ? SimMode::finite_exact : SimMode::infinite_approx;
  } else {
    try {
      cfg.mode = sim_mode_from_string(f.mode);
    } catch (const DomainError& e) {
      throw FlagError(e.what());
    }
  }
  if (cfg.mode == SimMode::finite_exact && !model.is_finite_activity()) {
    throw FlagError("--mode finite_exact needs a finite-activity model");
  }

  const fs::path dir(f.out);
  fs::create_directories(dir);
  const int reps = f.replications;
  std::vector<ReplicaSummary> summaries(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(reps));
  std::vector<std::vector<std::string>> produced(static_cast<std::size_t>(reps));

  auto run_one = [&](int r) {
    const auto idx = static_cast<std::size_t>(r);
    Rng rng = reps == 1 ? Rng(cfg.seed) : Rng::stream(cfg.seed, static_cast<std::uint64_t>(r));
    TexturePath path;
    switch (cfg.mode) {
      case SimMode::finite_exact:
        path = simulate_finite_exact(model, cfg, rng);
        break;
      case SimMode::infinite_approx:
        path = simulate_infinite_approx(model, cfg, rng);
        break;
      case SimMode::discrete_windowed:
        path = simulate_discrete_windowed(model, cfg, rng);
        break;
    }
    auto write = [&](const std::string& stem, auto&& body) {
      const auto file = dir / replica_name(stem, r, reps);
      std::ofstream os(file, std::ios::binary);
      if (!os) throw GuardError("cannot write " + file.string());
      body(os);
      produced[idx].push_back(file.string());
    };
    write("texture", [&](std::ostream& os) { write_grid_csv(os, path, cfg.dt); });
    if (f.events) {
      write("texture_events", [&](std::ostream& os) { write_events_csv(os, path); });
    }
    if (speckle) {
      Rng speckle_rng = Rng::stream(cfg.seed, (std::uint64_t{1} << 32) + idx);
      const auto x = gen_speckle(*speckle, grid_size(cfg.dt, cfg.duration), speckle_rng);
      const auto series = compose(path, x, cfg.dt);
      write("clutter", [&](std::ostream& os) { series.write_csv(os); });
    }

    const auto grid = sample_on_grid(path, cfg.dt, cfg.duration, true);
    auto& rs = summaries[idx];
    rs.summary = summarize(grid, cfg.dt, 0.0);
    rs.summary.ecdf.clear();
    const auto thinned =
        thin(grid, static_cast<std::size_t>(std::ceil(1.0625 * cfg.window / cfg.dt)));
    if (thinned.size() >= 2 && cfg.mode != SimMode::discrete_windowed) {
      if (model.kind() == ModelKind::finite_builtin) {
        const auto law = k_texture_law(cfg.nu());
        rs.ks = ks_distance(thinned, [&](double x) { return law.cdf(x); });
        rs.ks_law = "k-texture";
      } else if (model.kind() == ModelKind::infinite_builtin) {
        const auto law = gamma_texture_law(cfg.nu());
        rs.ks = ks_distance(thinned, [&](double x) { return law.cdf(x); });
        rs.ks_law = "gamma";
      }
    }
  };

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        run_one(r);
      } catch (...) {
        failures[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int threads = std::min(f.jobs, reps);
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  nlohmann::json manifest;
  manifest["tool_version"] = CLUTTER_VERSION;
  manifest["model"] = f.model.model;
  manifest["config"] = nlohmann::json::parse(cfg.to_json());
  manifest["seed"] = cfg.seed;
  manifest["replications"] = reps;
  if (speckle) {
    nlohmann::json sj{{"variance", speckle->variance}, {"dt", speckle->dt}};
    if (const auto* ar = std::get_if<Ar1Speckle>(&speckle->correlation)) {
      sj["correlation"] = "ar1";
      sj["rho"] = ar->rho;
    } else if (const auto* c = std::get_if<CustomAcfSpeckle>(&speckle->correlation)) {
      sj["correlation"] = "custom";
      sj["acf"] = c->acf;
    } else {
      sj["correlation"] = "white";
    }
    manifest["speckle"] = sj;
  } else {
    manifest["speckle"] = nullptr;
  }
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& files : produced) {
    for (const auto& file : files) outputs.push_back(file);
  }
  const auto manifest_path = dir / "manifest.json";
  outputs.push_back(manifest_path.string());
  manifest["outputs"] = outputs;
  {
    std::ofstream os(manifest_path, std::ios::binary);
    if (!os) throw GuardError("cannot write " + manifest_path.string());
    os << manifest.dump(2) << '\n';
  }

  out << std::setprecision(6);
  out << "model: " << f.model.model << "  mode: " << to_string(cfg.mode)
      << "  nu: " << cfg.nu() << "  gamma: " << cfg.gamma << "  T: " << cfg.window
      << "  seed: " << cfg.seed << '\n';
  for (int r = 0; r < reps; ++r) {
    const auto& rs = summaries[static_cast<std::size_t>(r)];
    if (reps > 1) out << "replication " << r << '\n';
    out << "  samples: " << rs.summary.n << '\n'
        << "  mean: " << rs.summary.mean << '\n'
        << "  variance: " << rs.summary.variance << "  (expected "
        << -model.h2() / cfg.nu() << ")\n"
        << "  zero_fraction: " << rs.summary.zero_fraction << '\n';
    if (rs.ks) out << "  ks_vs_" << rs.ks_law << ": " << *rs.ks << '\n';
  }
  out << "wrote " << manifest_path.string() << '\n';
  (void)err;
  return kOk;
}

// --- validate ---------------------------------------------------------------

struct ValidateFlags {
  ModelFlags model;
  std::string suite = "all";
  std::optional<double> duration;
  std::optional<double> dt;
  std::uint64_t seed = 1;
  double z_max = 5.0;
};

int cmd_validate(const ValidateFlags& f, std::ostream& out, std::ostream&) {
  SuiteSettings settings;
  const auto s = resolve_scales(f.model.gamma, f.model.window, f.model.nu, 0.25);
  settings.sim.gamma = s.gamma;
  settings.sim.window = s.window;
  settings.sim.kappa = f.model.kappa;
  settings.sim.duration = f.duration.value_or(25000.0 * s.window);
  settings.sim.dt = f.dt.value_or(s.window / 16.0);
  settings.sim.seed = effective_seed(f.seed);
  settings.z_max = f.z_max;
  try {
    settings.sim.validate();
  } catch (const DomainError& e) {
    throw FlagError(e.what());
  }

  std::vector<std::string> labels;
  if (f.model.model.empty()) {
    labels = {"finite-k", "infinite-gamma"};
  } else {
    labels = {f.model.model};
  }
  std::vector<std::string> suites;
  if (f.suite == "all") {
    suites = {"moments", "gaussian-limit", "covariance", "marginal"};
  } else {
    suites = {f.suite};
  }

  std::vector<Check> checks;
  for (const auto& label : labels) {
    const SuiteModel m{label, make_model(f.model, label, s.nu)};
    for (const auto& suite : suites) {
      const auto part = run_suite(suite, m, settings);
      checks.insert(checks.end(), part.begin(), part.end());
    }
  }
  print_checks(out, checks);
  const bool ok = std::all_of(checks.begin(), checks.end(),
                              [](const Check& c) { return c.passed; });
  out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? kOk : kChecksFailed;
}

// --- lawtable ---------------------------------------------------------------

struct LawtableFlags {
  std::string law;
  double nu = 0.0;
  std::optional<double> p;
  std::optional<double> nbar;
  std::size_t points = 2001;
  double x_max = 0.0;
  std::string out = "-";
};

int cmd_lawtable(const LawtableFlags& f, std::ostream& out, std::ostream&) {
  std::ofstream file;
  std::ostream* os = &out;
  auto emit = [&](auto&& body) {
    if (f.out != "-") {
      file.open(f.out, std::ios::binary);
      if (!file) throw GuardError("cannot write " + f.out);
      os = &file;
    }
    body(*os);
  };
  try {
    if (f.law == "k-texture") {
      const auto law = k_texture_law(f.nu);
      emit([&](std::ostream& o) { law.write_csv(o, f.points, f.x_max); });
    } else if (f.law == "gamma") {
      const auto law = gamma_texture_law(f.nu);
      emit([&](std::ostream& o) { law.write_csv(o, f.points, f.x_max); });
    } else if (f.law == "polya-aeppli") {
      if (!f.p) throw FlagError("--law polya-aeppli needs --p");
      const auto law = CountLaw::polya_aeppli(f.nu, *f.p);
      emit([&](std::ostream& o) { law.write_csv(o); });
    } else {
      if (!f.nbar) throw FlagError("--law negbin needs --nbar");
      const auto law = CountLaw::negative_binomial(f.nu, *f.nbar);
      emit([&](std::ostream& o) { law.write_csv(o); });
    }
  } catch (const DomainError& e) {
    throw FlagError(e.what());
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Compound-Gaussian clutter texture simulation and validation", "clutter"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CLUTTER_VERSION);

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a texture path (and clutter)");
  add_model_flags(sim_cmd, sim.model, true);
  sim_cmd->add_option("--duration", sim.duration, "simulated time span")->capture_default_str();
  sim_cmd->add_option("--dt", sim.dt, "output grid spacing")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed (CLUTTER_SEED overrides)")->capture_default_str();
  sim_cmd->add_option("--mode", sim.mode, "finite_exact, infinite_approx or discrete_windowed")
      ->check(CLI::IsMember({"finite_exact", "infinite_approx", "discrete_windowed"}));
  sim_cmd->add_option("--out", sim.out, "output directory")->capture_default_str();
  sim_cmd->add_flag("--events", sim.events, "also write the change-point list");
  sim_cmd->add_option("--speckle", sim.speckle, "none, white, ar1 or custom")
      ->check(CLI::IsMember({"none", "white", "ar1", "custom"}))
      ->capture_default_str();
  sim_cmd->add_option("--sigma2", sim.sigma2, "speckle power")->capture_default_str();
  sim_cmd->add_option("--rho", sim.rho, "AR1 lag-1 correlation")->capture_default_str();
  sim_cmd->add_option("--acf-file", sim.acf_file, "speckle correlation per lag, one per line");
  sim_cmd->add_option("--replications", sim.replications, "independent replications")
      ->capture_default_str();
  sim_cmd->add_option("--jobs", sim.jobs, "worker threads for replications")
      ->capture_default_str();

  ValidateFlags val;
  auto* val_cmd = app.add_subcommand("validate", "Compare simulations with analytic results");
  add_model_flags(val_cmd, val.model, false);
  val_cmd->add_option("--suite", val.suite, "marginal, covariance, moments, gaussian-limit or all")
      ->check(CLI::IsMember({"marginal", "covariance", "moments", "gaussian-limit", "all"}))
      ->capture_default_str();
  val_cmd->add_option("--duration", val.duration, "simulated span (default 25000 T)");
  val_cmd->add_option("--dt", val.dt, "grid spacing (default T/16)");
  val_cmd->add_option("--seed", val.seed, "RNG seed (CLUTTER_SEED overrides)")->capture_default_str();
  val_cmd->add_option("--z-max", val.z_max, "range of the Gaussian-limit check")
      ->capture_default_str();

  LawtableFlags law;
  auto* law_cmd = app.add_subcommand("lawtable", "Write an analytic law as CSV");
  law_cmd->add_option("--law", law.law, "k-texture, gamma, polya-aeppli or negbin")
      ->required()
      ->check(CLI::IsMember({"k-texture", "gamma", "polya-aeppli", "negbin"}));
  law_cmd->add_option("--nu", law.nu, "shape nu")->required();
  law_cmd->add_option("--p", law.p, "Polya-Aeppli geometric parameter");
  law_cmd->add_option("--nbar", law.nbar, "negative binomial mean");
  law_cmd->add_option("--points", law.points, "abscissae for continuous laws")
      ->capture_default_str();
  law_cmd->add_option("--xmax", law.x_max, "upper abscissa (default: tail bound)");
  law_cmd->add_option("--out", law.out, "output file, - for stdout")->capture_default_str();

  auto usage = [&]() -> std::string {
    for (auto* sub : {sim_cmd, val_cmd, law_cmd}) {
      if (sub->parsed()) return sub->help();
    }
    return app.help();
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return kBadFlags;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sim, out, err);
    if (val_cmd->parsed()) return cmd_validate(val, out, err);
    return cmd_lawtable(law, out, err);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return kBadFlags;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kBadModel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kGuard;
  }
}

}  // namespace clutter::cli
