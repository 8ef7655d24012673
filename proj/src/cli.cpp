#include "feller/cli.hpp"

#include <chrono>
#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "feller/analytic.hpp"
#include "feller/experiments.hpp"
#include "feller/report_io.hpp"
#include "feller/sampler.hpp"

namespace feller::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Defaults: t0=0, tn=20000, dt=1, sigma2=1, x0=1000, 100 paths.
struct Settings {
  double sigma2 = 1.0;
  double x0 = 1000.0;
  double t0 = 0.0;
  double tn = 20000.0;
  double dt = 1.0;
  std::size_t paths = 100;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string format = "csv";
  bool round = false;
  unsigned threads = 0;
  std::string mode = "grid";

  // subcommand specific
  std::vector<double> checkpoints{100.0, 1000.0, 5000.0, 10000.0, 20000.0};
  std::string param = "sigma2";
  double alpha = 0.05;
  std::size_t bins = 80;
  std::string binning = "log";
  std::optional<double> anchor;
  std::optional<double> horizon;
  std::size_t samples = 100000;
  std::size_t substeps = 2000;
  bool suite = false;
  int table = 0;
  bool analytic = false;
};

SimConfig make_config(const Settings& s, std::uint64_t seed) {
  if (!(s.sigma2 > 0.0)) throw UsageError("--sigma2 must be > 0");
  if (!(s.x0 >= 0.0)) throw UsageError("--x0 must be >= 0");
  if (!(s.dt > 0.0)) throw UsageError("--dt must be > 0");
  if (!(s.tn > s.t0)) throw UsageError("--tn must be > --t0");
  if (s.paths < 1) throw UsageError("--paths must be >= 1");
  SimConfig cfg;
  cfg.seed = seed;
  cfg.n_paths = s.paths;
  cfg.tn = s.tn;
  cfg.dt = s.dt;
  cfg.process = {s.sigma2, s.x0, s.t0};
  return cfg;
}

ExperimentOptions experiment_options(const Settings& s) {
  ExperimentOptions o;
  o.simulate = !s.analytic;
  o.mode = s.mode == "checkpoints" ? StepMode::checkpoints : StepMode::grid;
  o.workers = s.threads;
  return o;
}

std::uint64_t resolve_seed(const Settings& s, std::ostream& err) {
  if (s.seed) return *s.seed;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const auto seed = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(now).count());
  err << "seed=" << seed << '\n';
  return seed;
}

void add_common_options(CLI::App& app, Settings& s) {
  app.add_option("--sigma2", s.sigma2, "Noise variance rate sigma^2")->capture_default_str();
  app.add_option("--x0", s.x0, "Initial position")->capture_default_str();
  app.add_option("--t0", s.t0, "Initial time")->capture_default_str();
  app.add_option("--tn", s.tn, "Final time")->capture_default_str();
  app.add_option("--dt", s.dt, "Time step")->capture_default_str();
  app.add_option("--paths", s.paths, "Number of sample paths")->capture_default_str();
  app.add_option("--seed", s.seed, "Master seed (printed to stderr when omitted)");
  app.add_option("-o,--out", s.out, "Output file, '-' for stdout")->capture_default_str();
  app.add_option("--format", s.format, "Output format")
      ->check(CLI::IsMember({"csv", "tsv"}))
      ->capture_default_str();
  app.add_flag("--round", s.round, "Two-decimal presentation values");
  app.add_option("--threads", s.threads, "Worker threads (0: FELLER_THREADS or all cores)");
  app.add_option("--mode", s.mode, "Stepping: every grid step, or jump between checkpoints")
      ->check(CLI::IsMember({"grid", "checkpoints"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Exact simulation and closed-form analysis of Feller diffusion"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();
  add_common_options(app, s);

  auto* paths_cmd = app.add_subcommand("paths", "Sample paths in long format (path_id, t, x)");

  auto* survival_cmd = app.add_subcommand("survival", "Absorbed percentage at checkpoints");
  survival_cmd->add_option("--checkpoints", s.checkpoints, "Checkpoint times")->delimiter(',');
  survival_cmd->add_option("--param", s.param, "Label column")
      ->check(CLI::IsMember({"sigma2", "x0"}));
  survival_cmd->add_flag("--analytic", s.analytic, "Theoretical column only");

  auto* meanpos_cmd = app.add_subcommand("meanpos", "Ensemble mean position with confidence bounds");
  meanpos_cmd->add_option("--checkpoints", s.checkpoints, "Checkpoint times")->delimiter(',');
  meanpos_cmd->add_option("--alpha", s.alpha, "1 - confidence level")->capture_default_str();
  meanpos_cmd->add_flag("--analytic", s.analytic, "Theoretical mean only");

  auto* hitting_cmd = app.add_subcommand("hitting", "Hitting-time histogram with analytic overlay");
  hitting_cmd->add_option("--bins", s.bins, "Number of bins")->capture_default_str();
  hitting_cmd->add_option("--binning", s.binning, "Bin spacing")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  hitting_cmd->add_option("--anchor", s.anchor,
                          "Centre a log bin on this time (default: typical hitting time)");

  auto* density_cmd =
      app.add_subcommand("density", "One-step law: atom, histogram and characteristic function");
  density_cmd->add_option("--t", s.horizon, "Horizon (default: --tn)");
  density_cmd->add_option("--samples", s.samples, "Number of draws")->capture_default_str();
  density_cmd->add_option("--bins", s.bins, "Number of bins");

  auto* validate_cmd =
      app.add_subcommand("validate", "Exact step vs Euler-Maruyama reference (KS, atom)");
  validate_cmd->add_option("--samples", s.samples, "Draws per side")->capture_default_str();
  validate_cmd->add_option("--substeps", s.substeps, "Euler-Maruyama substeps per step")
      ->capture_default_str();
  validate_cmd->add_flag("--suite", s.suite, "Run the five standard lambda cases");

  auto* table_cmd = app.add_subcommand("table", "Run a table preset (1-6)");
  table_cmd->add_option("id", s.table, "Table number")->required()->check(CLI::Range(1, 6));
  table_cmd->add_flag("--analytic", s.analytic, "Theoretical columns only");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::ostringstream buffer;
  try {
    CsvFormat fmt;
    fmt.delimiter = s.format == "tsv" ? '\t' : ',';
    fmt.round = s.round;
    const std::uint64_t seed = resolve_seed(s, err);
    Metadata meta{{"seed", std::to_string(seed)}};
    const auto opts = experiment_options(s);

    if (paths_cmd->parsed()) {
      const auto cfg = make_config(s, seed);
      EnsembleOptions eo;
      eo.workers = s.threads;
      write_paths_csv(buffer, generate_ensemble(cfg, eo), fmt, meta);
    } else if (survival_cmd->parsed()) {
      const auto cfg = make_config(s, seed);
      const auto sweep = s.param == "x0" ? SweepParameter::x0 : SweepParameter::sigma2;
      const auto report = run_survival_experiment(std::span(&cfg, 1), s.checkpoints, sweep, opts);
      write_survival_csv(buffer, report, fmt, meta);
    } else if (meanpos_cmd->parsed()) {
      const auto cfg = make_config(s, seed);
      if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
      const auto report =
          run_mean_position_experiment(std::span(&cfg, 1), s.checkpoints, s.alpha, opts);
      write_mean_position_csv(buffer, report, fmt, meta);
    } else if (hitting_cmd->parsed()) {
      const auto cfg = make_config(s, seed);
      if (!(s.x0 > 0.0)) throw UsageError("hitting needs --x0 > 0");
      HittingTimeOptions ho;
      ho.n_bins = s.bins;
      ho.binning = s.binning == "linear" ? Binning::linear : Binning::log;
      ho.anchor = s.anchor;
      ho.workers = s.threads;
      write_hitting_csv(buffer, run_hitting_time_experiment(cfg, ho), fmt, meta);
    } else if (density_cmd->parsed()) {
      const auto cfg = make_config(s, seed);
      const double t = s.horizon.value_or(s.tn);
      if (!(t > s.t0)) throw UsageError("--t must be > --t0");
      if (s.samples < 1 || s.bins < 1) throw UsageError("--samples and --bins must be >= 1");
      const auto report = run_density_validation(cfg.process, t, s.samples,
                                                 density_cmd->count("--bins") ? s.bins : 50, seed);
      write_density_csv(buffer, report, fmt, meta);
    } else if (validate_cmd->parsed()) {
      std::vector<ExactnessCase> cases;
      if (s.suite) {
        cases = standard_exactness_cases();
      } else {
        const auto cfg = make_config(s, seed);
        cases.push_back({cfg.process, cfg.dt});
      }
      if (s.samples < 1 || s.substeps < 1) throw UsageError("--samples and --substeps must be >= 1");
      std::vector<ExactnessReport> reports;
      for (std::size_t i = 0; i < cases.size(); ++i)
        reports.push_back(run_exactness_check(cases[i].process, cases[i].dt, s.samples,
                                              s.substeps, derive_seed(seed, i)));
      // Two-sample KS limit used by the acceptance suite at n = 1e5 per side.
      write_exactness_csv(buffer, reports, 0.015, fmt, meta);
    } else if (table_cmd->parsed()) {
      const std::size_t n_paths = app.count("--paths") ? s.paths : 10000;
      if (n_paths < 1) throw UsageError("--paths must be >= 1");
      const auto preset = table_preset(s.table, seed, n_paths);
      meta.emplace_back("table", std::to_string(preset.id));
      meta.emplace_back("caption", preset.caption);
      if (preset.kind == TableKind::survival) {
        write_survival_csv(
            buffer, run_survival_experiment(preset.cfgs, preset.checkpoints, preset.sweep, opts),
            fmt, meta);
      } else {
        write_mean_position_csv(buffer,
                                run_mean_position_experiment(preset.cfgs, preset.checkpoints,
                                                             preset.alpha, opts),
                                fmt, meta);
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }

  if (s.out.empty() || s.out == "-") {
    out << buffer.str();
    return out ? kExitOk : kExitNumerical;
  }
  std::ofstream file(s.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "error: cannot open output file '" << s.out << "'\n";
    return kExitNumerical;
  }
  file << buffer.str();
  file.close();
  if (!file) {
    err << "error: failed writing '" << s.out << "'\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace feller::cli
