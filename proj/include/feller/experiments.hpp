#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "feller/params.hpp"
#include "feller/sampler.hpp"

namespace feller {

// ---------------------------------------------------------------------------
// Shared options and statistics

struct ExperimentOptions {
  bool simulate = true;  ///< false: fill only the analytic columns
  StepMode mode = StepMode::grid;
  unsigned workers = 0;
};

/// sqrt(p (1 - p) / n).
double binomial_std_error(double p, std::size_t n);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|; ties handled.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS statistic of `sample` against the continuous CDF `cdf`.
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Derives an independent seed for sub-experiment `index` from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// ---------------------------------------------------------------------------
// Survival / absorption tables

enum class SweepParameter { sigma2, x0 };

struct SurvivalRow {
  double parameter = 0.0;    ///< sigma2 or x0, per SurvivalReport::sweep
  double time = 0.0;
  double theoretical = 0.0;  ///< absorption_probability
  double simulated = 0.0;    ///< fraction absorbed by `time`; NaN if not simulated
  double std_error = 0.0;    ///< binomial SE at the theoretical fraction
  std::size_t n_paths = 0;
};

struct SurvivalReport {
  SweepParameter sweep = SweepParameter::sigma2;
  std::vector<SurvivalRow> rows;
};

/// Checkpoints must be grid times of every config (std::invalid_argument otherwise).
SurvivalReport run_survival_experiment(std::span<const SimConfig> cfgs,
                                       std::span<const double> checkpoints, SweepParameter sweep,
                                       const ExperimentOptions& options = {});

// ---------------------------------------------------------------------------
// Mean position (martingale) tables

struct MeanPositionRow {
  double x0 = 0.0;
  double time = 0.0;
  double mean = 0.0;  ///< ensemble average x-bar(t)
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double alpha = 0.05;
  std::size_t n_paths = 0;
  bool covers_x0 = true;
};

struct MeanPositionReport {
  std::vector<MeanPositionRow> rows;
  std::size_t outside_count() const;
};

MeanPositionReport run_mean_position_experiment(std::span<const SimConfig> cfgs,
                                                std::span<const double> checkpoints, double alpha,
                                                const ExperimentOptions& options = {});

// ---------------------------------------------------------------------------
// Histograms and hitting times

enum class HistogramNormalization { counts, density };
enum class Binning { log, linear };

/// Bins are (edges[i], edges[i+1]]. Samples outside the edges are counted in
/// `underflow` / `overflow`, not in `total`.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  std::size_t underflow = 0;
  std::size_t overflow = 0;
  std::size_t reference_count = 0;  ///< density denominator (all draws, not just binned)
  HistogramNormalization normalization = HistogramNormalization::density;

  static Histogram from_samples(std::vector<double> edges, std::span<const double> samples,
                                std::size_t reference_count,
                                HistogramNormalization normalization);

  std::size_t n_bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  /// count, or count / (reference_count * width) in density mode.
  double value(std::size_t i) const;
  std::size_t modal_bin() const;
};

struct HittingTimeOptions {
  std::size_t n_bins = 80;
  Binning binning = Binning::log;
  /// Align log bins so this time is a geometric bin centre (before grid
  /// snapping). Unset: the typical hitting time.
  std::optional<double> anchor;
  unsigned workers = 0;
};

struct HittingTimeResult {
  Histogram histogram;             ///< density normalised by n_paths
  std::vector<double> overlay;     ///< hitting_time_density at bin centres
  std::vector<double> bin_average; ///< exact bin mass / width from absorption_probability
  double typical_time = 0.0;
  std::size_t censored = 0;        ///< paths still alive at tn
  std::size_t n_paths = 0;
};

/// Bin edges for hitting times on cfg's grid: t0, then log- or linearly
/// spaced grid times up to the last grid point. Edges are snapped to grid
/// points, so each bin (a, b] holds exactly the paths with T* in (a, b];
/// snapping can merge bins, so fewer than n_bins may result.
std::vector<double> hitting_time_bin_edges(const SimConfig& cfg, std::size_t n_bins,
                                           Binning binning, std::optional<double> anchor = {});

/// Throws NumericalError if no path is absorbed by tn.
HittingTimeResult run_hitting_time_experiment(const SimConfig& cfg,
                                              const HittingTimeOptions& options = {});

// ---------------------------------------------------------------------------
// One-step density validation and exactness oracle

struct CharacteristicPoint {
  double k = 0.0;
  std::complex<double> empirical;
  std::complex<double> theoretical;
};

struct DensityValidationReport {
  ProcessParams process;
  double time = 0.0;
  std::size_t n_samples = 0;
  double atom_theoretical = 0.0;
  double atom_empirical = 0.0;
  double atom_std_error = 0.0;
  Histogram histogram;                ///< nonzero draws, density over all draws
  std::vector<double> bin_theoretical;///< bin-averaged continuous density
  double max_density_deviation = 0.0; ///< max |empirical - theoretical| over bins
  double max_density_z = 0.0;         ///< same, in Poisson SE, bins expecting >= 5 draws
  double ks_nonzero = 0.0;            ///< KS of nonzero draws vs conditional law
  double ks_critical = 0.0;           ///< 1.63 / sqrt(#nonzero), alpha ~ 0.01
  std::vector<CharacteristicPoint> characteristic;
  double max_characteristic_error = 0.0;
};

/// Draws n_samples exact transitions x0 -> x(t) from RandomStream(seed, 0)
/// and compares atom, histogram and characteristic function with theory.
DensityValidationReport run_density_validation(const ProcessParams& p, double t,
                                               std::size_t n_samples, std::size_t n_bins,
                                               std::uint64_t seed);

/// Conditional CDF of the nonzero part of the transition law at x, by quadrature.
double transition_nonzero_cdf(const ProcessParams& p, double t, double x);

struct ExactnessReport {
  ProcessParams process;
  double dt = 0.0;
  double lambda = 0.0;  ///< 4 x0 / (sigma2 dt)
  std::size_t n_samples = 0;
  std::size_t substeps = 0;
  double atom_theoretical = 0.0;
  double atom_exact = 0.0;
  double atom_euler = 0.0;
  double atom_std_error = 0.0;
  double ks_exact_vs_euler = 0.0;
};

/// One-step law of feller_step (stream 0) against the Euler-Maruyama
/// reference (stream 1) with the given number of substeps.
ExactnessReport run_exactness_check(const ProcessParams& p, double dt, std::size_t n_samples,
                                    std::size_t substeps, std::uint64_t seed);

struct ExactnessCase {
  ProcessParams process;
  double dt = 1.0;
};

/// Five one-step cases with lambda = 0.5, 5, 20, 500 and 10^4.
std::vector<ExactnessCase> standard_exactness_cases();

// ---------------------------------------------------------------------------
// Table presets 1-6

enum class TableKind { survival, mean_position };

struct TablePreset {
  int id = 1;
  TableKind kind = TableKind::survival;
  SweepParameter sweep = SweepParameter::sigma2;
  std::vector<SimConfig> cfgs;
  std::vector<double> checkpoints;
  double alpha = 0.05;
  std::string caption;
};

/// Tables 1-2: absorbed percentages (sweep sigma2, sweep x0).
/// Tables 3-4: mean positions for sigma2 = 10 and 1; tables 5-6 are the same
/// runs viewed with their 95% confidence intervals.
TablePreset table_preset(int id, std::uint64_t seed, std::size_t n_paths = 10000);

}  // namespace feller
