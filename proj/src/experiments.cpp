#include "feller/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "feller/analytic.hpp"
#include "feller/quadrature.hpp"

namespace feller {
namespace {

using detail::require;

std::vector<double> sorted_unique(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> checkpoint_indices(const SimConfig& cfg, std::span<const double> times) {
  std::vector<std::size_t> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(cfg.grid_index(t));
  return out;
}

double absorbed_by(const ProcessParams& p, double t) {
  if (t == p.t0) return p.x0 == 0.0 ? 1.0 : 0.0;
  return absorption_probability(p, t);
}

}  // namespace

double binomial_std_error(double p, std::size_t n) {
  require(n >= 1, "binomial_std_error: n must be >= 1");
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: samples must be non-empty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), "ks_one_sample: sample must be non-empty");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

SurvivalReport run_survival_experiment(std::span<const SimConfig> cfgs,
                                       std::span<const double> checkpoints, SweepParameter sweep,
                                       const ExperimentOptions& options) {
  const auto times = sorted_unique(checkpoints);
  SurvivalReport report;
  report.sweep = sweep;
  for (const auto& cfg : cfgs) {
    const auto idx = checkpoint_indices(cfg, times);
    std::vector<std::size_t> absorbed(times.size(), 0);
    if (options.simulate) {
      EnsembleOptions eo;
      eo.keep_paths = false;
      eo.checkpoint_indices = idx;
      eo.mode = options.mode;
      eo.workers = options.workers;
      const auto ens = generate_ensemble(cfg, eo);
      for (const auto& a : ens.absorbed_at) {
        if (!a) continue;
        for (std::size_t j = 0; j < idx.size(); ++j) absorbed[j] += *a <= idx[j] ? 1 : 0;
      }
    }
    for (std::size_t j = 0; j < times.size(); ++j) {
      SurvivalRow row;
      row.parameter = sweep == SweepParameter::sigma2 ? cfg.process.sigma2 : cfg.process.x0;
      row.time = times[j];
      row.theoretical = absorbed_by(cfg.process, times[j]);
      row.simulated = options.simulate
                          ? static_cast<double>(absorbed[j]) / static_cast<double>(cfg.n_paths)
                          : std::numeric_limits<double>::quiet_NaN();
      row.std_error = binomial_std_error(row.theoretical, cfg.n_paths);
      row.n_paths = cfg.n_paths;
      report.rows.push_back(row);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

std::size_t MeanPositionReport::outside_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.covers_x0; }));
}

MeanPositionReport run_mean_position_experiment(std::span<const SimConfig> cfgs,
                                                std::span<const double> checkpoints, double alpha,
                                                const ExperimentOptions& options) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  const auto times = sorted_unique(checkpoints);
  MeanPositionReport report;
  for (const auto& cfg : cfgs) {
    const auto idx = checkpoint_indices(cfg, times);
    std::vector<double> means(times.size(), cfg.process.x0);
    if (options.simulate) {
      EnsembleOptions eo;
      eo.keep_paths = false;
      eo.checkpoint_indices = idx;
      eo.mode = options.mode;
      eo.workers = options.workers;
      const auto ens = generate_ensemble(cfg, eo);
      for (std::size_t j = 0; j < times.size(); ++j) {
        double sum = 0.0;
        for (const auto& row : ens.checkpoint_positions) sum += row[j];
        means[j] = sum / static_cast<double>(cfg.n_paths);
      }
    }
    for (std::size_t j = 0; j < times.size(); ++j) {
      MeanPositionRow row;
      row.x0 = cfg.process.x0;
      row.time = times[j];
      row.mean = means[j];
      row.alpha = alpha;
      row.n_paths = cfg.n_paths;
      const double hw =
          times[j] > cfg.process.t0 ? ci_half_width(cfg.process, times[j], cfg.n_paths, alpha) : 0.0;
      row.ci_lower = row.mean - hw;
      row.ci_upper = row.mean + hw;
      row.covers_x0 = row.ci_lower <= row.x0 && row.x0 <= row.ci_upper;
      report.rows.push_back(row);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

Histogram Histogram::from_samples(std::vector<double> edges, std::span<const double> samples,
                                  std::size_t reference_count,
                                  HistogramNormalization normalization) {
  require(edges.size() >= 2, "histogram needs at least one bin");
  require(std::adjacent_find(edges.begin(), edges.end(), std::greater_equal<>()) == edges.end(),
          "histogram edges must be strictly increasing");
  Histogram h;
  h.edges = std::move(edges);
  h.counts.assign(h.edges.size() - 1, 0);
  h.reference_count = reference_count;
  h.normalization = normalization;
  for (double s : samples) {
    if (s <= h.edges.front()) {
      ++h.underflow;
    } else if (s > h.edges.back()) {
      ++h.overflow;
    } else {
      const auto it = std::lower_bound(h.edges.begin(), h.edges.end(), s);
      ++h.counts[static_cast<std::size_t>(it - h.edges.begin()) - 1];
      ++h.total;
    }
  }
  return h;
}

double Histogram::value(std::size_t i) const {
  const auto c = static_cast<double>(counts.at(i));
  if (normalization == HistogramNormalization::counts) return c;
  if (reference_count == 0) return 0.0;
  return c / (static_cast<double>(reference_count) * width(i));
}

std::size_t Histogram::modal_bin() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n_bins(); ++i)
    if (value(i) > value(best)) best = i;
  return best;
}

std::vector<double> hitting_time_bin_edges(const SimConfig& cfg, std::size_t n_bins,
                                           Binning binning, std::optional<double> anchor) {
  require(n_bins >= 1, "n_bins must be >= 1");
  const std::size_t last = cfg.grid_size() - 1;
  const double span_steps = static_cast<double>(last);
  std::vector<std::size_t> marks{0, last};
  auto add_offset = [&](double steps) {
    const double m = std::round(steps);
    if (m >= 1.0 && m < span_steps) marks.push_back(static_cast<std::size_t>(m));
  };
  if (binning == Binning::linear) {
    for (std::size_t k = 1; k < n_bins; ++k)
      add_offset(span_steps * static_cast<double>(k) / static_cast<double>(n_bins));
  } else if (last > 1) {
    // Geometric edges on [1, last] in units of dt.
    const double log_ratio = std::log(span_steps) / static_cast<double>(n_bins);
    marks.push_back(1);
    double start = 0.0;  // log of the first edge
    if (anchor) {
      const double a = (*anchor - cfg.process.t0) / cfg.dt;
      require(a > 0.0, "histogram anchor must be after t0");
      // Edges a * r^(k + 1/2): the anchor sits at a geometric bin centre.
      const double base = std::log(a) + 0.5 * log_ratio;
      start = base - std::ceil(base / log_ratio) * log_ratio;
    }
    for (double e = start; e < std::log(span_steps); e += log_ratio) add_offset(std::exp(e));
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::vector<double> edges;
  edges.reserve(marks.size());
  for (auto m : marks) edges.push_back(cfg.time_at(m));
  return edges;
}

HittingTimeResult run_hitting_time_experiment(const SimConfig& cfg,
                                              const HittingTimeOptions& options) {
  cfg.validate();
  HittingTimeResult out;
  out.typical_time = typical_hitting_time(cfg.process);
  out.n_paths = cfg.n_paths;

  EnsembleOptions eo;
  eo.keep_paths = false;
  eo.workers = options.workers;
  const auto ens = generate_ensemble(cfg, eo);

  std::vector<double> hits;
  hits.reserve(cfg.n_paths);
  for (const auto& a : ens.absorbed_at) {
    if (a) hits.push_back(cfg.time_at(*a));
    else ++out.censored;
  }
  if (hits.empty()) throw NumericalError("no path was absorbed by tn; histogram is empty");

  out.histogram = Histogram::from_samples(
      hitting_time_bin_edges(cfg, options.n_bins, options.binning,
                             options.anchor.value_or(out.typical_time)),
      hits,
      cfg.n_paths, HistogramNormalization::density);
  for (std::size_t i = 0; i < out.histogram.n_bins(); ++i) {
    const double lo = out.histogram.edges[i];
    const double hi = out.histogram.edges[i + 1];
    out.overlay.push_back(hitting_time_density(cfg.process, out.histogram.center(i)));
    out.bin_average.push_back((absorbed_by(cfg.process, hi) - absorbed_by(cfg.process, lo)) /
                              (hi - lo));
  }
  return out;
}

// ---------------------------------------------------------------------------

double transition_nonzero_cdf(const ProcessParams& p, double t, double x) {
  require(x >= 0.0, "transition_nonzero_cdf: x must be >= 0");
  const double atom = absorption_probability(p, t);
  require(atom < 1.0, "transition law has no continuous part");
  const auto density = [&](double y) { return transition_density(p, y, t).continuous; };
  // Breakpoints at sqrt(y / scale) = sqrt(lambda) + k; past k = 9 the mass is below 1e-18.
  const double scale = 0.25 * p.sigma2 * (t - p.t0);
  const double root_lambda = std::sqrt(p.x0 / scale);
  std::vector<double> breaks{0.0};
  for (double k : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 9.0}) {
    const double r = std::max(0.0, root_lambda + k);
    const double b = scale * r * r;
    if (b > breaks.back() && b < x) breaks.push_back(b);
  }
  if (x > breaks.back()) breaks.push_back(std::min(x, scale * (root_lambda + 9.0) * (root_lambda + 9.0)));
  return integrate_piecewise(density, breaks).value / (1.0 - atom);
}

DensityValidationReport run_density_validation(const ProcessParams& p, double t,
                                               std::size_t n_samples, std::size_t n_bins,
                                               std::uint64_t seed) {
  p.validate();
  require(t > p.t0, "density validation needs t > t0");
  require(n_samples >= 1 && n_bins >= 1, "n_samples and n_bins must be >= 1");
  const double tau = t - p.t0;

  DensityValidationReport r;
  r.process = p;
  r.time = t;
  r.n_samples = n_samples;
  r.atom_theoretical = absorption_probability(p, t);
  r.atom_std_error = binomial_std_error(r.atom_theoretical, n_samples);

  RandomStream rng(seed, 0);
  std::vector<double> draws(n_samples);
  for (auto& x : draws) x = feller_step(rng, p.x0, p.sigma2, tau);

  std::vector<double> nonzero;
  nonzero.reserve(n_samples);
  for (double x : draws)
    if (x > 0.0) nonzero.push_back(x);
  r.atom_empirical =
      static_cast<double>(n_samples - nonzero.size()) / static_cast<double>(n_samples);

  const auto density = [&](double y) { return transition_density(p, y, t).continuous; };
  const double upper = p.x0 + 6.0 * std::sqrt(variance_position(p, t));
  std::vector<double> edges(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i)
    edges[i] = upper * static_cast<double>(i) / static_cast<double>(n_bins);
  r.histogram = Histogram::from_samples(edges, nonzero, n_samples, HistogramNormalization::density);
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double w = r.histogram.width(i);
    const double theo = integrate(density, edges[i], edges[i + 1], 1e-11, 12).value / w;
    r.bin_theoretical.push_back(theo);
    const double emp = r.histogram.value(i);
    r.max_density_deviation = std::max(r.max_density_deviation, std::abs(emp - theo));
    const double expected = theo * w * static_cast<double>(n_samples);
    if (expected >= 5.0) {
      const double z = std::abs(static_cast<double>(r.histogram.counts[i]) - expected) /
                       std::sqrt(expected);
      r.max_density_z = std::max(r.max_density_z, z);
    }
  }

  if (!nonzero.empty() && r.atom_theoretical < 1.0) {
    std::sort(nonzero.begin(), nonzero.end());
    const double mass = 1.0 - r.atom_theoretical;
    const double m = static_cast<double>(nonzero.size());
    double cumulative = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
      cumulative += integrate(density, prev, nonzero[i], 1e-11, 8).value;
      prev = nonzero[i];
      const double f = cumulative / mass;
      r.ks_nonzero = std::max({r.ks_nonzero, static_cast<double>(i + 1) / m - f,
                               f - static_cast<double>(i) / m});
    }
    r.ks_critical = 1.63 / std::sqrt(m);
  }

  for (double mult : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    CharacteristicPoint cp;
    cp.k = mult / (p.sigma2 * tau);
    std::complex<double> sum = 0.0;
    for (double x : draws) sum += std::polar(1.0, cp.k * x);
    cp.empirical = sum / static_cast<double>(n_samples);
    cp.theoretical = characteristic_function(p, cp.k, t);
    r.max_characteristic_error =
        std::max(r.max_characteristic_error, std::abs(cp.empirical - cp.theoretical));
    r.characteristic.push_back(cp);
  }
  return r;
}

ExactnessReport run_exactness_check(const ProcessParams& p, double dt, std::size_t n_samples,
                                    std::size_t substeps, std::uint64_t seed) {
  p.validate();
  require(dt > 0.0 && n_samples >= 1 && substeps >= 1, "invalid exactness-check parameters");
  ExactnessReport r;
  r.process = p;
  r.dt = dt;
  r.lambda = 4.0 * p.x0 / (p.sigma2 * dt);
  r.n_samples = n_samples;
  r.substeps = substeps;
  r.atom_theoretical = absorption_probability(p, p.t0 + dt);
  r.atom_std_error = binomial_std_error(r.atom_theoretical, n_samples);

  RandomStream exact_rng(seed, 0);
  RandomStream euler_rng(seed, 1);
  std::vector<double> exact(n_samples), euler(n_samples);
  for (auto& x : exact) x = feller_step(exact_rng, p.x0, p.sigma2, dt);
  for (auto& x : euler) x = euler_maruyama_step(euler_rng, p.x0, p.sigma2, dt, substeps);
  const auto zeros = [](const std::vector<double>& v) {
    return static_cast<double>(std::count(v.begin(), v.end(), 0.0)) /
           static_cast<double>(v.size());
  };
  r.atom_exact = zeros(exact);
  r.atom_euler = zeros(euler);
  r.ks_exact_vs_euler = ks_two_sample(std::move(exact), std::move(euler));
  return r;
}

std::vector<ExactnessCase> standard_exactness_cases() {
  return {
      {{1.0, 0.125, 0.0}, 1.0},   // lambda = 0.5
      {{1.0, 1.25, 0.0}, 1.0},    // lambda = 5
      {{1.0, 50.0, 0.0}, 10.0},   // lambda = 20
      {{1.0, 125.0, 0.0}, 1.0},   // lambda = 500
      {{1.0, 2500.0, 0.0}, 1.0},  // lambda = 10^4
  };
}

// ---------------------------------------------------------------------------

TablePreset table_preset(int id, std::uint64_t seed, std::size_t n_paths) {
  if (id < 1 || id > 6) throw std::invalid_argument("table id must be in 1..6");
  TablePreset t;
  t.id = id;
  t.checkpoints = {100.0, 1000.0, 5000.0, 10000.0, 20000.0};
  t.alpha = 0.05;
  std::vector<ProcessParams> processes;
  switch (id) {
    case 1:
      t.kind = TableKind::survival;
      t.sweep = SweepParameter::sigma2;
      for (double s2 : {0.1, 1.0, 10.0, 100.0}) processes.push_back({s2, 1000.0, 0.0});
      t.caption = "Percentage absorbed by sigma2; t0=0, dt=1, x0=1000";
      break;
    case 2:
      t.kind = TableKind::survival;
      t.sweep = SweepParameter::x0;
      for (double x0 : {10.0, 100.0, 1000.0, 10000.0}) processes.push_back({1.0, x0, 0.0});
      t.caption = "Percentage absorbed by x0; t0=0, sigma2=1, dt=1";
      break;
    case 3:
    case 5:
      t.kind = TableKind::mean_position;
      t.sweep = SweepParameter::x0;
      for (double x0 : {10.0, 100.0, 1000.0, 10000.0}) processes.push_back({10.0, x0, 0.0});
      t.caption = "Average position and 95% CI by x0; t0=0, sigma2=10, dt=1";
      break;
    default:
      t.kind = TableKind::mean_position;
      t.sweep = SweepParameter::x0;
      for (double x0 : {10.0, 100.0, 1000.0, 10000.0}) processes.push_back({1.0, x0, 0.0});
      t.caption = "Average position and 95% CI by x0; t0=0, sigma2=1, dt=1";
      break;
  }
  for (std::size_t i = 0; i < processes.size(); ++i) {
    SimConfig cfg;
    cfg.seed = derive_seed(seed, i);
    cfg.n_paths = n_paths;
    cfg.tn = 20000.0;
    cfg.dt = 1.0;
    cfg.process = processes[i];
    t.cfgs.push_back(cfg);
  }
  t.caption += " (" + std::to_string(n_paths) + " paths)";
  return t;
}

}  // namespace feller
