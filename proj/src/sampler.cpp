#include "feller/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "feller/distributions.hpp"

namespace feller {
namespace {

using detail::require;

constexpr double kGridSlack = 1e-9;
constexpr std::size_t kMaxStoredValues = std::size_t{1} << 33;
constexpr std::size_t kChunk = 16;

// Steps along the grid, filling whichever outputs are requested.
void simulate_grid(RandomStream& rng, const SimConfig& cfg, std::size_t n,
                   std::span<const std::size_t> checkpoints, std::vector<double>* path,
                   std::vector<double>& cp_values, std::optional<std::size_t>& absorbed_at) {
  const double sigma2 = cfg.process.sigma2;
  double x = cfg.process.x0;
  std::size_t next_cp = 0;
  auto record = [&](std::size_t i) {
    if (path) (*path)[i] = x;
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == i) cp_values[next_cp++] = x;
  };
  absorbed_at.reset();
  record(0);
  if (x == 0.0) {
    absorbed_at = 0;
  } else {
    for (std::size_t i = 1; i < n; ++i) {
      x = feller_step(rng, x, sigma2, cfg.dt);
      record(i);
      if (x == 0.0) {
        absorbed_at = i;
        break;
      }
    }
  }
  // Absorbed: the rest of the grid is already zero-initialised.
  while (next_cp < checkpoints.size()) cp_values[next_cp++] = 0.0;
}

void simulate_checkpoints(RandomStream& rng, const SimConfig& cfg,
                          std::span<const std::size_t> checkpoints, std::vector<double>& cp_values,
                          std::optional<std::size_t>& absorbed_at) {
  double x = cfg.process.x0;
  std::size_t prev = 0;
  absorbed_at.reset();
  if (x == 0.0) absorbed_at = 0;
  for (std::size_t j = 0; j < checkpoints.size(); ++j) {
    const std::size_t idx = checkpoints[j];
    if (x > 0.0 && idx > prev) {
      x = feller_step(rng, x, cfg.process.sigma2, static_cast<double>(idx - prev) * cfg.dt);
      if (x == 0.0) absorbed_at = idx;
    }
    prev = idx;
    cp_values[j] = x;
  }
}

}  // namespace

void SimConfig::validate() const {
  process.validate();
  require(std::isfinite(tn) && tn > process.t0, "tn must be finite and > t0");
  require(std::isfinite(dt) && dt > 0.0, "dt must be finite and > 0");
  require(n_paths >= 1, "n_paths must be >= 1");
}

std::size_t SimConfig::grid_size() const {
  validate();
  double steps = (tn - process.t0) / dt;
  const double nearest = std::round(steps);
  if (std::abs(steps - nearest) <= kGridSlack * std::max(1.0, nearest)) steps = nearest;
  require(steps < 1e12, "time grid too long");
  return static_cast<std::size_t>(std::ceil(steps)) + 1;
}

std::vector<double> SimConfig::times() const {
  std::vector<double> out(grid_size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = time_at(i);
  return out;
}

std::size_t SimConfig::grid_index(double t) const {
  const std::size_t n = grid_size();
  const double r = (t - process.t0) / dt;
  const double k = std::round(r);
  if (!std::isfinite(r) || std::abs(r - k) > kGridSlack * std::max(1.0, std::abs(r)) || k < 0.0 ||
      k >= static_cast<double>(n))
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the simulation grid");
  return static_cast<std::size_t>(k);
}

double feller_step(RandomStream& rng, double x_prev, double sigma2, double dt) {
  require(std::isfinite(x_prev) && x_prev >= 0.0, "feller_step: x_prev must be finite and >= 0");
  require(std::isfinite(sigma2) && sigma2 > 0.0, "feller_step: sigma2 must be > 0");
  require(std::isfinite(dt) && dt > 0.0, "feller_step: dt must be > 0");
  if (x_prev == 0.0) return 0.0;
  const double scale = 0.25 * sigma2 * dt;
  const std::uint64_t n = sample_poisson(rng, 0.5 * x_prev / scale);
  if (n == 0) return 0.0;
  return scale * sample_chi_squared_even(rng, n);
}

SamplePath generate_path(RandomStream& rng, const SimConfig& cfg) {
  const std::size_t n = cfg.grid_size();
  SamplePath out;
  out.positions.assign(n, 0.0);
  std::vector<double> none;
  simulate_grid(rng, cfg, n, {}, &out.positions, none, out.absorbed_at);
  return out;
}

unsigned default_workers() {
  if (const char* env = std::getenv("FELLER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

PathEnsemble generate_ensemble(const SimConfig& cfg, const EnsembleOptions& options) {
  const std::size_t n = cfg.grid_size();
  const std::size_t n_paths = cfg.n_paths;
  const auto& cps = options.checkpoint_indices;
  for (std::size_t j = 0; j < cps.size(); ++j) {
    if (cps[j] >= n) throw std::invalid_argument("checkpoint index beyond the grid");
    if (j > 0 && cps[j] < cps[j - 1])
      throw std::invalid_argument("checkpoint indices must be non-decreasing");
  }
  if (options.mode == StepMode::checkpoints && options.keep_paths)
    throw std::invalid_argument("checkpoint stepping cannot keep full paths");
  if (options.keep_paths && n > kMaxStoredValues / n_paths)
    throw std::length_error("ensemble too large to keep full paths (" + std::to_string(n_paths) +
                            " x " + std::to_string(n) + "); request checkpoints instead");

  PathEnsemble out;
  out.times = cfg.times();
  out.checkpoint_indices = cps;
  out.absorbed_at.resize(n_paths);
  out.checkpoint_positions.assign(n_paths, std::vector<double>(cps.size(), 0.0));
  if (options.keep_paths) out.positions.assign(n_paths, std::vector<double>(n, 0.0));

  auto run_path = [&](std::size_t i) {
    RandomStream rng(cfg.seed, i);
    if (options.mode == StepMode::checkpoints) {
      simulate_checkpoints(rng, cfg, cps, out.checkpoint_positions[i], out.absorbed_at[i]);
    } else {
      simulate_grid(rng, cfg, n, cps, options.keep_paths ? &out.positions[i] : nullptr,
                    out.checkpoint_positions[i], out.absorbed_at[i]);
    }
  };

  const unsigned requested = options.workers ? options.workers : default_workers();
  const auto workers = static_cast<unsigned>(
      std::min<std::size_t>(requested, (n_paths + kChunk - 1) / kChunk));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_paths; ++i) run_path(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n_paths) break;
            const std::size_t end = std::min(n_paths, begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) run_path(i);
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(n_paths);
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double euler_maruyama_step(RandomStream& rng, double x_prev, double sigma2, double dt,
                           std::size_t substeps) {
  require(std::isfinite(x_prev) && x_prev >= 0.0, "euler_maruyama_step: x_prev must be >= 0");
  require(sigma2 > 0.0 && dt > 0.0, "euler_maruyama_step: sigma2 and dt must be > 0");
  require(substeps >= 1, "euler_maruyama_step: substeps must be >= 1");
  const double noise = std::sqrt(sigma2 * dt / static_cast<double>(substeps));
  double x = x_prev;
  for (std::size_t s = 0; s < substeps && x > 0.0; ++s) {
    x += noise * std::sqrt(std::max(x, 0.0)) * rng.normal();
    if (x <= 0.0) x = 0.0;
  }
  return x;
}

SamplePath euler_maruyama_path(RandomStream& rng, const SimConfig& cfg, std::size_t substeps) {
  require(substeps >= 1, "euler_maruyama_path: substeps must be >= 1");
  const std::size_t n = cfg.grid_size();
  SamplePath out;
  out.positions.assign(n, 0.0);
  double x = cfg.process.x0;
  out.positions[0] = x;
  if (x == 0.0) {
    out.absorbed_at = 0;
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    x = euler_maruyama_step(rng, x, cfg.process.sigma2, cfg.dt, substeps);
    out.positions[i] = x;
    if (x == 0.0) {
      out.absorbed_at = i;
      break;
    }
  }
  return out;
}

}  // namespace feller
