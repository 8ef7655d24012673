#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "feller/params.hpp"
#include "feller/random_stream.hpp"

namespace feller {

/// Sampling plan for one experiment: uniform grid t0, t0 + dt, ... with
/// n = ceil((tn - t0) / dt) + 1 points.
struct SimConfig {
  std::uint64_t seed = 0;
  std::size_t n_paths = 100;
  double tn = 20000.0;
  double dt = 1.0;
  ProcessParams process;  ///< process.t0 is the grid origin

  void validate() const;
  std::size_t grid_size() const;
  double time_at(std::size_t index) const { return process.t0 + static_cast<double>(index) * dt; }
  std::vector<double> times() const;
  /// Grid index of `t`; throws std::invalid_argument if `t` is not a grid point.
  std::size_t grid_index(double t) const;
};

/// One exact transition over `dt` from `x_prev`:
/// N ~ Poisson(2 x_prev / (sigma2 dt)); 0 if N = 0, else (sigma2 dt / 4) * chi2_{2N}.
double feller_step(RandomStream& rng, double x_prev, double sigma2, double dt);

struct SamplePath {
  std::vector<double> positions;
  std::optional<std::size_t> absorbed_at;  ///< first grid index with x = 0
};

/// Chains feller_step along the grid. Once absorbed, the remaining entries
/// are zero and no further randomness is consumed.
SamplePath generate_path(RandomStream& rng, const SimConfig& cfg);

enum class StepMode {
  grid,         ///< step every dt; absorbed_at is exact to the grid
  checkpoints,  ///< jump straight between checkpoints (exact by the Markov property);
                ///< absorbed_at is only resolved to the checkpoint where 0 is first seen
};

struct EnsembleOptions {
  bool keep_paths = true;                     ///< store every position of every path
  std::vector<std::size_t> checkpoint_indices;  ///< grid indices to record per path
  StepMode mode = StepMode::grid;
  unsigned workers = 0;  ///< 0: FELLER_THREADS, else hardware concurrency
};

/// Paths of an experiment. `positions` is empty unless full paths were kept;
/// `checkpoint_positions[p][j]` is path p at grid index checkpoint_indices[j].
struct PathEnsemble {
  std::vector<double> times;
  std::vector<std::vector<double>> positions;
  std::vector<std::optional<std::size_t>> absorbed_at;
  std::vector<std::size_t> checkpoint_indices;
  std::vector<std::vector<double>> checkpoint_positions;

  std::size_t n_paths() const { return absorbed_at.size(); }
};

/// Generates cfg.n_paths paths, path i drawn from RandomStream(cfg.seed, i).
/// The result does not depend on the worker count or scheduling.
PathEnsemble generate_ensemble(const SimConfig& cfg, const EnsembleOptions& options = {});

/// Worker count used when EnsembleOptions::workers is 0.
unsigned default_workers();

/// Full-truncation Euler-Maruyama discretisation of dx = sigma sqrt(x) dW with
/// `substeps` fine steps per grid interval, absorbing on the first x <= 0.
/// An independent, biased-but-convergent reference for the exact sampler.
SamplePath euler_maruyama_path(RandomStream& rng, const SimConfig& cfg, std::size_t substeps);

/// Position after a single Euler-Maruyama interval of length dt from x_prev.
double euler_maruyama_step(RandomStream& rng, double x_prev, double sigma2, double dt,
                           std::size_t substeps);

}  // namespace feller
