#pragma once

#include <complex>

#include "feller/params.hpp"

// Closed-form quantities of Feller diffusion (dx = sigma sqrt(x) dW, absorbing
// at 0). All functions are pure and thread-safe. Time arguments are absolute;
// the elapsed time is t - p.t0.

namespace feller {

/// F(t) = exp(-2 x0 / (sigma2 (t - t0))): probability of absorption by t.
double absorption_probability(const ProcessParams& p, double t);

/// S(t) = 1 - F(t), evaluated with expm1 so tiny survival values stay exact.
double survival_probability(const ProcessParams& p, double t);

/// phi(k, t) = exp(i k x0 / (1 - i k sigma2 (t - t0) / 2)).
std::complex<double> characteristic_function(const ProcessParams& p, double k, double t);

/// Non-central chi-squared law with zero degrees of freedom, Bessel form.
/// atom = exp(-lambda/2); the continuous part at x = 0 is its limit
/// (lambda/4) exp(-lambda/2).
DensityValue ncx2_zero_density(double x, double lambda);

/// Same law as the Poisson mixture of even-df central chi-squared densities,
/// truncated at j_max components. Used to cross-check the Bessel form.
DensityValue ncx2_zero_density_series(double x, double lambda, int j_max);

/// P(x, t | x0, t0): atom at the origin plus the continuous density at x,
/// i.e. the zero-df law with lambda = 4 x0 / (sigma2 (t-t0)) rescaled by
/// c = sigma2 (t-t0) / 4, Jacobian 1/c included.
DensityValue transition_density(const ProcessParams& p, double x, double t);

/// Chernoff bound on the continuous mass of the transition law above x.
double transition_tail_bound(const ProcessParams& p, double x, double t);

/// Result of integrating the continuous transition density numerically.
struct ContinuousMass {
  double integral = 0.0;    ///< quadrature over [0, upper]
  double upper = 0.0;       ///< sqrt(upper / scale) = sqrt(lambda) + 9, scale = sigma2 tau / 4
  double tail_bound = 0.0;  ///< bound on the mass beyond `upper`
};

/// Quadrature of the continuous part over [0, upper] plus a tail bound beyond it.
ContinuousMass transition_continuous_mass(const ProcessParams& p, double t);

/// Hitting-time density f(t) = -dS/dt = 2 x0 / (sigma2 tau^2) exp(-2 x0 / (sigma2 tau)).
double hitting_time_density(const ProcessParams& p, double t);

/// Mode of hitting_time_density: t0 + x0 / sigma2.
double typical_hitting_time(const ProcessParams& p);

/// First-passage density of Brownian motion dx = sigma dW from x0 to 0.
double brownian_fpt_density(double x0, double sigma2, double t);

/// Mode of brownian_fpt_density: x0^2 / (3 sigma2).
double brownian_typical_hitting_time(double x0, double sigma2);

struct TruncatedMean {
  double value = 0.0;
  bool diverges = false;  ///< the untruncated expectation is infinite
};

/// Integral of t f(t) over (t0, T] by quadrature. For x0 > 0 the full
/// integral diverges logarithmically, which `diverges` reports.
TruncatedMean truncated_mean_hitting_time(const ProcessParams& p, double horizon);

/// E[x(t)] = x0.
double mean_position(const ProcessParams& p, double t);

/// Var[x(t)] = sigma2 x0 (t - t0).
double variance_position(const ProcessParams& p, double t);

/// Half-width of the normal-theory confidence interval for the Monte Carlo
/// mean of n_paths positions: Phi^{-1}(1 - alpha/2) sqrt(sigma2 x0 (t-t0) / n).
double ci_half_width(const ProcessParams& p, double t, std::size_t n_paths, double alpha);

}  // namespace feller
