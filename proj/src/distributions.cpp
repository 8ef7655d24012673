#include "feller/distributions.hpp"

#include <cmath>

#include "feller/params.hpp"
#include "feller/special_functions.hpp"

namespace feller {
namespace {

std::uint64_t poisson_inversion(RandomStream& rng, double mean) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    // Rounding can leave cdf a hair below 1; beyond this the tail mass is < 1e-16.
    if (k > 100) break;
  }
  return k;
}

// W. Hormann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
std::uint64_t poisson_ptrs(RandomStream& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_pos();
    const double us = 0.5 - std::abs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    const auto k = static_cast<std::uint64_t>(kd);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + kd * std::log(mean) - log_factorial(k))
      return k;
  }
}

// G. Marsaglia and W. W. Tsang, ACM TOMS 26(3), 2000.
double gamma_marsaglia_tsang(RandomStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

std::uint64_t sample_poisson(RandomStream& rng, double mean) {
  detail::require(std::isfinite(mean) && mean >= 0.0, "sample_poisson: mean must be finite and >= 0");
  detail::require(mean <= kMaxPoissonMean, "sample_poisson: mean exceeds supported range");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(rng, mean);
  return poisson_ptrs(rng, mean);
}

double sample_gamma(RandomStream& rng, double shape) {
  detail::require(std::isfinite(shape) && shape >= 1.0, "sample_gamma: shape must be >= 1");
  if (shape < 16.0 && shape == std::floor(shape)) {
    // Product of uniforms stays far above underflow for fewer than 16 factors.
    double product = 1.0;
    for (int i = 0; i < static_cast<int>(shape); ++i) product *= rng.uniform_pos();
    return -std::log(product);
  }
  return gamma_marsaglia_tsang(rng, shape);
}

double sample_chi_squared_even(RandomStream& rng, std::uint64_t half_df) {
  detail::require(half_df >= 1, "sample_chi_squared_even: half_df must be >= 1");
  return 2.0 * sample_gamma(rng, static_cast<double>(half_df));
}

}  // namespace feller
