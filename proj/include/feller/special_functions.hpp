#pragma once

#include <cstdint>

namespace feller {

/// Exponentially scaled modified Bessel function of the first kind, order 1:
/// exp(-z) * I1(z). Finite for every z >= 0 (no overflow at z ~ 1e8).
/// Power series below `kBesselSeriesCutoff`, Hankel asymptotic expansion above.
double bessel_i1_scaled(double z);

inline constexpr double kBesselSeriesCutoff = 30.0;

/// log(n!) for n >= 0. Table for small n, Stirling series beyond.
double log_factorial(std::uint64_t n);

/// Standard normal quantile Phi^{-1}(p), 0 < p < 1.
double normal_quantile(double p);

}  // namespace feller
