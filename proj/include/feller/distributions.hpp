#pragma once

#include <cstdint>

#include "feller/random_stream.hpp"

namespace feller {

/// Largest Poisson mean accepted; keeps every draw exactly representable.
inline constexpr double kMaxPoissonMean = 1e15;

/// Exact Poisson draw. Sequential inversion for mean < 10, Hormann's
/// transformed rejection with squeeze (PTRS) otherwise.
std::uint64_t sample_poisson(RandomStream& rng, double mean);

/// Exact Gamma(shape, scale 1) draw for shape >= 1. Integer shapes below 16
/// sum exponentials; larger shapes use Marsaglia-Tsang.
double sample_gamma(RandomStream& rng, double shape);

/// Chi-squared draw with 2 * half_df degrees of freedom, i.e. 2 * Gamma(half_df).
double sample_chi_squared_even(RandomStream& rng, std::uint64_t half_df);

}  // namespace feller
