#include "feller/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "feller/params.hpp"

namespace feller {
namespace {

// exp(-z) * sum_n (z/2)^(2n+1) / (n! (n+1)!), all terms positive.
double i1_scaled_series(double z) {
  const double half = 0.5 * z;
  const double q = half * half;
  double term = half;
  double sum = term;
  for (int n = 1; n < 200; ++n) {
    term *= q / (static_cast<double>(n) * static_cast<double>(n + 1));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum * std::exp(-z);
}

// exp(-z) I1(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k / z^k with
// a_k = prod_{j<=k} (4 - (2j-1)^2) / (k! 8^k). Stop at the smallest term.
double i1_scaled_asymptotic(double z) {
  double term = 1.0;
  double sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(4.0 - odd * odd) / (8.0 * k * z);
    if (std::abs(term) >= prev) break;
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

constexpr std::size_t kFactorialTable = 64;

std::array<double, kFactorialTable> make_log_factorials() {
  std::array<double, kFactorialTable> out{};
  out[0] = 0.0;
  for (std::size_t i = 1; i < kFactorialTable; ++i)
    out[i] = out[i - 1] + std::log(static_cast<double>(i));
  return out;
}

}  // namespace

double bessel_i1_scaled(double z) {
  detail::require(z >= 0.0 && !std::isnan(z), "bessel_i1_scaled: z must be >= 0");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return 0.0;
  return z < kBesselSeriesCutoff ? i1_scaled_series(z) : i1_scaled_asymptotic(z);
}

double log_factorial(std::uint64_t n) {
  static const auto table = make_log_factorials();
  if (n < kFactorialTable) return table[n];
  // Stirling series for log Gamma(n + 1).
  const double x = static_cast<double>(n);
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
  return (x + 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

double normal_quantile(double p) {
  detail::require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

}  // namespace feller
