#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "feller/special_functions.hpp"

using namespace feller;

namespace {

// Partial sums of I1(z) = sum_n (z/2)^(2n+1) / (n! (n+1)!), straight from the definition.
double i1_partial_sum(double z, int terms) {
  long double sum = 0.0L;
  long double term = z / 2.0L;
  for (int n = 0; n < terms; ++n) {
    sum += term;
    term *= (static_cast<long double>(z) * z / 4.0L) / ((n + 1.0L) * (n + 2.0L));
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("bessel_i1_scaled: anchor values") {
  CHECK(bessel_i1_scaled(0.0) == 0.0);
  // e^-1 I1(1), 15-term partial sum of the defining series.
  CHECK(bessel_i1_scaled(1.0) == doctest::Approx(std::exp(-1.0) * i1_partial_sum(1.0, 15)).epsilon(1e-14));
  CHECK(bessel_i1_scaled(1.0) == doctest::Approx(0.207910415349708449).epsilon(1e-14));
  // Asymptotic branch; reference from high-precision evaluation.
  CHECK(bessel_i1_scaled(700.0) == doctest::Approx(0.0150705194447168469).epsilon(1e-13));
  const double leading = 1.0 / std::sqrt(2.0 * std::numbers::pi * 700.0) * (1.0 - 3.0 / 5600.0);
  CHECK(bessel_i1_scaled(700.0) == doctest::Approx(leading).epsilon(1e-5));
}

TEST_CASE("bessel_i1_scaled: agrees with std::cyl_bessel_i across both branches") {
  for (double z = 0.01; z < 700.0; z *= 1.37) {
    const double reference = std::exp(-z) * std::cyl_bessel_i(1.0, z);
    CAPTURE(z);
    CHECK(bessel_i1_scaled(z) == doctest::Approx(reference).epsilon(2e-13));
  }
  // Both sides of the series/asymptotic switch.
  for (double z : {kBesselSeriesCutoff - 1e-9, kBesselSeriesCutoff, kBesselSeriesCutoff + 1e-9}) {
    CHECK(bessel_i1_scaled(z) == doctest::Approx(std::exp(-z) * std::cyl_bessel_i(1.0, z)).epsilon(1e-14));
  }
}

TEST_CASE("bessel_i1_scaled: finite, positive, and ~ 1/sqrt(2 pi z) at huge z") {
  for (double z = 1e-6; z <= 1e8; z *= 10.0) {
    const double v = bessel_i1_scaled(z);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK(bessel_i1_scaled(1e8) == doctest::Approx(3.98942278905399121759e-5).epsilon(1e-13));
  CHECK(bessel_i1_scaled(1e-10) == doctest::Approx(0.5e-10).epsilon(1e-9));
}

TEST_CASE("bessel_i1_scaled: negative argument is a domain error") {
  CHECK_THROWS_AS(bessel_i1_scaled(-1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_i1_scaled(std::nan("")), std::domain_error);
}

TEST_CASE("log_factorial matches lgamma on both sides of the table") {
  for (std::uint64_t n : {0ull, 1ull, 2ull, 10ull, 63ull, 64ull, 65ull, 100ull, 1000ull, 123456789ull}) {
    CAPTURE(n);
    CHECK(log_factorial(n) == doctest::Approx(std::lgamma(static_cast<double>(n) + 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("normal_quantile: printed quantiles and symmetry") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK(normal_quantile(0.01) == doctest::Approx(-normal_quantile(0.99)).epsilon(1e-14));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}
