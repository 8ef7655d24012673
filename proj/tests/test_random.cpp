#include <doctest.h>

#include <algorithm>
#include <functional>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "feller/distributions.hpp"
#include "feller/random_stream.hpp"

using namespace feller;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
Moments sample_moments(std::size_t n, Draw draw) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw();
    const double d = x - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (x - mean);
  }
  return {mean, m2 / static_cast<double>(n - 1)};
}

// Pearson chi-squared of Poisson draws against the pmf, pooling tails below 5 expected.
double poisson_chi2(RandomStream& rng, double mean, std::size_t n, int& dof) {
  const int kmax = static_cast<int>(mean + 12.0 * std::sqrt(mean) + 20.0);
  std::vector<double> observed(kmax + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    observed[std::min<std::uint64_t>(sample_poisson(rng, mean), kmax)] += 1.0;
  std::vector<double> expected(kmax + 1);
  double cum = 0.0;
  for (int k = 0; k < kmax; ++k) {
    expected[k] = n * std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
    cum += expected[k];
  }
  expected[kmax] = n - cum;
  double stat = 0.0, o = 0.0, e = 0.0;
  dof = -1;
  for (int k = 0; k <= kmax; ++k) {
    o += observed[k];
    e += expected[k];
    if (e >= 5.0) {
      stat += (o - e) * (o - e) / e;
      o = e = 0.0;
      ++dof;
    }
  }
  if (e > 0.0) stat += (o - e) * (o - e) / e;
  return stat;
}

double ks_against(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / m - f, f - i / m});
  }
  return d;
}

}  // namespace

TEST_CASE("philox4x32_10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("RandomStream: deterministic, stream-separated, seed-separated") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    seen.insert(va);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 3000);
  CHECK(a.seed() == 42);
  CHECK(a.stream_index() == 7);
}

TEST_CASE("RandomStream: first words are the Philox block of (0, stream) under key seed") {
  RandomStream s(0, 0);
  CHECK(s.next_u64() == ((std::uint64_t{0xe169c58du} << 32) | 0x6627e8d5u));
  CHECK(s.next_u64() == ((std::uint64_t{0x9b00dbd8u} << 32) | 0xbc57ac4cu));
}

TEST_CASE("RandomStream: uniform ranges and moments") {
  RandomStream rng(1, 0);
  double lo = 1.0, hi = 0.0;
  const auto m = sample_moments(200000, [&] {
    const double u = rng.uniform();
    const double v = rng.uniform_pos();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    return u;
  });
  CHECK(m.mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(m.var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("RandomStream: normal and exponential moments") {
  RandomStream rng(2, 0);
  const auto n = sample_moments(400000, [&] { return rng.normal(); });
  CHECK(std::abs(n.mean) < 0.01);
  CHECK(n.var == doctest::Approx(1.0).epsilon(0.01));
  const auto e = sample_moments(400000, [&] { return rng.exponential(); });
  CHECK(e.mean == doctest::Approx(1.0).epsilon(0.01));
  CHECK(e.var == doctest::Approx(1.0).epsilon(0.02));

  std::vector<double> xs(50000);
  for (auto& x : xs) x = rng.normal();
  const double d = ks_against(xs, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  CHECK(d < 1.63 / std::sqrt(50000.0));
}

TEST_CASE("sample_poisson: moments across both branches") {
  RandomStream rng(3, 0);
  for (double mean : {0.01, 0.5, 3.0, 9.99, 10.0, 37.5, 1e4, 1e9}) {
    const std::size_t n = 200000;
    const auto m = sample_moments(n, [&] { return static_cast<double>(sample_poisson(rng, mean)); });
    CAPTURE(mean);
    CHECK(std::abs(m.mean - mean) < 5.0 * std::sqrt(mean / n));
    CHECK(m.var == doctest::Approx(mean).epsilon(5.0 * std::sqrt(2.0 / n) + 0.02));
  }
  CHECK(sample_poisson(rng, 0.0) == 0);
}

TEST_CASE("sample_poisson: chi-squared goodness of fit against the pmf") {
  RandomStream rng(4, 0);
  for (double mean : {2.0, 9.5, 10.0, 25.0, 400.0}) {
    int dof = 0;
    const double stat = poisson_chi2(rng, mean, 200000, dof);
    // 99.9% point of chi2(dof) via Wilson-Hilferty.
    const double z = 3.09;
    const double crit = dof * std::pow(1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof)), 3);
    CAPTURE(mean);
    CAPTURE(dof);
    CHECK(stat < crit);
  }
}

TEST_CASE("sample_poisson: huge means stay finite and near the mean") {
  RandomStream rng(5, 0);
  for (int i = 0; i < 100; ++i) {
    const double k = static_cast<double>(sample_poisson(rng, kMaxPoissonMean));
    CHECK(std::abs(k - kMaxPoissonMean) < 7.0 * std::sqrt(kMaxPoissonMean));
  }
  CHECK_THROWS_AS(sample_poisson(rng, 2.0 * kMaxPoissonMean), std::domain_error);
  CHECK_THROWS_AS(sample_poisson(rng, -1.0), std::domain_error);
  CHECK_THROWS_AS(sample_poisson(rng, std::nan("")), std::domain_error);
}

TEST_CASE("sample_gamma: KS against the regularised incomplete gamma function") {
  RandomStream rng(6, 0);
  for (double shape : {1.0, 2.0, 7.0, 15.0, 16.0, 1.5, 250.0, 1e6}) {
    std::vector<double> xs(40000);
    for (auto& x : xs) x = sample_gamma(rng, shape);
    const double d = ks_against(xs, [&](double x) { return boost::math::gamma_p(shape, x); });
    CAPTURE(shape);
    CHECK(d < 1.95 / std::sqrt(40000.0));
  }
  CHECK_THROWS_AS(sample_gamma(rng, 0.5), std::domain_error);
}

TEST_CASE("sample_chi_squared_even: mean 2k, variance 4k") {
  RandomStream rng(7, 0);
  for (std::uint64_t k : {1ull, 3ull, 20ull, 5000ull}) {
    const std::size_t n = 100000;
    const auto m = sample_moments(n, [&] { return sample_chi_squared_even(rng, k); });
    const double kk = static_cast<double>(k);
    CHECK(std::abs(m.mean - 2.0 * kk) < 5.0 * std::sqrt(4.0 * kk / n));
    CHECK(m.var == doctest::Approx(4.0 * kk).epsilon(0.05));
  }
  CHECK_THROWS_AS(sample_chi_squared_even(rng, 0), std::domain_error);
}
