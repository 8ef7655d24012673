#include "feller/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "feller/quadrature.hpp"
#include "feller/special_functions.hpp"

namespace feller {
namespace {

using detail::require;

// Upper limit of the mass integral: sqrt(x / scale) = sqrt(lambda) + kTailSigmas,
// where the Chernoff tail bound is exp(-kTailSigmas^2 / 2) ~ 1e-18.
constexpr double kTailSigmas = 9.0;

double elapsed(const ProcessParams& p, double t, bool allow_zero) {
  p.validate();
  require(std::isfinite(t), "time must be finite");
  const double tau = t - p.t0;
  require(allow_zero ? tau >= 0.0 : tau > 0.0,
          allow_zero ? "time must satisfy t >= t0" : "time must satisfy t > t0");
  return tau;
}

// 2 x0 / (sigma2 tau): half the non-centrality parameter.
double half_lambda(const ProcessParams& p, double tau) { return 2.0 * p.x0 / (p.sigma2 * tau); }

}  // namespace

void ProcessParams::validate() const {
  require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma2 must be finite and > 0");
  require(std::isfinite(x0) && x0 >= 0.0, "x0 must be finite and >= 0");
  require(std::isfinite(t0), "t0 must be finite");
}

double absorption_probability(const ProcessParams& p, double t) {
  const double tau = elapsed(p, t, false);
  return std::exp(-half_lambda(p, tau));
}

double survival_probability(const ProcessParams& p, double t) {
  const double tau = elapsed(p, t, false);
  return -std::expm1(-half_lambda(p, tau));
}

std::complex<double> characteristic_function(const ProcessParams& p, double k, double t) {
  const double tau = elapsed(p, t, true);
  require(std::isfinite(k), "wavenumber must be finite");
  using namespace std::complex_literals;
  const std::complex<double> num = 1i * k * p.x0;
  const std::complex<double> den = 1.0 - 1i * (0.5 * k * p.sigma2 * tau);
  return std::exp(num / den);
}

DensityValue ncx2_zero_density(double x, double lambda) {
  require(x >= 0.0 && lambda >= 0.0, "ncx2_zero_density: x and lambda must be >= 0");
  require(std::isfinite(lambda), "ncx2_zero_density: lambda must be finite");
  if (lambda == 0.0) return {1.0, 0.0};
  DensityValue out;
  out.atom = std::exp(-0.5 * lambda);
  if (std::isinf(x)) return out;
  if (x == 0.0) {
    out.continuous = 0.25 * lambda * out.atom;
    return out;
  }
  // e^{-(x+lambda)/2} I1(sqrt(lambda x)) = e^{-(sqrt x - sqrt lambda)^2 / 2} * [e^{-z} I1(z)]
  const double z = std::sqrt(lambda * x);
  const double gap = std::sqrt(x) - std::sqrt(lambda);
  out.continuous =
      0.5 * std::sqrt(lambda / x) * std::exp(-0.5 * gap * gap) * bessel_i1_scaled(z);
  return out;
}

DensityValue ncx2_zero_density_series(double x, double lambda, int j_max) {
  require(x >= 0.0 && lambda >= 0.0, "ncx2_zero_density_series: x and lambda must be >= 0");
  require(j_max >= 1, "ncx2_zero_density_series: j_max must be >= 1");
  if (lambda == 0.0) return {1.0, 0.0};
  DensityValue out;
  out.atom = std::exp(-0.5 * lambda);
  if (x == 0.0) {
    // Only the chi-squared(2) component is nonzero at the origin, q(0; 2) = 1/2.
    out.continuous = out.atom * 0.5 * lambda * 0.5;
    return out;
  }
  const double log_half_lambda = std::log(0.5 * lambda);
  const double log_x = std::log(x);
  double sum = 0.0;
  for (int j = 1; j <= j_max; ++j) {
    // Poisson weight times q(x; 2j) = x^{j-1} e^{-x/2} / (2^j Gamma(j)).
    const double log_term = -0.5 * lambda + j * log_half_lambda - std::lgamma(j + 1.0) -
                            j * std::numbers::ln2 - std::lgamma(static_cast<double>(j)) +
                            (j - 1) * log_x - 0.5 * x;
    sum += std::exp(log_term);
  }
  out.continuous = sum;
  return out;
}

DensityValue transition_density(const ProcessParams& p, double x, double t) {
  const double tau = elapsed(p, t, false);
  require(x >= 0.0, "transition_density: x must be >= 0");
  if (p.x0 == 0.0) return {1.0, 0.0};
  const double scale = 0.25 * p.sigma2 * tau;
  const double lambda = p.x0 / scale;
  DensityValue g = ncx2_zero_density(x / scale, lambda);
  g.continuous /= scale;
  return g;
}

double transition_tail_bound(const ProcessParams& p, double x, double t) {
  const double tau = elapsed(p, t, false);
  if (p.x0 == 0.0) return 0.0;
  const double scale = 0.25 * p.sigma2 * tau;
  const double lambda = p.x0 / scale;
  const double y = x / scale;
  if (y <= lambda) return 1.0;
  // Chernoff bound from E[e^{sY}] = exp(s lambda / (1 - 2s)), optimised over s.
  const double gap = std::sqrt(y) - std::sqrt(lambda);
  return std::exp(-0.5 * gap * gap);
}

ContinuousMass transition_continuous_mass(const ProcessParams& p, double t) {
  const double tau = elapsed(p, t, false);
  ContinuousMass out;
  if (p.x0 == 0.0) return out;
  // Work in units of the chi-squared scale: y = x / scale, bulk near lambda,
  // width ~ 2 sqrt(lambda) (or ~ 2 when lambda is small).
  const double scale = 0.25 * p.sigma2 * tau;
  const double root_lambda = std::sqrt(p.x0 / scale);
  const auto at = [&](double k) {
    const double r = std::max(0.0, root_lambda + k);
    return scale * r * r;
  };
  out.upper = at(kTailSigmas);
  std::vector<double> breaks{0.0};
  for (double k : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) {
    const double b = at(k);
    if (b > breaks.back()) breaks.push_back(b);
  }
  breaks.push_back(out.upper);
  const auto density = [&](double x) { return transition_density(p, x, t).continuous; };
  out.integral = integrate_piecewise(density, breaks).value;
  out.tail_bound = transition_tail_bound(p, out.upper, t);
  return out;
}

double hitting_time_density(const ProcessParams& p, double t) {
  const double tau = elapsed(p, t, false);
  if (p.x0 == 0.0) return 0.0;
  const double a = half_lambda(p, tau);
  return a / tau * std::exp(-a);
}

double typical_hitting_time(const ProcessParams& p) {
  p.validate();
  require(p.x0 > 0.0, "typical_hitting_time: x0 must be > 0");
  return p.t0 + p.x0 / p.sigma2;
}

double brownian_fpt_density(double x0, double sigma2, double t) {
  require(x0 > 0.0 && sigma2 > 0.0, "brownian_fpt_density: x0 and sigma2 must be > 0");
  require(t > 0.0, "brownian_fpt_density: t must be > 0");
  return x0 / std::sqrt(2.0 * std::numbers::pi * sigma2 * t * t * t) *
         std::exp(-x0 * x0 / (2.0 * sigma2 * t));
}

double brownian_typical_hitting_time(double x0, double sigma2) {
  require(x0 > 0.0 && sigma2 > 0.0, "brownian_typical_hitting_time: x0 and sigma2 must be > 0");
  return x0 * x0 / (3.0 * sigma2);
}

TruncatedMean truncated_mean_hitting_time(const ProcessParams& p, double horizon) {
  const double tau = elapsed(p, horizon, false);
  if (p.x0 == 0.0) return {0.0, false};
  // With v = 2 x0 / (sigma2 s) and u = ln v:
  //   int_0^tau s f(s) ds = (2 x0 / sigma2) int_{ln v_tau}^{inf} exp(-e^u) du.
  const double scale = 2.0 * p.x0 / p.sigma2;
  const double u_lo = std::log(half_lambda(p, tau));
  constexpr double u_hi = 6.7;  // exp(-e^6.7) < 1e-350
  double elapsed_part = 0.0;
  if (u_lo < u_hi) {
    const auto integrand = [](double u) { return std::exp(-std::exp(u)); };
    std::vector<double> breaks{u_lo};
    for (double b : {-10.0, -3.0, 0.0, 2.0}) {
      if (b > breaks.back()) breaks.push_back(b);
    }
    breaks.push_back(u_hi);
    elapsed_part = scale * integrate_piecewise(integrand, breaks).value;
  }
  return {elapsed_part + p.t0 * absorption_probability(p, horizon), true};
}

double mean_position(const ProcessParams& p, double t) {
  elapsed(p, t, true);
  return p.x0;
}

double variance_position(const ProcessParams& p, double t) {
  return p.sigma2 * p.x0 * elapsed(p, t, true);
}

double ci_half_width(const ProcessParams& p, double t, std::size_t n_paths, double alpha) {
  const double tau = elapsed(p, t, false);
  require(n_paths >= 1, "ci_half_width: n_paths must be >= 1");
  require(alpha > 0.0 && alpha < 1.0, "ci_half_width: alpha must lie in (0, 1)");
  return normal_quantile(1.0 - 0.5 * alpha) *
         std::sqrt(p.sigma2 * p.x0 * tau / static_cast<double>(n_paths));
}

}  // namespace feller
