#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace feller {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Tightest relative tolerance requested from the Kronrod rule. Its error
/// estimate bottoms out a few hundred ulps above zero, and asking for less
/// makes every subdivision fail until max_depth.
inline constexpr double kMinQuadratureTol = 1e-11;

/// Adaptive 31-point Gauss-Kronrod on [a, b]; `tol` is relative to the L1
/// norm of the integrand on the interval.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double tol = kMinQuadratureTol,
                           unsigned max_depth = 15) {
  QuadratureResult out;
  if (!(b > a)) return out;
  tol = std::max(tol, kMinQuadratureTol);
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, tol, &out.error);
  return out;
}

/// Sum of adaptive integrals over consecutive breakpoints. Breakpoints let
/// the caller pin down sharp features an initial Kronrod sweep might miss.
/// `tol` is relative to the L1 norm over the whole range, so pieces carrying
/// negligible mass are not refined to full relative precision.
template <typename F>
QuadratureResult integrate_piecewise(F&& f, const std::vector<double>& breaks,
                                     double tol = kMinQuadratureTol, unsigned max_depth = 15) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  std::vector<double> l1(breaks.size(), 0.0);
  double total_l1 = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) continue;
    Rule::integrate(f, breaks[i - 1], breaks[i], 0, 0.0, nullptr, &l1[i]);
    total_l1 += l1[i];
  }
  QuadratureResult out;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double share = l1[i] > 0.0 ? total_l1 / l1[i] : 1.0;
    const double piece_tol = std::min(1e-3, std::max(tol, kMinQuadratureTol) * share);
    const auto piece = integrate(f, breaks[i - 1], breaks[i], piece_tol, max_depth);
    out.value += piece.value;
    out.error += piece.error;
  }
  return out;
}

}  // namespace feller
