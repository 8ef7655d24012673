#pragma once

#include <stdexcept>
#include <string>

namespace feller {

/// Parameters of the driftless square-root SDE  dx = sigma * sqrt(x) dW,
/// started at x(t0) = x0 with an absorbing origin.
struct ProcessParams {
  double sigma2 = 1.0;  ///< noise variance rate
  double x0 = 1000.0;   ///< initial position; 0 means already absorbed
  double t0 = 0.0;      ///< initial time

  /// Throws std::domain_error unless sigma2 > 0, x0 >= 0 and both are finite.
  void validate() const;
};

/// A mixed law evaluated at one point: point mass at the origin plus the
/// value of the absolutely continuous part.
struct DensityValue {
  double atom = 0.0;
  double continuous = 0.0;
};

/// Raised when a computation cannot produce a meaningful number
/// (empty sample, quadrature breakdown, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace detail

}  // namespace feller
