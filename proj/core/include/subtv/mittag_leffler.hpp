#pragma once

#include <stdexcept>
#include <string>

namespace subtv {

/// Raised when a special-function or quadrature evaluation cannot reach its
/// accuracy target on the requested arguments.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z.
///
/// Requires alpha > 0 and beta > 0. Accurate to ~1e-10 relative (typically
/// much better) for alpha in (0,1] and z in [-1e6, 10], the range the
/// subdiffusion kernels exercise. Three regimes are used: the power series
/// with a cancellation guard, the algebraic expansion at large negative z,
/// and otherwise the real integral representation of the function on the cut,
/// evaluated by peak-aware tanh-sinh quadrature.
double mittag_leffler(double alpha, double beta, double z);

namespace ml_detail {

double sin_pi(double x);
double cos_pi(double x);

/// 1/Gamma(x) for any real x (entire function; zero at the poles of Gamma).
double reciprocal_gamma(double x);

/// Power series with a running cancellation estimate; returns false when the
/// achievable accuracy is worse than ~1e-13 relative.
bool series(double alpha, double beta, double z, double& out);

/// Algebraic expansion -sum_{k>=1} z^{-k}/Gamma(beta - alpha k), optimally
/// truncated; returns false when the attainable bound is worse than ~1e-13.
bool asymptotic(double alpha, double beta, double z, double& out);

/// Integral representation for 0 < alpha < 1, z < 0 (any beta; reduced
/// internally to beta <= 1 through E_{a,b+a}(z) = (E_{a,b}(z) - 1/Gamma(b))/z).
double integral(double alpha, double beta, double z);

}  // namespace ml_detail

}  // namespace subtv
