#pragma once

#include <vector>

namespace subtv {

/// Uniform time grid t_k = k * tau, k = 0..steps, with tau = T / steps.
struct TimeGrid {
  double T = 1.0;
  int steps = 1;
  double tau = 1.0;

  TimeGrid() = default;
  TimeGrid(double final_time, int step_count);

  double time(int k) const { return tau * k; }
};

/// Weights of the L1 discretization of the Caputo derivative of order alpha.
///
/// b[j] = (j+1)^(1-alpha) - j^(1-alpha) for j = 0..K. The zeta coefficients of
/// the full-horizon discrete operator are zeta[0] = 1, zeta[j] = b[j] - b[j-1]
/// for j = 1..K-1, and zeta[K] = -b[K-1]. eta = Gamma(2-alpha) * tau^alpha is
/// the scale that turns each time step into a (M + eta A) solve.
struct L1Weights {
  double alpha = 0.5;
  double eta = 0.0;
  std::vector<double> b;
  std::vector<double> zeta;
};

/// Computes the L1 weights for K steps of size tau.
/// Throws std::invalid_argument for alpha outside (0,1) or tau <= 0.
L1Weights l1_weights(double alpha, int steps, double tau);

/// Compensated (Neumaier) summation; used wherever weight identities are
/// checked at the 1e-14 level, where plain accumulation noise would dominate.
double compensated_sum(const std::vector<double>& values);

}  // namespace subtv
