#include "subtv/l1_scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace subtv {

TimeGrid::TimeGrid(double final_time, int step_count) {
  if (final_time <= 0.0 || step_count < 1) {
    throw std::invalid_argument("TimeGrid: need T > 0 and at least one step");
  }
  T = final_time;
  steps = step_count;
  tau = final_time / step_count;
}

L1Weights l1_weights(double alpha, int steps, double tau) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("l1_weights: alpha must lie in (0,1)");
  }
  if (tau <= 0.0) {
    throw std::invalid_argument("l1_weights: tau must be positive");
  }
  if (steps < 1) {
    throw std::invalid_argument("l1_weights: need at least one step");
  }
  L1Weights w;
  w.alpha = alpha;
  w.eta = std::tgamma(2.0 - alpha) * std::pow(tau, alpha);
  const double p = 1.0 - alpha;
  w.b.resize(static_cast<std::size_t>(steps) + 1);
  w.b[0] = 1.0;
  for (int j = 1; j <= steps; ++j) {
    // j^p * ((1 + 1/j)^p - 1), cancellation-free for large j
    w.b[static_cast<std::size_t>(j)] = std::pow(j, p) * std::expm1(p * std::log1p(1.0 / j));
  }
  w.zeta.resize(static_cast<std::size_t>(steps) + 1);
  w.zeta[0] = 1.0;
  for (int j = 1; j < steps; ++j) {
    w.zeta[static_cast<std::size_t>(j)] =
        w.b[static_cast<std::size_t>(j)] - w.b[static_cast<std::size_t>(j) - 1];
  }
  w.zeta[static_cast<std::size_t>(steps)] = -w.b[static_cast<std::size_t>(steps) - 1];
  return w;
}

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace subtv
