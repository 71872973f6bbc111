#include "subtv/mittag_leffler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "subtv/quadrature.hpp"

namespace subtv {
namespace ml_detail {

double sin_pi(double x) {
  const double r = x - std::round(x);  // r in [-1/2, 1/2]
  const double s = std::sin(M_PI * r);
  const long long n = std::llround(x - r);
  return (n % 2 == 0) ? s : -s;
}

double cos_pi(double x) {
  const double r = x - std::round(x);
  const double c = std::cos(M_PI * r);
  const long long n = std::llround(x - r);
  return (n % 2 == 0) ? c : -c;
}

double reciprocal_gamma(double x) {
  if (x > 0.5) {
    if (x < 170.0) {
      return 1.0 / std::tgamma(x);
    }
    return std::exp(-std::lgamma(x));
  }
  // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
  const double s = sin_pi(x);
  if (s == 0.0) return 0.0;  // pole of Gamma
  const double y = 1.0 - x;
  if (y < 170.0) {
    return s * std::tgamma(y) / M_PI;
  }
  const double mag = std::lgamma(y) + std::log(std::abs(s) / M_PI);
  const double v = std::exp(mag);
  return s > 0.0 ? v : -v;
}

namespace {

// log |1/Gamma(x)| and sign, overflow-free; sign 0 marks a Gamma pole.
void log_reciprocal_gamma(double x, double& log_mag, int& sign) {
  if (x > 0.5) {
    log_mag = -std::lgamma(x);
    sign = 1;
    return;
  }
  const double s = sin_pi(x);
  if (s == 0.0) {
    log_mag = -std::numeric_limits<double>::infinity();
    sign = 0;
    return;
  }
  log_mag = std::lgamma(1.0 - x) + std::log(std::abs(s) / M_PI);
  sign = s > 0.0 ? 1 : -1;
}

long double reciprocal_gamma_l(double x) {
  if (x <= 0.5) {
    return static_cast<long double>(reciprocal_gamma(x));
  }
  if (x < 1755.0) {
    return 1.0L / std::tgamma(static_cast<long double>(x));
  }
  return 0.0L;
}

}  // namespace

bool series(double alpha, double beta, double z, double& out) {
  const long double zl = z;
  long double term_pow = 1.0L;  // z^k
  long double sum = reciprocal_gamma_l(beta);
  long double max_abs = std::abs(sum);
  int settled = 0;
  const int k_cap = 4000;
  int k = 1;
  for (; k <= k_cap; ++k) {
    term_pow *= zl;
    if (!std::isfinite(static_cast<double>(std::abs(term_pow)))) {
      // magnitudes beyond double range: give up and let another regime run
      if (std::abs(term_pow) > 1e4000L) return false;
    }
    const long double t = term_pow * reciprocal_gamma_l(alpha * k + beta);
    sum += t;
    max_abs = std::max(max_abs, std::abs(t));
    if (std::abs(t) <= 1e-22L * (std::abs(sum) + 1e-300L)) {
      if (++settled >= 3) break;
    } else {
      settled = 0;
    }
  }
  if (k > k_cap) return false;
  // the extended-precision accumulation is limited by the accuracy of the
  // library tgammal, which is closer to double precision than to 1 ulp
  const long double eps = 5e-17L;
  const long double err = max_abs * eps * std::sqrt(static_cast<long double>(k));
  if (!(std::abs(sum) > 0.0L) || err > 1e-13L * std::abs(sum)) {
    // fully positive series cannot cancel; accept even when huge
    if (z >= 0.0) {
      out = static_cast<double>(sum);
      return true;
    }
    return false;
  }
  out = static_cast<double>(sum);
  return true;
}

bool asymptotic(double alpha, double beta, double z, double& out) {
  if (z >= -1.0) return false;
  const double log_az = std::log(-z);
  double sum = 0.0;
  double best_env = std::numeric_limits<double>::infinity();
  double prev_env = std::numeric_limits<double>::infinity();
  int grow = 0;
  int settled = 0;
  const int k_cap = 200;
  for (int k = 1; k <= k_cap; ++k) {
    const double arg = beta - alpha * k;
    // Control flow runs on a sine-free envelope of |1/Gamma(arg)|: the exact
    // term can dip to ~0 near the poles of Gamma, which says nothing about
    // the size of the tail.
    const double log_env =
        (arg > 0.5) ? -std::lgamma(arg) : std::lgamma(1.0 - arg) - std::log(M_PI);
    const double env = std::exp(log_env - k * log_az);

    double log_mag;
    int sign;
    log_reciprocal_gamma(arg, log_mag, sign);
    if (sign != 0) {
      const double mag = std::exp(log_mag - k * log_az);
      const int zsign = (k % 2 == 0) ? 1 : -1;  // z^{-k} sign for z < 0
      sum += -sign * zsign * mag;               // leading minus of the expansion
    }

    if (env > prev_env) {
      if (++grow >= 2) break;  // divergent tail reached
    } else {
      grow = 0;
    }
    prev_env = env;
    best_env = std::min(best_env, env);
    if (env <= 1e-17 * std::abs(sum)) {
      if (++settled >= 2) break;
    } else {
      settled = 0;
    }
  }
  // truncation error is of the order of the smallest envelope reached
  if (!(std::abs(sum) > 0.0) || best_env > 1e-13 * std::abs(sum)) {
    return false;
  }
  out = sum;
  return true;
}

namespace {

// Kernel integral for 0 < alpha < 1, z < 0, beta <= 1:
//   E = (1/pi) int_0^inf e^{-u} u^{alpha-beta} (u^alpha s1 - z s2) / D(u) du,
//   D(u) = u^{2 alpha} - 2 u^alpha z cos(pi alpha) + z^2,
//   s1 = sin(pi (1-beta)), s2 = sin(pi (1-beta+alpha)).
double integral_base(double alpha, double beta, double z) {
  const double s1 = sin_pi(1.0 - beta);
  const double s2 = sin_pi(1.0 - beta + alpha);
  const double c = cos_pi(alpha);
  const double s = sin_pi(alpha);
  const auto integrand = [&](double u) {
    const double ua = std::pow(u, alpha);
    // (u^a)^2 - 2 u^a z cos + z^2 written as a cancellation-free sum of
    // squares; near the resonance u^a ~ -z cos the plain form loses the
    // digits that set the width of the peak
    const double shifted = ua - z * c;
    const double denom = shifted * shifted + (z * s) * (z * s);
    const double numer = ua * s1 - z * s2;
    return std::exp(-u) * std::pow(u, alpha - beta) * numer / denom;
  };

  std::vector<double> cut = {0.0, 1.0};
  const double upper = 60.0 + 5.0 * std::log1p(std::abs(z));
  if (c < -1e-8) {
    // near-resonant denominator: geometric shells around u* = (|z||c|)^{1/alpha}
    // keep the complex pole away from every piece relative to its length
    const double peak = std::pow(-z * -c, 1.0 / alpha);
    const double width =
        std::abs(z) * std::max(sin_pi(alpha), 1e-8) / (alpha * std::pow(peak, alpha - 1.0));
    if (peak > 0.0 && peak < upper) {
      for (const double shells : {1.0, 5.0, 25.0, 125.0, 625.0}) {
        const double lo = peak - shells * width;
        const double hi = peak + shells * width;
        if (lo > 0.0 && lo < upper) cut.push_back(lo);
        if (hi > 0.0 && hi < upper) cut.push_back(hi);
      }
      cut.push_back(peak);
    }
  }
  if (s1 > 0.0 && z * s2 > 0.0) {
    // numerator changes sign at u^alpha = z s2 / s1
    const double cross = std::pow(z * s2 / s1, 1.0 / alpha);
    if (cross > 0.0 && cross < upper) cut.push_back(cross);
  }
  cut.push_back(upper);
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cut.size(); ++i) {
    total += tanh_sinh(integrand, cut[i], cut[i + 1], 1e-14, /*max_level=*/10);
  }
  return total / M_PI;
}

}  // namespace

double integral(double alpha, double beta, double z) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(z < 0.0)) {
    throw EvaluationError("mittag_leffler: integral representation needs alpha in (0,1), z < 0");
  }
  // reduce to beta0 <= 1 where the kernel has an integrable endpoint
  int lifts = 0;
  double beta0 = beta;
  while (beta0 > 1.0) {
    beta0 -= alpha;
    ++lifts;
  }
  double value = integral_base(alpha, beta0, z);
  for (int i = 0; i < lifts; ++i) {
    value = (value - reciprocal_gamma(beta0)) / z;
    beta0 += alpha;
  }
  return value;
}

}  // namespace ml_detail

double mittag_leffler(double alpha, double beta, double z) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta) ||
      !std::isfinite(z)) {
    throw std::invalid_argument("mittag_leffler: need finite alpha > 0, beta > 0, finite z");
  }
  if (z == 0.0) {
    return ml_detail::reciprocal_gamma(beta);
  }

  double value = 0.0;
  if (ml_detail::series(alpha, beta, z, value)) {
    return value;
  }
  if (z > 0.0) {
    // non-cancelling series either converged above or exceeded double range
    return std::numeric_limits<double>::infinity();
  }
  if (ml_detail::asymptotic(alpha, beta, z, value)) {
    return value;
  }
  if (alpha < 1.0) {
    return ml_detail::integral(alpha, beta, z);
  }
  std::ostringstream msg;
  msg << "mittag_leffler: no regime reached the accuracy target for alpha=" << alpha
      << " beta=" << beta << " z=" << z;
  throw EvaluationError(msg.str());
}

}  // namespace subtv
