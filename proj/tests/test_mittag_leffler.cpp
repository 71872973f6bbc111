#include <gtest/gtest.h>

#include <cmath>

#include "subtv/mittag_leffler.hpp"
#include "test_support.hpp"

namespace subtv {
namespace {

TEST(MittagLeffler, ValueAtZeroIsReciprocalGamma) {
  for (double beta : {0.5, 1.0, 1.7, 3.2}) {
    EXPECT_NEAR(mittag_leffler(0.8, beta, 0.0), 1.0 / std::tgamma(beta), 1e-14);
  }
  EXPECT_DOUBLE_EQ(mittag_leffler(1.0, 1.0, 0.0), 1.0);
}

TEST(MittagLeffler, ClassicalExponential) {
  EXPECT_NEAR(mittag_leffler(1.0, 1.0, 1.0), std::exp(1.0), 1e-13);
  EXPECT_NEAR(mittag_leffler(1.0, 1.0, -3.0), std::exp(-3.0), 1e-12 * std::exp(-3.0));
}

TEST(MittagLeffler, HalfOrderErfcClosedForm) {
  // E_{1/2,1}(-x) = exp(x^2) erfc(x)
  for (double x : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 26.0}) {
    const double ref = std::exp(x * x) * std::erfc(x);
    const double got = mittag_leffler(0.5, 1.0, -x);
    EXPECT_LE(std::abs(got - ref), 1e-13 * ref) << "x = " << x;
  }
}

TEST(MittagLeffler, AgainstHighPrecisionSeries) {
  // the reference is a plain 500-term series in 100-digit arithmetic; it is
  // only consulted where its own truncation and cancellation are harmless
  for (double alpha : {0.4, 0.5, 0.7, 0.9, 0.999}) {
    for (double beta : {1.0, alpha, alpha + 1.0}) {
      for (double z : {-5.0, -3.0, -1.0, -0.2, 0.5, 2.0}) {
        const auto oracle = testing::mittag_leffler_series_oracle(alpha, beta, z);
        ASSERT_TRUE(oracle.converged) << alpha << " " << beta << " " << z;
        const double got = mittag_leffler(alpha, beta, z);
        EXPECT_LE(std::abs(got - oracle.value), 1e-12 * std::abs(oracle.value))
            << "alpha " << alpha << " beta " << beta << " z " << z;
      }
    }
  }
  // small alpha: keep |z| small so 500 terms still converge
  for (double z : {-2.0, -0.7, 1.0}) {
    const auto oracle = testing::mittag_leffler_series_oracle(0.3, 1.0, z);
    ASSERT_TRUE(oracle.converged);
    EXPECT_LE(std::abs(mittag_leffler(0.3, 1.0, z) - oracle.value), 1e-12 * std::abs(oracle.value));
  }
}

TEST(MittagLeffler, SpecificValueHalfHalf) {
  const auto oracle = testing::mittag_leffler_series_oracle(0.5, 0.5, -1.0, 200);
  // 200 terms converge comfortably at |z| = 1
  ASSERT_TRUE(oracle.converged);
  EXPECT_LE(std::abs(mittag_leffler(0.5, 0.5, -1.0) - oracle.value), 1e-12);
}

TEST(MittagLeffler, RecurrenceIdentityAcrossRegimes) {
  // E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z); the tolerance accounts for the
  // conditioning of the identity itself when the two right-hand terms cancel
  for (double alpha : {0.2, 0.3, 0.5, 0.7, 0.9, 0.999}) {
    for (double z : {-0.5, -3.0, -8.0, -12.0, -20.0, -60.0, -1e3, -1e6}) {
      for (double beta : {1.0, alpha, alpha + 1.0}) {
        const double lhs = mittag_leffler(alpha, beta, z);
        const double tail = mittag_leffler(alpha, alpha + beta, z);
        const double rg = ml_detail::reciprocal_gamma(beta);
        const double rhs = rg + z * tail;
        const double cond =
            (std::abs(rg) + std::abs(z * tail)) / std::max(1e-300, std::abs(lhs));
        const double tol = 1e-10 + 1e-14 * cond;
        EXPECT_LE(std::abs(lhs - rhs), tol * std::abs(lhs))
            << "alpha " << alpha << " beta " << beta << " z " << z;
      }
    }
  }
}

TEST(MittagLeffler, CompletelyMonotoneOnNegativeAxis) {
  for (double alpha : {0.3, 0.6, 0.9}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double t = 0.0; t <= 50.0; t += 0.25) {
      const double v = mittag_leffler(alpha, 1.0, -t);
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(MittagLeffler, DerivativeIdentity) {
  // d/dt E_{a,1}(-lambda t^a) = -lambda t^{a-1} E_{a,a}(-lambda t^a)
  for (double alpha : {0.5, 0.8}) {
    for (double lambda : {1.0, 9.8696}) {
      for (double t : {0.3, 1.0, 2.5}) {
        const double h = 1e-6;
        const auto fn = [&](double s) {
          return mittag_leffler(alpha, 1.0, -lambda * std::pow(s, alpha));
        };
        const double fd = (fn(t + h) - fn(t - h)) / (2.0 * h);
        const double formula = -lambda * std::pow(t, alpha - 1.0) *
                               mittag_leffler(alpha, alpha, -lambda * std::pow(t, alpha));
        EXPECT_LE(std::abs(fd - formula), 1e-6 * std::max(1.0, std::abs(formula)));
      }
    }
  }
}

TEST(MittagLeffler, DeepNegativeArguments) {
  // the asymptotic regime must stay consistent with the recurrence identity
  // down to the bottom of the contract range
  const double z = -1e6;
  for (double alpha : {0.3, 0.5, 0.9}) {
    const double lhs = mittag_leffler(alpha, 1.0, z);
    EXPECT_GT(lhs, 0.0);
    EXPECT_LT(lhs, 1e-3);
    // the identity itself cancels to ~1e-22 absolute here, so double
    // rounding alone limits the achievable agreement
    const double rhs = 1.0 + z * mittag_leffler(alpha, 1.0 + alpha, z);
    EXPECT_LE(std::abs(lhs - rhs) / lhs, 1e-8);
  }
}

TEST(MittagLeffler, RejectsBadArguments) {
  EXPECT_THROW(mittag_leffler(0.0, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(mittag_leffler(-0.5, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(mittag_leffler(0.5, 0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(mittag_leffler(0.5, -2.0, -1.0), std::invalid_argument);
  EXPECT_THROW(mittag_leffler(0.5, 1.0, std::nan("")), std::invalid_argument);
}

}  // namespace
}  // namespace subtv
