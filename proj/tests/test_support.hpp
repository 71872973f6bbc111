#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <random>

#include <Eigen/SparseCholesky>

#include "subtv/assembly.hpp"
#include "subtv/fields.hpp"
#include "subtv/mesh.hpp"

namespace subtv::testing {

using BigFloat = boost::multiprecision::cpp_dec_float_100;

/// Plain-series Mittag-Leffler oracle in 100-digit arithmetic. Only valid
/// where the truncated series converges and the cancellation stays far below
/// the working precision; callers must stay inside oracle_converged() bounds.
struct SeriesOracle {
  double value = 0.0;
  bool converged = false;  ///< tail below 1e-40 and peak magnitude below 1e40
};

inline SeriesOracle mittag_leffler_series_oracle(double alpha, double beta, double z,
                                                 int terms = 800) {
  SeriesOracle result;
  const BigFloat zb = z;
  BigFloat term = 1;
  BigFloat sum = 1 / boost::multiprecision::tgamma(BigFloat(beta));
  BigFloat peak = boost::multiprecision::abs(sum);
  BigFloat last = peak;
  for (int k = 1; k <= terms; ++k) {
    term *= zb;
    const BigFloat t = term / boost::multiprecision::tgamma(BigFloat(alpha) * k + BigFloat(beta));
    sum += t;
    last = boost::multiprecision::abs(t);
    if (last > peak) peak = last;
  }
  result.value = static_cast<double>(sum);
  // usable when the truncation tail is negligible and the cancellation left
  // at least ~60 of the 100 working digits
  result.converged = last < BigFloat(1e-30) * boost::multiprecision::abs(sum) &&
                     peak < BigFloat(1e40) * boost::multiprecision::abs(sum);
  return result;
}

inline NodalField random_field(std::mt19937_64& rng, Eigen::Index size, double lo = -1.0,
                               double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  NodalField f(size);
  for (Eigen::Index i = 0; i < size; ++i) f[i] = dist(rng);
  return f;
}

inline ElementVectorField random_element_field(std::mt19937_64& rng, const Mesh& mesh,
                                               double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  ElementVectorField rho = ElementVectorField::Zero(mesh.element_count(), 2);
  for (Eigen::Index e = 0; e < rho.rows(); ++e) {
    rho(e, 0) = dist(rng);
    if (mesh.dim == 2) rho(e, 1) = dist(rng);
  }
  return rho;
}

/// Smallest generalized eigenvalue of (A, M) on interior nodes by inverse
/// power iteration; the independent oracle for the Laplace eigenvalue checks.
inline double smallest_interior_eigenvalue(const Mesh& mesh, int iters = 200) {
  const SparseMatrix a = restrict_to_interior(assemble_stiffness(mesh), mesh);
  const SparseMatrix m = restrict_to_interior(assemble_mass(mesh), mesh);
  Eigen::SimplicialLLT<SparseMatrix> solver(a);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows());
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = solver.solve(m * v);
    w /= std::sqrt(w.dot(m * w));
    lambda = w.dot(a * w) / w.dot(m * w);
    v = w;
  }
  return lambda;
}

}  // namespace subtv::testing
