#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>

#include "subtv/assembly.hpp"

namespace subtv {

/// Raised when an iterative solve stops before reaching its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Conjugate-gradient solve of an SPD system with relative tolerance
/// ||A x - b|| <= tol ||b|| and an iteration cap of 10 * unknowns.
///
/// With a mesh argument the system is restricted to interior nodes and the
/// result zero-padded, which imposes homogeneous Dirichlet conditions without
/// breaking the symmetry of the assembled matrices.
NodalField solve_spd(const SparseMatrix& matrix, const NodalField& rhs, double tol = 1e-10,
                     const Mesh* restrict_mesh = nullptr);

/// Cached sparse Cholesky factorization for the many solves against one fixed
/// operator that time stepping performs. Solves are deterministic and
/// accurate to machine precision, well inside the 1e-10 budget of solve_spd.
class SpdFactorization {
 public:
  explicit SpdFactorization(const SparseMatrix& matrix);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::Index size() const { return size_; }

 private:
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  Eigen::Index size_;
};

}  // namespace subtv
