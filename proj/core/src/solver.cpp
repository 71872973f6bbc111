#include "subtv/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <sstream>

namespace subtv {

namespace {

Eigen::VectorXd cg_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, double tol) {
  if (tol <= 0.0) {
    throw std::invalid_argument("solve_spd: tolerance must be positive");
  }
  if (rhs.size() != matrix.rows()) {
    throw std::invalid_argument("solve_spd: rhs size does not match matrix");
  }
  if (rhs.norm() == 0.0) {
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(10 * matrix.rows());
  cg.compute(matrix);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "solve_spd: conjugate gradient stopped after " << cg.iterations()
        << " iterations with relative residual " << cg.error() << " (tol " << tol << ")";
    throw SolverError(msg.str(), cg.error(), static_cast<int>(cg.iterations()));
  }
  return x;
}

}  // namespace

NodalField solve_spd(const SparseMatrix& matrix, const NodalField& rhs, double tol,
                     const Mesh* restrict_mesh) {
  if (restrict_mesh == nullptr) {
    return cg_solve(matrix, rhs, tol);
  }
  const SparseMatrix sub = restrict_to_interior(matrix, *restrict_mesh);
  const Eigen::VectorXd sub_rhs = gather_interior(*restrict_mesh, rhs);
  return scatter_interior(*restrict_mesh, cg_solve(sub, sub_rhs, tol));
}

SpdFactorization::SpdFactorization(const SparseMatrix& matrix) : size_(matrix.rows()) {
  llt_.compute(matrix);
  if (llt_.info() != Eigen::Success) {
    throw SolverError("SpdFactorization: Cholesky factorization failed (matrix not SPD?)", 0.0, 0);
  }
}

Eigen::VectorXd SpdFactorization::solve(const Eigen::VectorXd& rhs) const {
  return llt_.solve(rhs);
}

}  // namespace subtv
