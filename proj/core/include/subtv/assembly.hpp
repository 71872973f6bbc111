#pragma once

#include <Eigen/SparseCore>

#include "subtv/fields.hpp"
#include "subtv/mesh.hpp"

namespace subtv {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Consistent P1 mass matrix M[i][j] = \int phi_i phi_j over all nodes.
SparseMatrix assemble_mass(const Mesh& mesh);

/// P1 stiffness matrix A[i][j] = \int grad phi_i . grad phi_j over all nodes.
/// Constants lie in the kernel: A*1 = 0.
SparseMatrix assemble_stiffness(const Mesh& mesh);

/// Submatrix on interior nodes, used to impose homogeneous Dirichlet
/// conditions without touching the symmetric full matrices.
SparseMatrix restrict_to_interior(const SparseMatrix& full, const Mesh& mesh);

Eigen::VectorXd gather_interior(const Mesh& mesh, const NodalField& full);
NodalField scatter_interior(const Mesh& mesh, const Eigen::VectorXd& interior);

/// Element-wise constant gradient of the P1 interpolant of f.
ElementVectorField gradient(const Mesh& mesh, const NodalField& f);

/// Measure-weighted transpose of gradient(): the vector q with
/// q . f = sum_K |K| (gradient(f)_K . rho_K) for every nodal field f.
NodalField gradient_adjoint(const Mesh& mesh, const ElementVectorField& rho);

inline double mass_inner(const SparseMatrix& mass, const NodalField& a, const NodalField& b) {
  return a.dot(mass * b);
}

inline double mass_norm(const SparseMatrix& mass, const NodalField& a) {
  const double q = mass_inner(mass, a, a);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

}  // namespace subtv
