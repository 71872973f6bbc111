#include "subtv/tv.hpp"

#include <cmath>

namespace subtv {

double tv_value(const Mesh& mesh, const NodalField& f) {
  const ElementVectorField g = gradient(mesh, f);
  double total = 0.0;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    total += mesh.element_measure[static_cast<std::size_t>(e)] * g.row(e).norm();
  }
  return total;
}

ElementVectorField project_ball(const ElementVectorField& rho) {
  ElementVectorField out = rho;
  for (Eigen::Index e = 0; e < out.rows(); ++e) {
    const double norm = out.row(e).norm();
    if (norm > 1.0) {
      out.row(e) /= norm;
    }
  }
  return out;
}

bool in_dual_ball(const ElementVectorField& rho, double slack) {
  for (Eigen::Index e = 0; e < rho.rows(); ++e) {
    if (rho.row(e).norm() > 1.0 + slack) {
      return false;
    }
  }
  return true;
}

double dual_pairing(const Mesh& mesh, const NodalField& f, const ElementVectorField& rho) {
  const ElementVectorField g = gradient(mesh, f);
  double total = 0.0;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    total += mesh.element_measure[static_cast<std::size_t>(e)] * g.row(e).dot(rho.row(e));
  }
  return total;
}

ElementVectorField canonical_dual(const Mesh& mesh, const NodalField& f) {
  ElementVectorField g = gradient(mesh, f);
  for (Eigen::Index e = 0; e < g.rows(); ++e) {
    const double norm = g.row(e).norm();
    if (norm > 0.0) {
      g.row(e) /= norm;
    } else {
      g.row(e).setZero();
    }
  }
  return g;
}

}  // namespace subtv
