#include "subtv/assembly.hpp"

#include <array>
#include <cassert>
#include <stdexcept>
#include <vector>

namespace subtv {

namespace {

struct TriangleGeometry {
  // grad phi_i = (b[i], c[i]) / (2 |K|)
  std::array<double, 3> b;
  std::array<double, 3> c;
  double area;
};

TriangleGeometry triangle_geometry(const Mesh& mesh, Index e) {
  const auto nodes = mesh.element(e);
  const auto& p0 = mesh.nodes[static_cast<std::size_t>(nodes[0])];
  const auto& p1 = mesh.nodes[static_cast<std::size_t>(nodes[1])];
  const auto& p2 = mesh.nodes[static_cast<std::size_t>(nodes[2])];
  TriangleGeometry g;
  g.b = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
  g.c = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
  g.area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  assert(g.area > 0.0);
  return g;
}

void validate(const Mesh& mesh) {
  if (mesh.dim != 1 && mesh.dim != 2) {
    throw std::invalid_argument("assembly: mesh dimension must be 1 or 2");
  }
  if (mesh.element_count() == 0) {
    throw std::invalid_argument("assembly: empty mesh");
  }
}

}  // namespace

SparseMatrix assemble_mass(const Mesh& mesh) {
  validate(mesh);
  const Index n = mesh.node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
  if (mesh.dim == 1) {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const double h = mesh.element_measure[static_cast<std::size_t>(e)];
      const double diag = h / 3.0;
      const double off = h / 6.0;
      triplets.emplace_back(nodes[0], nodes[0], diag);
      triplets.emplace_back(nodes[1], nodes[1], diag);
      triplets.emplace_back(nodes[0], nodes[1], off);
      triplets.emplace_back(nodes[1], nodes[0], off);
    }
  } else {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const double area = mesh.element_measure[static_cast<std::size_t>(e)];
      const double diag = area / 6.0;
      const double off = area / 12.0;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          triplets.emplace_back(nodes[i], nodes[j], i == j ? diag : off);
        }
      }
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

SparseMatrix assemble_stiffness(const Mesh& mesh) {
  validate(mesh);
  const Index n = mesh.node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
  if (mesh.dim == 1) {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const double k = 1.0 / mesh.element_measure[static_cast<std::size_t>(e)];
      triplets.emplace_back(nodes[0], nodes[0], k);
      triplets.emplace_back(nodes[1], nodes[1], k);
      triplets.emplace_back(nodes[0], nodes[1], -k);
      triplets.emplace_back(nodes[1], nodes[0], -k);
    }
  } else {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const auto g = triangle_geometry(mesh, e);
      const double scale = 1.0 / (4.0 * g.area);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          triplets.emplace_back(nodes[i], nodes[j], scale * (g.b[i] * g.b[j] + g.c[i] * g.c[j]));
        }
      }
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

SparseMatrix restrict_to_interior(const SparseMatrix& full, const Mesh& mesh) {
  const Index m = static_cast<Index>(mesh.interior_nodes.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (int col = 0; col < full.outerSize(); ++col) {
    const Index jc = mesh.interior_index[static_cast<std::size_t>(col)];
    if (jc < 0) continue;
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const Index ir = mesh.interior_index[static_cast<std::size_t>(it.row())];
      if (ir < 0) continue;
      triplets.emplace_back(ir, jc, it.value());
    }
  }
  SparseMatrix sub(m, m);
  sub.setFromTriplets(triplets.begin(), triplets.end());
  sub.makeCompressed();
  return sub;
}

Eigen::VectorXd gather_interior(const Mesh& mesh, const NodalField& full) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.interior_nodes.size()));
  for (std::size_t k = 0; k < mesh.interior_nodes.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = full[mesh.interior_nodes[k]];
  }
  return out;
}

NodalField scatter_interior(const Mesh& mesh, const Eigen::VectorXd& interior) {
  NodalField out = NodalField::Zero(mesh.node_count());
  for (std::size_t k = 0; k < mesh.interior_nodes.size(); ++k) {
    out[mesh.interior_nodes[k]] = interior[static_cast<Eigen::Index>(k)];
  }
  return out;
}

ElementVectorField gradient(const Mesh& mesh, const NodalField& f) {
  if (f.size() != mesh.node_count()) {
    throw std::invalid_argument("gradient: field size does not match node count");
  }
  ElementVectorField out = ElementVectorField::Zero(mesh.element_count(), 2);
  if (mesh.dim == 1) {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      out(e, 0) = (f[nodes[1]] - f[nodes[0]]) / mesh.element_measure[static_cast<std::size_t>(e)];
    }
  } else {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const auto g = triangle_geometry(mesh, e);
      const double scale = 1.0 / (2.0 * g.area);
      double gx = 0.0, gy = 0.0;
      for (int i = 0; i < 3; ++i) {
        gx += f[nodes[i]] * g.b[i];
        gy += f[nodes[i]] * g.c[i];
      }
      out(e, 0) = gx * scale;
      out(e, 1) = gy * scale;
    }
  }
  return out;
}

NodalField gradient_adjoint(const Mesh& mesh, const ElementVectorField& rho) {
  if (rho.rows() != mesh.element_count()) {
    throw std::invalid_argument("gradient_adjoint: field size does not match element count");
  }
  NodalField out = NodalField::Zero(mesh.node_count());
  if (mesh.dim == 1) {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      // |K| * rho_K * grad phi_i with grad phi = -1/h, +1/h
      out[nodes[0]] -= rho(e, 0);
      out[nodes[1]] += rho(e, 0);
    }
  } else {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const auto g = triangle_geometry(mesh, e);
      // |K| / (2 |K|) = 1/2
      for (int i = 0; i < 3; ++i) {
        out[nodes[i]] += 0.5 * (rho(e, 0) * g.b[i] + rho(e, 1) * g.c[i]);
      }
    }
  }
  return out;
}

}  // namespace subtv
