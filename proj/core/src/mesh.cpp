#include "subtv/mesh.hpp"

#include <ostream>
#include <stdexcept>

namespace subtv {

namespace {

void finalize_boundary(Mesh& mesh, const std::vector<bool>& on_boundary) {
  const Index n = mesh.node_count();
  mesh.interior_index.assign(static_cast<std::size_t>(n), -1);
  Index slot = 0;
  for (Index i = 0; i < n; ++i) {
    if (on_boundary[static_cast<std::size_t>(i)]) {
      mesh.boundary_nodes.push_back(i);
    } else {
      mesh.interior_nodes.push_back(i);
      mesh.interior_index[static_cast<std::size_t>(i)] = slot++;
    }
  }
}

}  // namespace

Mesh build_interval_mesh(int n) {
  if (n < 2) {
    throw std::invalid_argument("build_interval_mesh: need n >= 2");
  }
  Mesh mesh;
  mesh.dim = 1;
  const double h = 1.0 / n;
  mesh.nodes.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    mesh.nodes.push_back({i * h, 0.0});
  }
  mesh.element_nodes.reserve(2 * static_cast<std::size_t>(n));
  mesh.element_measure.assign(static_cast<std::size_t>(n), h);
  for (int e = 0; e < n; ++e) {
    mesh.element_nodes.push_back(e);
    mesh.element_nodes.push_back(e + 1);
  }
  std::vector<bool> on_boundary(mesh.nodes.size(), false);
  on_boundary.front() = true;
  on_boundary.back() = true;
  finalize_boundary(mesh, on_boundary);
  return mesh;
}

Mesh build_unit_square_mesh(int n) {
  if (n < 2) {
    throw std::invalid_argument("build_unit_square_mesh: need n >= 2");
  }
  Mesh mesh;
  mesh.dim = 2;
  const double h = 1.0 / n;
  const int stride = n + 1;
  mesh.nodes.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.nodes.push_back({i * h, j * h});
    }
  }
  const auto node_id = [stride](int i, int j) { return static_cast<Index>(j * stride + i); };

  mesh.element_nodes.reserve(6 * static_cast<std::size_t>(n) * n);
  mesh.element_measure.assign(2 * static_cast<std::size_t>(n) * n, 0.5 * h * h);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Index v00 = node_id(i, j);
      const Index v10 = node_id(i + 1, j);
      const Index v01 = node_id(i, j + 1);
      const Index v11 = node_id(i + 1, j + 1);
      // lower triangle, then upper, both sharing the v00-v11 diagonal
      mesh.element_nodes.insert(mesh.element_nodes.end(), {v00, v10, v11});
      mesh.element_nodes.insert(mesh.element_nodes.end(), {v00, v11, v01});
    }
  }

  std::vector<bool> on_boundary(mesh.nodes.size(), false);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      if (i == 0 || i == n || j == 0 || j == n) {
        on_boundary[static_cast<std::size_t>(node_id(i, j))] = true;
      }
    }
  }
  finalize_boundary(mesh, on_boundary);
  return mesh;
}

void dump_mesh(const Mesh& mesh, std::ostream& out) {
  for (const auto& p : mesh.nodes) {
    out << p[0];
    if (mesh.dim == 2) {
      out << ' ' << p[1];
    }
    out << '\n';
  }
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element(e);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      out << (k ? " " : "") << nodes[k];
    }
    out << '\n';
  }
}

}  // namespace subtv
