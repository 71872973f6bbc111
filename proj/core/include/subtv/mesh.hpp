#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace subtv {

using Index = std::int32_t;

/// Simplicial mesh of the unit interval (dim = 1) or the unit square (dim = 2).
///
/// Meshes are uniform and structured. The interval is split into n equal
/// subintervals; the square into an n-by-n grid of cells, each cell cut into
/// two congruent right triangles along the lower-left/upper-right diagonal.
struct Mesh {
  int dim = 1;
  std::vector<std::array<double, 2>> nodes;  ///< node coordinates; [1] is 0 in 1D
  std::vector<Index> element_nodes;          ///< dim+1 node ids per element, flat
  std::vector<double> element_measure;       ///< length (1D) or area (2D)
  std::vector<Index> boundary_nodes;         ///< sorted ids of nodes on the boundary
  std::vector<Index> interior_nodes;         ///< sorted complement of boundary_nodes
  std::vector<Index> interior_index;         ///< node id -> interior slot, -1 on boundary

  int nodes_per_element() const { return dim + 1; }
  Index node_count() const { return static_cast<Index>(nodes.size()); }
  Index element_count() const { return static_cast<Index>(element_measure.size()); }

  std::span<const Index> element(Index e) const {
    const auto width = static_cast<std::size_t>(dim + 1);
    return {element_nodes.data() + static_cast<std::size_t>(e) * width, width};
  }

  bool is_boundary_node(Index i) const { return interior_index[static_cast<std::size_t>(i)] < 0; }
};

/// Uniform mesh of [0,1] with n >= 2 subintervals.
/// Throws std::invalid_argument for n < 2.
Mesh build_interval_mesh(int n);

/// Criss-cross mesh of [0,1]^2: (n+1)^2 grid nodes, 2*n^2 triangles of area
/// 1/(2n^2). Throws std::invalid_argument for n < 2.
Mesh build_unit_square_mesh(int n);

/// Plain-text listing: one node per line "x [y]", then one element per line of
/// node indices. Debugging aid only.
void dump_mesh(const Mesh& mesh, std::ostream& out);

}  // namespace subtv
