#pragma once

#include <Eigen/Core>

namespace subtv {

/// Coefficient vector of a continuous piecewise linear function, one value per
/// mesh node. Functions in V_h (zero trace) carry zeros on boundary nodes.
using NodalField = Eigen::VectorXd;

/// One d-vector per element, stored row-wise. For 1D meshes the second
/// component is kept at zero so element-wise Euclidean norms read the same in
/// both dimensions.
using ElementVectorField = Eigen::Matrix<double, Eigen::Dynamic, 2>;

}  // namespace subtv
