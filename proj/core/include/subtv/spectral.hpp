#pragma once

#include <array>
#include <functional>
#include <vector>

#include "subtv/fields.hpp"
#include "subtv/mesh.hpp"

namespace subtv {

/// Dirichlet eigenpairs of the Laplacian on the unit interval or unit square,
/// ordered by eigenvalue. Interval: lambda_j = (j pi)^2, phi_j = sqrt(2)
/// sin(j pi x). Square: lambda_{m,n} = (m^2 + n^2) pi^2 with
/// phi = 2 sin(m pi x) sin(n pi y); ties are ordered lexicographically.
struct EigenBasis {
  int dim = 1;
  std::vector<double> eigenvalues;
  std::vector<std::array<int, 2>> modes;

  int count() const { return static_cast<int>(eigenvalues.size()); }
  double eval(int idx, double x, double y = 0.0) const;
};

EigenBasis interval_basis(int mode_count);
EigenBasis square_basis(int mode_count);

/// Mode coefficients (f, phi_j) of an analytically given f by fine composite
/// Gauss quadrature (resolution scales with the requested mode count).
std::vector<double> project_function(const EigenBasis& basis,
                                     const std::function<double(double, double)>& f, int J);

/// Mode coefficients of a P1 nodal field by per-element Gauss quadrature
/// (3-point rules, exact for the P1 factor).
std::vector<double> spectral_coefficients(const Mesh& mesh, const NodalField& f,
                                          const EigenBasis& basis, int J);

/// Time factor of one eigenmode: the convolution of the subdiffusion kernel
/// (t-s)^{alpha-1} E_{alpha,alpha}(-lambda (t-s)^alpha) with mu over [0, T].
double source_time_integral(double alpha, double T, double lambda,
                            const std::function<double(double)>& mu);

/// Closed form of the above for constant mu = 1:
/// T^alpha E_{alpha,alpha+1}(-lambda T^alpha).
double source_time_integral_const(double alpha, double T, double lambda);

/// Truncated eigenfunction expansion of the final state u(., T) driven by the
/// separable source mu(t) f(x), evaluated at the nodes of `mesh`. Modes stop
/// contributing once the coefficient tail falls below the truncation floor.
NodalField spectral_final_state(const EigenBasis& basis, double alpha, double T,
                                const std::function<double(double)>& mu,
                                const std::function<double(double, double)>& f, int J,
                                const Mesh& mesh);

/// Same with constant mu (uses the closed-form time factor).
NodalField spectral_final_state(const EigenBasis& basis, double alpha, double T, double mu_const,
                                const std::function<double(double, double)>& f, int J,
                                const Mesh& mesh);

}  // namespace subtv
