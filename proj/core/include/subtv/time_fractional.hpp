#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "subtv/assembly.hpp"
#include "subtv/l1_scheme.hpp"
#include "subtv/mesh.hpp"
#include "subtv/solver.hpp"

namespace subtv {

/// Nodal states at every time level 0..K. Trajectories of the direct problem
/// start from the zero field; the time-reversed adjoint trajectory starts from
/// its reconstructed initial slice instead.
struct Trajectory {
  std::vector<NodalField> states;

  int levels() const { return static_cast<int>(states.size()); }
};

std::vector<double> sample_time_function(const TimeGrid& grid,
                                         const std::function<double(double)>& fn);

/// Fully discrete source-to-state map of the subdiffusion problem
///   d_t^alpha u - Laplace u = mu(t) f(x),  u(0) = 0,  u = 0 on the boundary,
/// discretized by P1 elements in space and the L1 scheme in time. Each step
/// solves (M + eta A) u^{k+1} = M sum_j (b_j - b_{j+1}) u^{k-j} + eta mu^{k+1} M f
/// on interior nodes; the operator factorization is cached across steps.
///
/// The scheme has full memory: every past state enters the history sum, so all
/// K+1 states are kept. A streaming mode would have to retain the same data
/// and is intentionally not offered.
class ForwardOperator {
 public:
  ForwardOperator(Mesh mesh, const TimeGrid& grid, double alpha, std::vector<double> mu_samples);
  ForwardOperator(Mesh mesh, const TimeGrid& grid, double alpha,
                  const std::function<double(double)>& mu);

  const Mesh& mesh() const { return mesh_; }
  const TimeGrid& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  const L1Weights& weights() const { return weights_; }
  const std::vector<double>& mu_samples() const { return mu_; }
  const SparseMatrix& mass() const { return mass_full_; }
  const SparseMatrix& stiffness() const { return stiff_full_; }
  const SparseMatrix& interior_mass() const { return mass_int_; }

  double norm(const NodalField& f) const { return mass_norm(mass_full_, f); }
  double inner(const NodalField& a, const NodalField& b) const {
    return mass_inner(mass_full_, a, b);
  }

  /// Full trajectory u^0..u^K of the direct problem for source factor f.
  Trajectory direct_solve(const NodalField& f) const;

  /// Final state u^K(f); one forward sweep without materializing the padding
  /// of intermediate levels.
  NodalField forward_final(const NodalField& f) const;

  /// Exact transpose of forward_final in the L2 (mass) inner product:
  /// <forward_final(z), r> = <z, adjoint_final(r)> for all z. Implemented by
  /// running the transposed step recurrence backward in time, matrix-free.
  NodalField adjoint_final(const NodalField& r) const;

  /// Time-reversed adjoint problem driven by a final-time residual. The
  /// governing one-sided derivative, rewritten in Caputo form, contributes a
  /// -w(0) t^{-alpha} / Gamma(1-alpha) source term; combined with eta this is
  /// the dimensionless weight (1-alpha)(k+1)^{-alpha} applied to the initial
  /// slice. The trajectory holds the reversed-time states w~^0..w~^K.
  Trajectory adjoint_pde_solve(const NodalField& residual) const;

  /// Gradient of the data misfit 1/2 ||u^K(f) - g||^2 computed through the
  /// adjoint problem: the time integral of mu(t) w(.,t) by the composite
  /// trapezoidal rule on the grid. Cross-validated against adjoint_final,
  /// which is the exact discrete transpose and the optimizer default.
  NodalField misfit_gradient_via_adjoint_pde(const NodalField& f, const NodalField& g_delta) const;

 private:
  std::vector<Eigen::VectorXd> interior_sweep(const NodalField& f) const;

  Mesh mesh_;
  TimeGrid grid_;
  double alpha_;
  L1Weights weights_;
  std::vector<double> mu_;
  SparseMatrix mass_full_;
  SparseMatrix stiff_full_;
  SparseMatrix mass_int_;
  SpdFactorization step_solver_;  // M_I + eta A_I
};

// One-shot wrappers mirroring the operator surface.
Trajectory direct_solve(const Mesh& mesh, const TimeGrid& grid, double alpha,
                        const std::function<double(double)>& mu, const NodalField& f);
NodalField forward_final(const Mesh& mesh, const TimeGrid& grid, double alpha,
                         const std::function<double(double)>& mu, const NodalField& f);
NodalField adjoint_final(const Mesh& mesh, const TimeGrid& grid, double alpha,
                         const std::function<double(double)>& mu, const NodalField& r);
Trajectory adjoint_pde_solve(const Mesh& mesh, const TimeGrid& grid, double alpha,
                             const NodalField& residual);

/// CSV dump of a trajectory, one row per time level: t, nodal values.
void write_trajectory_csv(const Trajectory& traj, const TimeGrid& grid, std::ostream& out);

}  // namespace subtv
