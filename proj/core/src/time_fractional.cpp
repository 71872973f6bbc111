#include "subtv/time_fractional.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace subtv {

std::vector<double> sample_time_function(const TimeGrid& grid,
                                         const std::function<double(double)>& fn) {
  std::vector<double> samples(static_cast<std::size_t>(grid.steps) + 1);
  for (int k = 0; k <= grid.steps; ++k) {
    samples[static_cast<std::size_t>(k)] = fn(grid.time(k));
  }
  return samples;
}

namespace {

SparseMatrix step_operator(const SparseMatrix& mass_int, const SparseMatrix& stiff_int,
                           double eta) {
  SparseMatrix op = mass_int + eta * stiff_int;
  op.makeCompressed();
  return op;
}

}  // namespace

ForwardOperator::ForwardOperator(Mesh mesh, const TimeGrid& grid, double alpha,
                                 std::vector<double> mu_samples)
    : mesh_(std::move(mesh)),
      grid_(grid),
      alpha_(alpha),
      weights_(l1_weights(alpha, grid.steps, grid.tau)),
      mu_(std::move(mu_samples)),
      mass_full_(assemble_mass(mesh_)),
      stiff_full_(assemble_stiffness(mesh_)),
      mass_int_(restrict_to_interior(mass_full_, mesh_)),
      step_solver_(step_operator(mass_int_, restrict_to_interior(stiff_full_, mesh_),
                                 weights_.eta)) {
  if (static_cast<int>(mu_.size()) != grid_.steps + 1) {
    throw std::invalid_argument("ForwardOperator: need one mu sample per time level");
  }
}

ForwardOperator::ForwardOperator(Mesh mesh, const TimeGrid& grid, double alpha,
                                 const std::function<double(double)>& mu)
    : ForwardOperator(std::move(mesh), grid, alpha, sample_time_function(grid, mu)) {}

std::vector<Eigen::VectorXd> ForwardOperator::interior_sweep(const NodalField& f) const {
  if (f.size() != mesh_.node_count()) {
    throw std::invalid_argument("direct_solve: source field size does not match node count");
  }
  const int K = grid_.steps;
  const auto& b = weights_.b;
  const Eigen::Index ni = static_cast<Eigen::Index>(mesh_.interior_nodes.size());

  const Eigen::VectorXd source = gather_interior(mesh_, mass_full_ * f);

  std::vector<Eigen::VectorXd> u(static_cast<std::size_t>(K) + 1);
  u[0] = Eigen::VectorXd::Zero(ni);
  Eigen::VectorXd history(ni);
  for (int k = 0; k < K; ++k) {
    history.setZero();
    for (int j = 0; j < k; ++j) {
      const double c = b[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j) + 1];
      history += c * u[static_cast<std::size_t>(k - j)];
    }
    Eigen::VectorXd rhs = mass_int_ * history;
    rhs += (weights_.eta * mu_[static_cast<std::size_t>(k) + 1]) * source;
    u[static_cast<std::size_t>(k) + 1] = step_solver_.solve(rhs);
  }
  return u;
}

Trajectory ForwardOperator::direct_solve(const NodalField& f) const {
  const auto interior = interior_sweep(f);
  Trajectory traj;
  traj.states.reserve(interior.size());
  for (const auto& state : interior) {
    traj.states.push_back(scatter_interior(mesh_, state));
  }
  return traj;
}

NodalField ForwardOperator::forward_final(const NodalField& f) const {
  const auto interior = interior_sweep(f);
  return scatter_interior(mesh_, interior.back());
}

NodalField ForwardOperator::adjoint_final(const NodalField& r) const {
  if (r.size() != mesh_.node_count()) {
    throw std::invalid_argument("adjoint_final: residual size does not match node count");
  }
  const int K = grid_.steps;
  const auto& b = weights_.b;
  const Eigen::Index ni = static_cast<Eigen::Index>(mesh_.interior_nodes.size());

  std::vector<Eigen::VectorXd> q(static_cast<std::size_t>(K) + 1);
  q[static_cast<std::size_t>(K)] = step_solver_.solve(gather_interior(mesh_, mass_full_ * r));

  Eigen::VectorXd future(ni);
  for (int m = K - 1; m >= 1; --m) {
    future.setZero();
    for (int i = 0; i <= K - 1 - m; ++i) {
      const double c = b[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i) + 1];
      future += c * q[static_cast<std::size_t>(m + 1 + i)];
    }
    q[static_cast<std::size_t>(m)] = step_solver_.solve(mass_int_ * future);
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(ni);
  for (int k = 1; k <= K; ++k) {
    acc += mu_[static_cast<std::size_t>(k)] * q[static_cast<std::size_t>(k)];
  }
  return scatter_interior(mesh_, weights_.eta * acc);
}

Trajectory ForwardOperator::adjoint_pde_solve(const NodalField& residual) const {
  if (residual.size() != mesh_.node_count()) {
    throw std::invalid_argument("adjoint_pde_solve: residual size does not match node count");
  }
  const int K = grid_.steps;
  const double alpha = alpha_;
  const auto& b = weights_.b;
  const Eigen::Index ni = static_cast<Eigen::Index>(mesh_.interior_nodes.size());

  // Initial slice: (w~^0 + w~^1, v) = 2 Gamma(2-alpha) / tau^{1-alpha} (residual, v).
  const double init_scale = 2.0 * std::tgamma(2.0 - alpha) / std::pow(grid_.tau, 1.0 - alpha);
  const Eigen::VectorXd rhs0 = init_scale * gather_interior(mesh_, mass_full_ * residual);

  std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(K) + 1);

  // First step folded with the initial slice: ((1+alpha) M + eta A) w~^1 = alpha rhs0.
  const SparseMatrix first_op =
      (1.0 + alpha) * mass_int_ + weights_.eta * restrict_to_interior(stiff_full_, mesh_);
  SpdFactorization first_solver(first_op);
  w[1] = first_solver.solve(alpha * rhs0);
  w[0] = solve_spd(mass_int_, rhs0, 1e-12) - w[1];

  Eigen::VectorXd history(ni);
  for (int k = 1; k < K; ++k) {
    history.setZero();
    for (int j = 0; j < k; ++j) {
      const double c = b[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j) + 1];
      history += c * w[static_cast<std::size_t>(k - j)];
    }
    const double w0_coef =
        b[static_cast<std::size_t>(k)] - (1.0 - alpha) * std::pow(k + 1.0, -alpha);
    history += w0_coef * w[0];
    w[static_cast<std::size_t>(k) + 1] = step_solver_.solve(mass_int_ * history);
  }

  Trajectory traj;
  traj.states.reserve(w.size());
  for (const auto& state : w) {
    traj.states.push_back(scatter_interior(mesh_, state));
  }
  return traj;
}

NodalField ForwardOperator::misfit_gradient_via_adjoint_pde(const NodalField& f,
                                                            const NodalField& g_delta) const {
  const NodalField residual = forward_final(f) - g_delta;
  const Trajectory w = adjoint_pde_solve(residual);
  const int K = grid_.steps;

  // integral of mu(t) w(., t) dt with w(t) = w~(T - t), composite trapezoid
  NodalField acc = NodalField::Zero(mesh_.node_count());
  for (int k = 0; k <= K; ++k) {
    const double weight = (k == 0 || k == K) ? 0.5 : 1.0;
    acc += weight * mu_[static_cast<std::size_t>(k)] * w.states[static_cast<std::size_t>(K - k)];
  }
  return grid_.tau * acc;
}

Trajectory direct_solve(const Mesh& mesh, const TimeGrid& grid, double alpha,
                        const std::function<double(double)>& mu, const NodalField& f) {
  return ForwardOperator(mesh, grid, alpha, mu).direct_solve(f);
}

NodalField forward_final(const Mesh& mesh, const TimeGrid& grid, double alpha,
                         const std::function<double(double)>& mu, const NodalField& f) {
  return ForwardOperator(mesh, grid, alpha, mu).forward_final(f);
}

NodalField adjoint_final(const Mesh& mesh, const TimeGrid& grid, double alpha,
                         const std::function<double(double)>& mu, const NodalField& r) {
  return ForwardOperator(mesh, grid, alpha, mu).adjoint_final(r);
}

Trajectory adjoint_pde_solve(const Mesh& mesh, const TimeGrid& grid, double alpha,
                             const NodalField& residual) {
  const auto one = [](double) { return 1.0; };
  return ForwardOperator(mesh, grid, alpha, one).adjoint_pde_solve(residual);
}

void write_trajectory_csv(const Trajectory& traj, const TimeGrid& grid, std::ostream& out) {
  for (int k = 0; k < traj.levels(); ++k) {
    out << grid.time(k);
    const auto& state = traj.states[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      out << ',' << state[i];
    }
    out << '\n';
  }
}

}  // namespace subtv
