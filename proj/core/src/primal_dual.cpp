#include "subtv/primal_dual.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "subtv/solver.hpp"

namespace subtv {

const char* to_string(StoppingReason reason) {
  switch (reason) {
    case StoppingReason::kDiscrepancy:
      return "discrepancy";
    case StoppingReason::kRelativeChange:
      return "relative-change";
    case StoppingReason::kIterationCap:
      return "iteration-cap";
  }
  return "unknown";
}

namespace {

// Portable uniform doubles in [0,1): 53 high bits of the engine output.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

NodalField deterministic_start(Eigen::Index size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NodalField v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v[i] = 2.0 * uniform01(rng) - 1.0;
  }
  return v;
}

}  // namespace

OperatorNorms estimate_norms(const ForwardOperator& op) {
  constexpr int kMaxIters = 30;
  constexpr double kStagnation = 1e-6;
  OperatorNorms norms;

  // forward operator norm: power iteration on F*F in the mass inner product
  {
    NodalField v = deterministic_start(op.mesh().node_count(), 0x5eed0001ULL);
    double lambda = 0.0;
    bool converged = false;
    for (int it = 0; it < kMaxIters; ++it) {
      const double vnorm = op.norm(v);
      if (vnorm == 0.0) break;
      v /= vnorm;
      const NodalField w = op.adjoint_final(op.forward_final(v));
      const double next = op.inner(v, w);
      if (next <= 0.0) {
        lambda = 0.0;
        converged = true;
        break;
      }
      if (it > 0 && std::abs(next - lambda) <= kStagnation * next) {
        lambda = next;
        converged = true;
        break;
      }
      lambda = next;
      v = w;
    }
    norms.forward_norm = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
    norms.converged = converged;
  }

  // gradient norm: power iteration on the gradient / gradient_adjoint pair,
  // i.e. the generalized eigenproblem A v = lambda M v over all nodes
  {
    const Mesh& mesh = op.mesh();
    NodalField v = deterministic_start(mesh.node_count(), 0x5eed0002ULL);
    double lambda = 0.0;
    bool converged = false;
    for (int it = 0; it < kMaxIters; ++it) {
      const double vnorm = op.norm(v);
      if (vnorm == 0.0) break;
      v /= vnorm;
      const NodalField w = gradient_adjoint(mesh, gradient(mesh, v));
      const double next = v.dot(w);
      if (it > 0 && std::abs(next - lambda) <= kStagnation * std::abs(next)) {
        lambda = next;
        converged = true;
        break;
      }
      lambda = next;
      v = solve_spd(op.mass(), w, 1e-10);
    }
    norms.gradient_norm = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
    norms.converged = norms.converged && converged;
  }
  return norms;
}

bool check_step_condition(const PDParams& params, double forward_norm, double gradient_norm) {
  const double lhs = (1.0 - 3.0 * forward_norm * forward_norm * params.sigma0) / params.sigma0;
  const double rhs = params.beta * params.beta * (params.sigma0 / params.upsilon0) *
                     gradient_norm * gradient_norm;
  return lhs > rhs;
}

PDState make_initial_state(const ForwardOperator& op, const PDParams& params,
                           const NodalField& f0, const ElementVectorField& rho0,
                           const NodalField& g_delta) {
  PDState state;
  state.f_curr = f0;
  state.f_prev = f0;  // f^{-1} := f^0
  state.rho = project_ball(rho0);
  state.sigma = params.sigma0;
  state.upsilon = params.upsilon0;
  state.theta = params.theta0;
  state.n = 0;
  state.forward_curr = op.forward_final(f0);
  state.residual = op.norm(state.forward_curr - g_delta);
  return state;
}

void pd_iterate(PDState& state, const PDParams& params, const ForwardOperator& op,
                const NodalField& g_delta) {
  const Mesh& mesh = op.mesh();

  const NodalField f_tilde = state.f_curr + state.theta * (state.f_curr - state.f_prev);

  if (params.gamma != 0.0) {
    const double dual_step = params.gamma * state.sigma / state.upsilon;
    state.rho = project_ball(state.rho + dual_step * gradient(mesh, f_tilde));
  } else {
    state.rho = project_ball(state.rho);
  }

  // linearized primal step: (1/sigma + beta) f^{n+1} =
  //   f^n / sigma - F*(F f^n - g) - gamma M^{-1} grad^T(rho^{n+1})
  const NodalField misfit_grad = op.adjoint_final(state.forward_curr - g_delta);
  NodalField rhs = state.f_curr / state.sigma - misfit_grad;
  if (params.gamma != 0.0) {
    const NodalField dual_term = solve_spd(op.mass(), gradient_adjoint(mesh, state.rho), 1e-10);
    rhs -= params.gamma * dual_term;
  }
  const NodalField f_next = rhs / (1.0 / state.sigma + params.beta);

  state.f_prev = state.f_curr;
  state.f_curr = f_next;
  state.forward_curr = op.forward_final(state.f_curr);
  state.residual = op.norm(state.forward_curr - g_delta);

  const double theta_next = 1.0 / std::sqrt(1.0 + 2.0 * params.beta * state.sigma);
  const double sigma_next = theta_next * state.sigma;
  state.upsilon = state.upsilon * theta_next * sigma_next / state.sigma;
  state.sigma = sigma_next;
  state.theta = theta_next;
  ++state.n;
}

namespace {

std::optional<double> relative_error(const ForwardOperator& op, const NodalField& f,
                                     const NodalField* truth) {
  if (truth == nullptr) return std::nullopt;
  const double denom = op.norm(*truth);
  if (denom == 0.0) return std::nullopt;
  return op.norm(f - *truth) / denom;
}

}  // namespace

InversionResult run_inversion(const ForwardOperator& op, const NodalField& g_delta,
                              const PDParams& params, const NodalField& f0,
                              const ElementVectorField& rho0, const NodalField* f_truth,
                              const OperatorNorms* norms_in) {
  InversionResult result;
  result.norms = norms_in != nullptr ? *norms_in : estimate_norms(op);
  result.step_condition_ok =
      check_step_condition(params, result.norms.forward_norm, result.norms.gradient_norm);
  if (!result.step_condition_ok && !params.force) {
    std::ostringstream msg;
    msg << "run_inversion: step condition fails for sigma0=" << params.sigma0
        << " upsilon0=" << params.upsilon0 << " beta=" << params.beta
        << " (forward norm " << result.norms.forward_norm << ", gradient norm "
        << result.norms.gradient_norm << "); pass force to proceed";
    throw SolverError(msg.str(), 0.0, 0);
  }

  PDState state = make_initial_state(op, params, f0, rho0, g_delta);

  Metrics metrics;
  metrics.history.push_back({0, relative_error(op, state.f_curr, f_truth), state.residual, 0.0});

  const auto finish = [&](StoppingReason reason) {
    result.f = state.f_curr;
    result.rho = state.rho;
    metrics.e_r = metrics.history.back().e_r;
    metrics.res = state.residual;
    result.metrics = std::move(metrics);
    result.reason = reason;
    result.iterations = state.n;
    return result;
  };

  if (params.delta > 0.0 && state.residual <= params.discrepancy_factor * params.delta) {
    return finish(StoppingReason::kDiscrepancy);
  }

  while (state.n < params.n_max) {
    pd_iterate(state, params, op, g_delta);
    const double diff = op.norm(state.f_curr - state.f_prev);
    const double curr_norm = op.norm(state.f_curr);
    metrics.history.push_back(
        {state.n, relative_error(op, state.f_curr, f_truth), state.residual, diff});

    if (params.delta > 0.0 && state.residual <= params.discrepancy_factor * params.delta) {
      return finish(StoppingReason::kDiscrepancy);
    }
    if (params.tol_rel > 0.0 && curr_norm > 0.0 && diff / curr_norm <= params.tol_rel) {
      return finish(StoppingReason::kRelativeChange);
    }
  }
  return finish(StoppingReason::kIterationCap);
}

std::pair<NodalField, double> add_noise(const SparseMatrix& mass, const NodalField& g,
                                        double delta_rel, std::uint64_t seed) {
  if (delta_rel < 0.0) {
    throw std::invalid_argument("add_noise: delta_rel must be nonnegative");
  }
  if (delta_rel == 0.0) {
    return {g, 0.0};
  }
  const double gnorm = mass_norm(mass, g);
  if (gnorm == 0.0) {
    throw std::invalid_argument("add_noise: cannot scale noise relative to zero data");
  }
  std::mt19937_64 rng(seed);
  NodalField r(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    r[i] = 2.0 * uniform01(rng) - 1.0;
  }
  const double rnorm = mass_norm(mass, r);
  if (rnorm == 0.0) {
    throw std::invalid_argument("add_noise: degenerate perturbation draw");
  }
  const double delta = delta_rel * gnorm;
  return {g + (delta / rnorm) * r, delta};
}

double objective(const ForwardOperator& op, const NodalField& f, const NodalField& g_delta,
                 const PDParams& params) {
  const NodalField diff = op.forward_final(f) - g_delta;
  const double misfit = op.inner(diff, diff);
  const double reg = op.inner(f, f);
  return 0.5 * misfit + 0.5 * params.beta * reg + params.gamma * tv_value(op.mesh(), f);
}

Metrics error_metrics(const ForwardOperator& op, const NodalField& f_n,
                      const NodalField* f_dagger, const NodalField& g_delta) {
  Metrics m;
  m.e_r = relative_error(op, f_n, f_dagger);
  m.res = op.norm(op.forward_final(f_n) - g_delta);
  return m;
}

}  // namespace subtv
