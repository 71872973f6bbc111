#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "subtv/fields.hpp"
#include "subtv/time_fractional.hpp"
#include "subtv/tv.hpp"

namespace subtv {

enum class StoppingReason { kDiscrepancy, kRelativeChange, kIterationCap };

const char* to_string(StoppingReason reason);

/// Parameters of the accelerated linearized primal-dual iteration.
struct PDParams {
  double beta = 0.0;                ///< L2 regularization weight
  double gamma = 0.0;               ///< TV regularization weight
  double sigma0 = 300.0;            ///< initial primal step
  double upsilon0 = 1e-4;           ///< initial dual scaling
  double theta0 = 1.0;              ///< extrapolation seed (first update overwrites it)
  int n_max = 5000;                 ///< iteration cap
  double tol_rel = 1e-4;            ///< relative-change stopping tolerance (0 disables)
  double discrepancy_factor = 1.2;  ///< residual threshold multiplier
  double delta = 0.0;               ///< absolute noise level (0 disables discrepancy stop)
  bool force = false;               ///< proceed when the step condition fails
};

struct OperatorNorms {
  double forward_norm = 0.0;   ///< operator norm of the source-to-final-state map
  double gradient_norm = 0.0;  ///< norm of the discrete weak gradient
  bool converged = true;       ///< false when power iteration hit the cap still moving
};

/// Power-iteration estimates of the two norms entering the step condition,
/// both in the L2 (mass) geometry. 30 iterations or 1e-6 relative stagnation.
OperatorNorms estimate_norms(const ForwardOperator& op);

/// Step-size condition (1 - 3 c^2 sigma0)/sigma0 > beta^2 (sigma0/upsilon0) ||grad||^2,
/// evaluated verbatim. Note the right-hand side scales with beta, not gamma,
/// even though gamma weights the primal-dual coupling; the inequality is kept
/// exactly as stated and callers may only bypass it explicitly via `force`.
bool check_step_condition(const PDParams& params, double forward_norm, double gradient_norm);

/// Iteration state: primal pair, dual variable, step schedule, counter.
struct PDState {
  NodalField f_curr;
  NodalField f_prev;
  ElementVectorField rho;
  double sigma = 0.0;
  double upsilon = 0.0;
  double theta = 1.0;
  int n = 0;
  NodalField forward_curr;  ///< cached u^K(f_curr)
  double residual = 0.0;    ///< ||u^K(f_curr) - g_delta|| in the mass norm
};

PDState make_initial_state(const ForwardOperator& op, const PDParams& params,
                           const NodalField& f0, const ElementVectorField& rho0,
                           const NodalField& g_delta);

/// One sweep of the iteration: extrapolate, dual ascent with projection,
/// linearized primal step, schedule update
///   theta <- 1/sqrt(1 + 2 beta sigma), sigma <- theta sigma,
///   upsilon <- upsilon theta sigma_new / sigma_old.
void pd_iterate(PDState& state, const PDParams& params, const ForwardOperator& op,
                const NodalField& g_delta);

struct IterationRecord {
  int n = 0;
  std::optional<double> e_r;
  double res = 0.0;
  double step_diff = 0.0;  ///< ||f^n - f^{n-1}|| in the mass norm
};

struct Metrics {
  std::optional<double> e_r;
  double res = 0.0;
  std::vector<IterationRecord> history;
};

struct InversionResult {
  NodalField f;
  ElementVectorField rho;
  Metrics metrics;
  StoppingReason reason = StoppingReason::kIterationCap;
  int iterations = 0;
  bool step_condition_ok = true;
  OperatorNorms norms;
};

/// Runs the iteration from (f0, rho0) until one stopping rule fires, with
/// precedence discrepancy > relative-change > iteration-cap. Throws
/// SolverError when the step condition fails and params.force is not set.
/// Norms may be supplied to avoid re-estimating them across runs.
InversionResult run_inversion(const ForwardOperator& op, const NodalField& g_delta,
                              const PDParams& params, const NodalField& f0,
                              const ElementVectorField& rho0,
                              const NodalField* f_truth = nullptr,
                              const OperatorNorms* norms = nullptr);

/// Seeded uniform node-wise perturbation scaled so that the L2 (mass) norm of
/// the noise is exactly delta_rel * ||g||. Returns the noisy data and the
/// absolute noise level delta. Throws std::invalid_argument for g = 0 with
/// delta_rel > 0.
std::pair<NodalField, double> add_noise(const SparseMatrix& mass, const NodalField& g,
                                        double delta_rel, std::uint64_t seed);

/// J(f) = 1/2 ||u^K(f) - g||^2 + beta/2 ||f||^2 + gamma TV(f), mass norms.
double objective(const ForwardOperator& op, const NodalField& f, const NodalField& g_delta,
                 const PDParams& params);

/// Relative source error (absent without ground truth) and data residual.
Metrics error_metrics(const ForwardOperator& op, const NodalField& f_n,
                      const NodalField* f_dagger, const NodalField& g_delta);

}  // namespace subtv
