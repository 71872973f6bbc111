// Command line front end: direct problem runs, source inversion, batch table
// reproduction, built-in verification checks, and operator norm estimates.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subtv/experiments.hpp"
#include "subtv/mittag_leffler.hpp"

namespace {

using namespace subtv;

struct CommonOptions {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file (key = value lines)");
  // overrides funnel through the same key=value path as the config file,
  // keeping one source of truth for parsing and precedence
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"--alpha", "alpha"},
      {"--domain", "domain"},
      {"--n", "n"},
      {"--steps", "steps"},
      {"--final-time", "T"},
      {"--mu", "mu"},
      {"--source", "source"},
      {"--delta-rel", "delta_rel"},
      {"--beta", "beta"},
      {"--gamma", "gamma"},
      {"--sigma0", "sigma0"},
      {"--upsilon0", "upsilon0"},
      {"--theta0", "theta0"},
      {"--nmax", "n_max"},
      {"--tol-rel", "tol_rel"},
      {"--discrepancy-factor", "discrepancy_factor"},
      {"--seed", "seed"},
      {"--out", "out_dir"},
  };
  for (const auto& [flag, key] : keys) {
    const std::string key_copy = key;
    cmd->add_option_function<std::string>(
        flag, [&opts, key_copy](const std::string& value) { opts.overrides[key_copy] = value; },
        "override configuration key '" + key + "'");
  }
  cmd->add_flag_callback(
      "--force", [&opts]() { opts.overrides["force"] = "true"; },
      "proceed when the step-size condition fails (logged)");
  cmd->add_flag_callback(
      "--dump-trajectory", [&opts]() { opts.overrides["dump_trajectory"] = "true"; },
      "write the full time trajectory as CSV (direct runs)");
}

ExperimentConfig resolve(const CommonOptions& opts) {
  std::map<std::string, std::string> file_entries;
  if (!opts.config_path.empty()) {
    file_entries = load_config_file(opts.config_path);
  }
  return resolve_config(file_entries, opts.overrides);
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Check> run_verification() {
  std::vector<Check> checks;
  const auto add = [&checks](const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({name, pass, detail});
  };
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto random_field = [&](Eigen::Index n) {
    NodalField f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = unit(rng);
    return f;
  };

  // L1 weight identities over the alpha grid
  {
    bool ok = true;
    double worst = 0.0;
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const L1Weights w = l1_weights(alpha, 1000, 1e-3);
      for (std::size_t j = 0; j + 1 < w.b.size(); ++j) {
        ok = ok && w.b[j] > w.b[j + 1] && w.b[j + 1] > 0.0;
      }
      std::vector<double> parts;
      for (std::size_t j = 0; j + 1 < w.b.size(); ++j) parts.push_back(w.b[j] - w.b[j + 1]);
      parts.push_back(w.b.back());
      worst = std::max(worst, std::abs(compensated_sum(parts) - 1.0));
      ok = ok && w.zeta.front() > 0.0;
      for (std::size_t j = 1; j < w.zeta.size(); ++j) ok = ok && w.zeta[j] < 0.0;
    }
    add("l1-weight-identities", ok && worst <= 1e-14,
        "telescoping defect " + format_double(worst));
  }

  // mesh tiling
  {
    const Mesh m1 = build_interval_mesh(40);
    const Mesh m2 = build_unit_square_mesh(16);
    double s1 = 0.0, s2 = 0.0;
    for (double v : m1.element_measure) s1 += v;
    for (double v : m2.element_measure) s2 += v;
    add("mesh-tiling", std::abs(s1 - 1.0) <= 1e-12 && std::abs(s2 - 1.0) <= 1e-12,
        "sum defects " + format_double(s1 - 1.0) + ", " + format_double(s2 - 1.0));
  }

  // mass / stiffness identities
  {
    bool ok = true;
    double worst = 0.0;
    for (int dim = 1; dim <= 2; ++dim) {
      const Mesh mesh = dim == 1 ? build_interval_mesh(24) : build_unit_square_mesh(8);
      const SparseMatrix M = assemble_mass(mesh);
      const SparseMatrix A = assemble_stiffness(mesh);
      const NodalField ones = NodalField::Ones(mesh.node_count());
      worst = std::max(worst, std::abs(ones.dot(M * ones) - 1.0));
      worst = std::max(worst, (A * ones).cwiseAbs().maxCoeff());
      ok = ok && worst < 1e-12;
    }
    add("fem-identities", ok, "worst defect " + format_double(worst));
  }

  // gradient adjoint identity
  {
    double worst = 0.0;
    for (int dim = 1; dim <= 2; ++dim) {
      const Mesh mesh = dim == 1 ? build_interval_mesh(17) : build_unit_square_mesh(7);
      for (int trial = 0; trial < 50; ++trial) {
        const NodalField f = random_field(mesh.node_count());
        ElementVectorField rho = ElementVectorField::Zero(mesh.element_count(), 2);
        for (Eigen::Index e = 0; e < rho.rows(); ++e) {
          rho(e, 0) = unit(rng);
          if (dim == 2) rho(e, 1) = unit(rng);
        }
        const double lhs = dual_pairing(mesh, f, rho);
        const double rhs = gradient_adjoint(mesh, rho).dot(f);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    }
    add("gradient-adjoint-identity", worst <= 1e-12, "worst mismatch " + format_double(worst));
  }

  // forward/adjoint dot product
  {
    double worst = 0.0;
    for (int dim = 1; dim <= 2; ++dim) {
      const Mesh mesh = dim == 1 ? build_interval_mesh(20) : build_unit_square_mesh(8);
      const TimeGrid grid(1.0, dim == 1 ? 20 : 10);
      const ForwardOperator op(mesh, grid, 0.7,
                               [](double t) { return std::sin(2.0 * M_PI * t); });
      for (int trial = 0; trial < 10; ++trial) {
        const NodalField z = random_field(mesh.node_count());
        const NodalField r = random_field(mesh.node_count());
        const double lhs = op.inner(op.forward_final(z), r);
        const double rhs = op.inner(z, op.adjoint_final(r));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
      }
    }
    add("forward-adjoint-dot", worst <= 1e-10, "worst mismatch " + format_double(worst));
  }

  // Mittag-Leffler sanity
  {
    bool ok = true;
    double worst = 0.0;
    worst = std::max(worst, std::abs(mittag_leffler(1, 1, 1) - std::exp(1.0)) / std::exp(1.0));
    for (double x : {1.0, 5.0, 20.0}) {
      const double ref = std::exp(x * x) * std::erfc(x);
      worst = std::max(worst, std::abs(mittag_leffler(0.5, 1.0, -x) - ref) / ref);
    }
    for (double a : {0.3, 0.7, 0.9}) {
      for (double z : {-2.0, -15.0, -1e4}) {
        const double lhs = mittag_leffler(a, 1.0, z);
        const double rhs = 1.0 + z * mittag_leffler(a, 1.0 + a, z);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-30));
      }
    }
    double prev = 1e300;
    for (double t = 0.0; t <= 30.0; t += 0.5) {
      const double v = mittag_leffler(0.6, 1.0, -t);
      ok = ok && v > 0.0 && v < prev;
      prev = v;
    }
    add("mittag-leffler", ok && worst <= 1e-10, "worst mismatch " + format_double(worst));
  }

  // TV duality
  {
    bool ok = true;
    for (int dim = 1; dim <= 2; ++dim) {
      const Mesh mesh = dim == 1 ? build_interval_mesh(16) : build_unit_square_mesh(6);
      for (int trial = 0; trial < 25; ++trial) {
        const NodalField f = random_field(mesh.node_count());
        ElementVectorField rho = ElementVectorField::Zero(mesh.element_count(), 2);
        for (Eigen::Index e = 0; e < rho.rows(); ++e) {
          rho(e, 0) = unit(rng);
          if (dim == 2) rho(e, 1) = unit(rng);
        }
        rho = project_ball(rho);
        const double tv = tv_value(mesh, f);
        ok = ok && dual_pairing(mesh, f, rho) <= tv + 1e-12;
        ok = ok && std::abs(dual_pairing(mesh, f, canonical_dual(mesh, f)) - tv) <= 1e-12;
      }
    }
    add("tv-duality", ok, "dual pairing bounded by TV; canonical maximizer attains it");
  }

  // noise scaling
  {
    const Mesh mesh = build_interval_mesh(40);
    const SparseMatrix M = assemble_mass(mesh);
    const NodalField g = random_field(mesh.node_count());
    const auto [gd, delta] = add_noise(M, g, 0.01, 7);
    const double got = mass_norm(M, gd - g) / mass_norm(M, g);
    add("noise-scaling", std::abs(got - 0.01) <= 1e-14,
        "relative perturbation " + format_double(got));
  }

  return checks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subtv: subdiffusion source identification with L2-TV regularization"};
  app.require_subcommand(1);

  CommonOptions direct_opts, invert_opts, table_opts, norms_opts;
  bool refine = false;

  CLI::App* direct = app.add_subcommand("direct", "solve the direct problem for a source preset");
  add_config_options(direct, direct_opts);
  direct->add_flag("--refine", refine,
                   "also solve at doubled time steps and report the error ratio vs the "
                   "spectral reference");

  CLI::App* invert = app.add_subcommand("invert", "reconstruct the source from noisy final data");
  add_config_options(invert, invert_opts);

  CLI::App* table = app.add_subcommand("table", "reproduce a results table across seeds");
  std::string table_id;
  std::vector<std::uint64_t> seeds{1};
  int workers = 4;
  table->add_option("id", table_id, "table id: 1, 2, 3, or 2d")->required();
  table->add_option("--seeds", seeds, "seed list")->delimiter(',');
  table->add_option("--workers", workers, "concurrent runs");
  add_config_options(table, table_opts);

  CLI::App* verify = app.add_subcommand("verify", "run the built-in oracle and invariant checks");

  CLI::App* norms = app.add_subcommand("norms", "print operator norm estimates");
  add_config_options(norms, norms_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (direct->parsed()) {
      const ExperimentConfig config = resolve(direct_opts);
      run_direct(config, refine, &std::cout);
      return 0;
    }
    if (invert->parsed()) {
      const ExperimentConfig config = resolve(invert_opts);
      const auto outcome = run_invert(config, &std::cout);
      std::cout << rows_to_csv({outcome.row}, /*include_wall_ms=*/true);
      return 0;
    }
    if (table->parsed()) {
      const ExperimentConfig base = resolve(table_opts);
      const auto outcome =
          run_table(table_id, seeds, workers, base.out_dir, &std::cout);
      std::cout << outcome.csv;
      return outcome.failures == 0 ? 0 : 1;
    }
    if (verify->parsed()) {
      const auto checks = run_verification();
      bool all = true;
      for (const auto& check : checks) {
        std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << "  (" << check.detail
                  << ")\n";
        all = all && check.pass;
      }
      return all ? 0 : 1;
    }
    if (norms->parsed()) {
      const ExperimentConfig config = resolve(norms_opts);
      Mesh mesh = build_domain(config);
      const TimeGrid grid(config.T, config.steps);
      const ForwardOperator op(std::move(mesh), grid, config.alpha,
                               make_time_profile(config.mu));
      const OperatorNorms n = estimate_norms(op);
      PDParams params;
      params.beta = config.beta.value_or(0.0);
      params.sigma0 = config.sigma0;
      params.upsilon0 = config.upsilon0;
      std::cout << "forward operator norm c = " << format_double(n.forward_norm) << '\n'
                << "gradient norm ||grad|| = " << format_double(n.gradient_norm) << '\n'
                << "step condition at sigma0=" << format_double(config.sigma0)
                << ", upsilon0=" << format_double(config.upsilon0)
                << ", beta=" << format_double(params.beta) << ": "
                << (check_step_condition(params, n.forward_norm, n.gradient_norm) ? "holds"
                                                                                  : "fails")
                << '\n';
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
