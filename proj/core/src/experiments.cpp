#include "subtv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace subtv {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// tiny arithmetic expression parser for time profiles mu(t)
// ---------------------------------------------------------------------------

class ExprParser {
 public:
  using Fn = std::function<double(double)>;

  explicit ExprParser(std::string text) : text_(std::move(text)) {}

  Fn parse() {
    Fn fn = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) {
      throw std::invalid_argument("time profile: trailing input at '" + text_.substr(pos_) + "'");
    }
    return fn;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn parse_sum() {
    Fn lhs = parse_product();
    for (;;) {
      if (consume('+')) {
        Fn rhs = parse_product();
        lhs = [lhs, rhs](double t) { return lhs(t) + rhs(t); };
      } else if (consume('-')) {
        Fn rhs = parse_product();
        lhs = [lhs, rhs](double t) { return lhs(t) - rhs(t); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_product() {
    Fn lhs = parse_power();
    for (;;) {
      if (consume('*')) {
        Fn rhs = parse_power();
        lhs = [lhs, rhs](double t) { return lhs(t) * rhs(t); };
      } else if (consume('/')) {
        Fn rhs = parse_power();
        lhs = [lhs, rhs](double t) { return lhs(t) / rhs(t); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_power() {
    Fn base = parse_unary();
    if (consume('^')) {
      Fn exp = parse_power();  // right associative
      return [base, exp](double t) { return std::pow(base(t), exp(t)); };
    }
    return base;
  }

  Fn parse_unary() {
    if (consume('-')) {
      Fn inner = parse_unary();
      return [inner](double t) { return -inner(t); };
    }
    consume('+');
    return parse_primary();
  }

  Fn parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw std::invalid_argument("time profile: unexpected end of expression");
    }
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Fn inner = parse_sum();
      if (!consume(')')) {
        throw std::invalid_argument("time profile: missing ')'");
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin) {
        throw std::invalid_argument("time profile: bad number");
      }
      pos_ += static_cast<std::size_t>(end - begin);
      return [value](double) { return value; };
    }
    std::string name;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      name.push_back(text_[pos_++]);
    }
    if (name.empty()) {
      throw std::invalid_argument(std::string("time profile: unexpected character '") + c + "'");
    }
    if (name == "t") return [](double t) { return t; };
    if (name == "pi") return [](double) { return kPi; };
    if (!consume('(')) {
      throw std::invalid_argument("time profile: unknown symbol '" + name + "'");
    }
    Fn arg = parse_sum();
    if (!consume(')')) {
      throw std::invalid_argument("time profile: missing ')' after " + name);
    }
    if (name == "sin") return [arg](double t) { return std::sin(arg(t)); };
    if (name == "cos") return [arg](double t) { return std::cos(arg(t)); };
    if (name == "exp") return [arg](double t) { return std::exp(arg(t)); };
    if (name == "sqrt") return [arg](double t) { return std::sqrt(arg(t)); };
    if (name == "abs") return [arg](double t) { return std::abs(arg(t)); };
    throw std::invalid_argument("time profile: unknown function '" + name + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::function<double(double)> make_time_profile(const std::string& spec) {
  if (spec == "one") return [](double) { return 1.0; };
  if (spec == "sin2pi") return [](double t) { return std::sin(2.0 * kPi * t); };
  return ExprParser(spec).parse();
}

std::function<double(double, double)> source_preset_function(const std::string& name, int dim) {
  const auto need_dim = [&](int d) {
    if (dim != d) {
      throw std::invalid_argument("source preset '" + name + "' needs a " + std::to_string(d) +
                                  "D mesh");
    }
  };
  if (name == "example1") {
    need_dim(1);
    return [](double x, double) { return std::exp(-x) * std::sin(2.0 * kPi * x); };
  }
  if (name == "example2") {
    need_dim(1);
    return [](double x, double) { return x < 0.5 ? 2.0 * x : 2.0 - 2.0 * x; };
  }
  if (name == "example3") {
    need_dim(1);
    return [](double x, double) { return (x >= 0.25 && x <= 0.75) ? 0.25 : 0.0; };
  }
  if (name == "example4") {
    need_dim(2);
    return [](double x, double y) {
      const double dx = x - 0.5;
      const double dy = y - 0.5;
      return dx * dx + dy * dy <= 0.0625 ? 0.25 : 0.0;
    };
  }
  throw std::invalid_argument("unknown source preset '" + name + "'");
}

NodalField source_preset(const std::string& name, const Mesh& mesh) {
  if (name.rfind("file:", 0) == 0) {
    const std::string path = name.substr(5);
    std::ifstream in(path);
    if (!in) {
      throw std::invalid_argument("source file '" + path + "' cannot be opened");
    }
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find_last_of(',');
      const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
      values.push_back(std::stod(cell));
    }
    if (static_cast<Index>(values.size()) != mesh.node_count()) {
      throw std::invalid_argument("source file '" + path + "' has " +
                                  std::to_string(values.size()) + " values, mesh has " +
                                  std::to_string(mesh.node_count()) + " nodes");
    }
    NodalField f(mesh.node_count());
    for (Index i = 0; i < mesh.node_count(); ++i) f[i] = values[static_cast<std::size_t>(i)];
    return f;
  }
  const auto fn = source_preset_function(name, mesh.dim);
  NodalField f(mesh.node_count());
  for (Index i = 0; i < mesh.node_count(); ++i) {
    const auto& p = mesh.nodes[static_cast<std::size_t>(i)];
    f[i] = fn(p[0], p[1]);
  }
  return f;
}

Mesh build_domain(const ExperimentConfig& config) {
  if (config.domain == "interval") return build_interval_mesh(config.n);
  if (config.domain == "square") return build_unit_square_mesh(config.n);
  throw std::invalid_argument("unknown domain '" + config.domain + "'");
}

// ---------------------------------------------------------------------------
// configuration plumbing
// ---------------------------------------------------------------------------

ExperimentConfig preset_defaults(const std::string& source) {
  ExperimentConfig c;
  c.source = source;
  if (source == "example1") {
    c.delta_rel = 0.005;
    c.beta = 1e-8;
    c.gamma = 1e-8;
  } else if (source == "example2") {
    c.delta_rel = 0.01;
    c.beta = 1e-7;
    c.gamma = 1e-7;
  } else if (source == "example3") {
    c.delta_rel = 0.005;
    c.beta = 5e-9;
    c.gamma = 5e-9;
  } else if (source == "example4") {
    c.alpha = 0.9;
    c.domain = "square";
    c.mu = "one";
    c.delta_rel = 0.001;
    c.beta = 1e-10;
    c.gamma = 1e-9;
    c.sigma0 = 500.0;
    c.n_max = 1000;
  }
  return c;
}

namespace {

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + value + "'");
}

double parse_real(const std::string& value) {
  std::size_t used = 0;
  const double v = std::stod(value, &used);
  if (used != value.size()) {
    throw std::invalid_argument("expected a number, got '" + value + "'");
  }
  return v;
}

int parse_int(const std::string& value) {
  std::size_t used = 0;
  const int v = std::stoi(value, &used);
  if (used != value.size()) {
    throw std::invalid_argument("expected an integer, got '" + value + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

void apply_key_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "alpha") {
    config.alpha = parse_real(value);
  } else if (key == "domain") {
    config.domain = value;
  } else if (key == "n") {
    config.n = parse_int(value);
  } else if (key == "steps") {
    config.steps = parse_int(value);
  } else if (key == "T") {
    config.T = parse_real(value);
  } else if (key == "mu") {
    config.mu = value;
  } else if (key == "source") {
    config.source = value;
  } else if (key == "delta_rel") {
    config.delta_rel = parse_real(value);
  } else if (key == "beta") {
    if (value == "auto") {
      config.beta.reset();
    } else {
      config.beta = parse_real(value);
    }
  } else if (key == "gamma") {
    config.gamma = parse_real(value);
  } else if (key == "sigma0") {
    config.sigma0 = parse_real(value);
  } else if (key == "upsilon0") {
    config.upsilon0 = parse_real(value);
  } else if (key == "theta0") {
    config.theta0 = parse_real(value);
  } else if (key == "n_max") {
    config.n_max = parse_int(value);
  } else if (key == "tol_rel") {
    config.tol_rel = parse_real(value);
  } else if (key == "discrepancy_factor") {
    config.discrepancy_factor = parse_real(value);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(std::stoull(value));
  } else if (key == "out_dir") {
    config.out_dir = value;
  } else if (key == "force") {
    config.force = parse_bool(value);
  } else if (key == "dump_trajectory") {
    config.dump_trajectory = parse_bool(value);
  } else {
    throw std::invalid_argument("unknown configuration key '" + key + "'");
  }
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section headers are cosmetic
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return entries;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config file '" + path + "' cannot be opened");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ExperimentConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                                const std::map<std::string, std::string>& cli_entries) {
  std::string source = "example1";
  if (auto it = file_entries.find("source"); it != file_entries.end()) source = it->second;
  if (auto it = cli_entries.find("source"); it != cli_entries.end()) source = it->second;
  ExperimentConfig config = preset_defaults(source);
  for (const auto& [key, value] : file_entries) apply_key_value(config, key, value);
  for (const auto& [key, value] : cli_entries) apply_key_value(config, key, value);
  return config;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "alpha = " << format_double(c.alpha) << '\n';
  out << "domain = " << c.domain << '\n';
  out << "n = " << c.n << '\n';
  out << "steps = " << c.steps << '\n';
  out << "T = " << format_double(c.T) << '\n';
  out << "mu = " << c.mu << '\n';
  out << "source = " << c.source << '\n';
  out << "\n[noise]\n";
  out << "delta_rel = " << format_double(c.delta_rel) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "\n[solver]\n";
  out << "beta = " << (c.beta ? format_double(*c.beta) : std::string("auto")) << '\n';
  out << "gamma = " << format_double(c.gamma) << '\n';
  out << "sigma0 = " << format_double(c.sigma0) << '\n';
  out << "upsilon0 = " << format_double(c.upsilon0) << '\n';
  out << "theta0 = " << format_double(c.theta0) << '\n';
  out << "n_max = " << c.n_max << '\n';
  out << "tol_rel = " << format_double(c.tol_rel) << '\n';
  out << "discrepancy_factor = " << format_double(c.discrepancy_factor) << '\n';
  out << "force = " << (c.force ? "true" : "false") << '\n';
  out << "\n[output]\n";
  out << "out_dir = " << c.out_dir << '\n';
  out << "dump_trajectory = " << (c.dump_trajectory ? "true" : "false") << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// runners
// ---------------------------------------------------------------------------

namespace {

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["alpha"] = c.alpha;
  j["domain"] = c.domain;
  j["n"] = c.n;
  j["steps"] = c.steps;
  j["T"] = c.T;
  j["mu"] = c.mu;
  j["source"] = c.source;
  j["delta_rel"] = c.delta_rel;
  if (c.beta) {
    j["beta"] = *c.beta;
  } else {
    j["beta"] = "auto";
  }
  j["gamma"] = c.gamma;
  j["sigma0"] = c.sigma0;
  j["upsilon0"] = c.upsilon0;
  j["theta0"] = c.theta0;
  j["n_max"] = c.n_max;
  j["tol_rel"] = c.tol_rel;
  j["discrepancy_factor"] = c.discrepancy_factor;
  j["seed"] = c.seed;
  j["force"] = c.force;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << text;
}

std::string nodal_csv(const Mesh& mesh, const NodalField& values) {
  std::ostringstream out;
  for (Index i = 0; i < mesh.node_count(); ++i) {
    const auto& p = mesh.nodes[static_cast<std::size_t>(i)];
    out << format_double(p[0]);
    if (mesh.dim == 2) out << ',' << format_double(p[1]);
    out << ',' << format_double(values[i]) << '\n';
  }
  return out.str();
}

/// Immutable data shared by every seed of one configuration.
struct PreparedProblem {
  std::unique_ptr<ForwardOperator> op;
  OperatorNorms norms;
  NodalField truth;
  NodalField clean_data;
};

PreparedProblem prepare_problem(const ExperimentConfig& config) {
  PreparedProblem prep;
  Mesh mesh = build_domain(config);
  const TimeGrid grid(config.T, config.steps);
  prep.op = std::make_unique<ForwardOperator>(std::move(mesh), grid, config.alpha,
                                              make_time_profile(config.mu));
  prep.norms = estimate_norms(*prep.op);
  prep.truth = source_preset(config.source, prep.op->mesh());
  prep.clean_data = prep.op->forward_final(prep.truth);
  return prep;
}

std::string problem_key(const ExperimentConfig& c) {
  std::ostringstream key;
  key << c.alpha << '|' << c.domain << '|' << c.n << '|' << c.steps << '|' << c.T << '|' << c.mu
      << '|' << c.source;
  return key.str();
}

InvertOutcome execute_invert(const PreparedProblem& prep, const ExperimentConfig& config) {
  const auto start = Clock::now();
  InvertOutcome outcome;
  auto [g_delta, delta_abs] =
      add_noise(prep.op->mass(), prep.clean_data, config.delta_rel, config.seed);
  outcome.g_delta = std::move(g_delta);
  outcome.delta_abs = delta_abs;

  PDParams params;
  params.beta = config.beta.value_or(delta_abs * delta_abs);
  params.gamma = config.gamma;
  params.sigma0 = config.sigma0;
  params.upsilon0 = config.upsilon0;
  params.theta0 = config.theta0;
  params.n_max = config.n_max;
  params.tol_rel = config.tol_rel;
  params.discrepancy_factor = config.discrepancy_factor;
  params.delta = delta_abs;
  params.force = config.force;

  const NodalField f0 = NodalField::Zero(prep.op->mesh().node_count());
  const ElementVectorField rho0 =
      ElementVectorField::Constant(prep.op->mesh().element_count(), 2, 0.5);

  InversionResult inv =
      run_inversion(*prep.op, outcome.g_delta, params, f0, rho0, &prep.truth, &prep.norms);

  outcome.reconstruction = inv.f;
  outcome.metrics = std::move(inv.metrics);
  outcome.row.alpha = config.alpha;
  outcome.row.delta_rel = config.delta_rel;
  outcome.row.beta = params.beta;
  outcome.row.gamma = params.gamma;
  outcome.row.seed = config.seed;
  outcome.row.n = inv.iterations;
  outcome.row.e_r = outcome.metrics.e_r.value_or(-1.0);
  outcome.row.res = outcome.metrics.res;
  outcome.row.reason = inv.reason;
  outcome.row.step_condition_ok = inv.step_condition_ok;
  outcome.row.wall_ms = elapsed_ms(start);
  return outcome;
}

std::string history_csv(const Metrics& metrics) {
  std::ostringstream out;
  out << "n,e_r,res,step_diff\n";
  for (const auto& rec : metrics.history) {
    out << rec.n << ',' << (rec.e_r ? format_double(*rec.e_r) : std::string()) << ','
        << format_double(rec.res) << ',' << format_double(rec.step_diff) << '\n';
  }
  return out.str();
}

double median(std::vector<double> v) {
  if (v.empty()) return -1.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

DirectOutcome run_direct(const ExperimentConfig& config, bool refine, std::ostream* log) {
  DirectOutcome outcome;
  Mesh mesh = build_domain(config);
  const TimeGrid grid(config.T, config.steps);
  const auto mu = make_time_profile(config.mu);
  const ForwardOperator op(mesh, grid, config.alpha, mu);
  const NodalField f = source_preset(config.source, op.mesh());
  const Trajectory traj = op.direct_solve(f);
  outcome.final_state = traj.states.back();

  const bool analytic = config.source.rfind("file:", 0) != 0;
  if (analytic) {
    const auto f_fn = source_preset_function(config.source, op.mesh().dim);
    const EigenBasis basis = op.mesh().dim == 1 ? interval_basis(100) : square_basis(400);
    NodalField oracle;
    if (config.mu == "one") {
      oracle = spectral_final_state(basis, config.alpha, config.T, 1.0, f_fn,
                                    basis.count(), op.mesh());
    } else {
      oracle = spectral_final_state(basis, config.alpha, config.T, mu, f_fn, basis.count(),
                                    op.mesh());
    }
    const double scale = op.norm(oracle);
    if (scale > 0.0) {
      outcome.oracle_rel_error = op.norm(outcome.final_state - oracle) / scale;
      if (refine) {
        const TimeGrid fine(config.T, 2 * config.steps);
        const ForwardOperator op_fine(op.mesh(), fine, config.alpha, mu);
        outcome.refined_rel_error = op_fine.norm(op_fine.forward_final(f) - oracle) / scale;
        if (outcome.refined_rel_error > 0.0) {
          outcome.time_error_ratio = outcome.oracle_rel_error / outcome.refined_rel_error;
        }
      }
    }
  } else if (log != nullptr) {
    *log << "direct: file source, spectral comparison skipped\n";
  }

  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    const auto csv_path = dir / "final_state.csv";
    write_text(csv_path, nodal_csv(op.mesh(), outcome.final_state));
    outcome.output_path = csv_path.string();
    if (config.dump_trajectory) {
      std::ostringstream tcsv;
      write_trajectory_csv(traj, grid, tcsv);
      write_text(dir / "trajectory.csv", tcsv.str());
    }
    nlohmann::json meta;
    meta["config"] = config_json(config);
    meta["kind"] = "direct";
    if (outcome.oracle_rel_error >= 0.0) meta["oracle_rel_error"] = outcome.oracle_rel_error;
    if (outcome.refined_rel_error >= 0.0) meta["refined_rel_error"] = outcome.refined_rel_error;
    if (outcome.time_error_ratio >= 0.0) meta["time_error_ratio"] = outcome.time_error_ratio;
    write_text(dir / "direct_meta.json", meta.dump(2) + "\n");
  }
  if (log != nullptr) {
    *log << "direct: final-state norm "
         << format_double(mass_norm(op.mass(), outcome.final_state));
    if (outcome.oracle_rel_error >= 0.0) {
      *log << ", spectral gap " << format_double(outcome.oracle_rel_error);
    }
    if (outcome.time_error_ratio >= 0.0) {
      *log << ", time refinement ratio " << format_double(outcome.time_error_ratio);
    }
    *log << '\n';
  }
  return outcome;
}

InvertOutcome run_invert(const ExperimentConfig& config, std::ostream* log) {
  const PreparedProblem prep = prepare_problem(config);
  if (!check_step_condition(
          PDParams{.beta = config.beta.value_or(0.0),
                   .sigma0 = config.sigma0,
                   .upsilon0 = config.upsilon0},
          prep.norms.forward_norm, prep.norms.gradient_norm) &&
      log != nullptr) {
    *log << "warning: step condition fails (forward norm "
         << format_double(prep.norms.forward_norm) << ", gradient norm "
         << format_double(prep.norms.gradient_norm) << ")"
         << (config.force ? ", proceeding under force\n" : "\n");
  }
  InvertOutcome outcome = execute_invert(prep, config);

  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    std::ostringstream stem;
    stem << "invert_" << config.source << "_s" << config.seed;
    const auto recon_path = dir / (stem.str() + "_reconstruction.csv");
    const auto hist_path = dir / (stem.str() + "_history.csv");
    write_text(recon_path, nodal_csv(prep.op->mesh(), outcome.reconstruction));
    write_text(hist_path, history_csv(outcome.metrics));
    outcome.reconstruction_path = recon_path.string();
    outcome.history_path = hist_path.string();

    nlohmann::json meta;
    meta["config"] = config_json(config);
    meta["kind"] = "invert";
    meta["delta_abs"] = outcome.delta_abs;
    meta["beta_effective"] = outcome.row.beta;
    meta["forward_norm"] = prep.norms.forward_norm;
    meta["gradient_norm"] = prep.norms.gradient_norm;
    meta["step_condition_ok"] = outcome.row.step_condition_ok;
    meta["iterations"] = outcome.row.n;
    meta["e_r"] = outcome.row.e_r;
    meta["res"] = outcome.row.res;
    meta["stop_reason"] = to_string(outcome.row.reason);
    meta["wall_ms"] = outcome.row.wall_ms;
    write_text(dir / (stem.str() + "_meta.json"), meta.dump(2) + "\n");
  }
  if (log != nullptr) {
    *log << "invert: n=" << outcome.row.n << " e_r=" << format_double(outcome.row.e_r)
         << " res=" << format_double(outcome.row.res) << " stop=" << to_string(outcome.row.reason)
         << '\n';
  }
  return outcome;
}

std::vector<ExperimentConfig> table_configurations(const std::string& table_id) {
  struct Block {
    double delta_rel;
    double scale;
    std::vector<std::pair<double, double>> pairs;
  };
  std::vector<ExperimentConfig> configs;

  const auto expand = [&configs](const std::string& source, const std::vector<Block>& blocks) {
    for (const double alpha : {0.3, 0.9}) {
      for (const auto& block : blocks) {
        for (const auto& [b, g] : block.pairs) {
          ExperimentConfig c = preset_defaults(source);
          c.alpha = alpha;
          c.delta_rel = block.delta_rel;
          c.beta = b * block.scale;
          c.gamma = g * block.scale;
          c.force = true;  // reference settings; condition status lands in the sidecar
          configs.push_back(std::move(c));
        }
      }
    }
  };

  if (table_id == "1") {
    expand("example1", {{0.02, 1e-8, {{5, 5}, {5, 10}, {10, 5}, {10, 10}}},
                        {0.01, 1e-8, {{2, 2}, {2, 5}, {5, 2}, {5, 5}}},
                        {0.005, 1e-8, {{1, 1}, {1, 5}, {5, 1}, {5, 5}}}});
  } else if (table_id == "2") {
    expand("example2", {{0.02, 1e-7, {{1, 1}, {1, 2}, {2, 1}, {2, 2}}},
                        {0.01, 1e-7, {{1, 1}, {1, 2}, {2, 1}, {2, 2}}},
                        {0.005, 1e-8, {{1, 1}, {1, 5}, {5, 1}, {5, 5}}}});
  } else if (table_id == "3") {
    expand("example3", {{0.01, 1e-8, {{5, 5}, {5, 10}, {10, 5}, {10, 10}}},
                        {0.005, 1e-9, {{5, 5}, {5, 50}, {50, 5}, {50, 50}}},
                        {0.001, 1e-9, {{1, 1}, {1, 10}, {10, 1}, {10, 10}}}});
  } else if (table_id == "2d") {
    ExperimentConfig c = preset_defaults("example4");
    c.force = true;
    configs.push_back(std::move(c));
  } else {
    throw std::invalid_argument("unknown table id '" + table_id + "' (expected 1, 2, 3, or 2d)");
  }

  std::sort(configs.begin(), configs.end(), [](const ExperimentConfig& a, const ExperimentConfig& b) {
    return std::tie(a.alpha, a.delta_rel, *a.beta, a.gamma) <
           std::tie(b.alpha, b.delta_rel, *b.beta, b.gamma);
  });
  return configs;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows, bool include_wall_ms) {
  std::ostringstream out;
  out << "alpha,delta_rel,beta,gamma,seed,n,e_r,res,stop_reason,wall_ms\n";
  for (const auto& row : rows) {
    out << format_double(row.alpha) << ',' << format_double(row.delta_rel) << ','
        << format_double(row.beta) << ',' << format_double(row.gamma) << ',' << row.seed << ',';
    if (row.ok) {
      out << row.n << ',' << format_double(row.e_r) << ',' << format_double(row.res) << ','
          << to_string(row.reason);
    } else {
      out << ",,," << "error";
    }
    out << ',';
    if (include_wall_ms) out << format_double(row.wall_ms);
    out << '\n';
  }
  return out.str();
}

TableOutcome run_table(const std::string& table_id, const std::vector<std::uint64_t>& seeds,
                       int workers, const std::string& out_dir, std::ostream* log) {
  if (seeds.empty()) {
    throw std::invalid_argument("run_table: need at least one seed");
  }
  const std::vector<ExperimentConfig> configs = table_configurations(table_id);

  // one prepared problem per distinct discretization, shared read-only
  std::map<std::string, PreparedProblem> problems;
  for (const auto& config : configs) {
    const std::string key = problem_key(config);
    if (problems.find(key) == problems.end()) {
      problems.emplace(key, prepare_problem(config));
    }
  }

  struct Job {
    ExperimentConfig config;
    const PreparedProblem* prep;
  };
  std::vector<Job> jobs;
  jobs.reserve(configs.size() * seeds.size());
  for (const auto& config : configs) {
    const PreparedProblem* prep = &problems.at(problem_key(config));
    for (const auto seed : seeds) {
      ExperimentConfig c = config;
      c.seed = seed;
      jobs.push_back({std::move(c), prep});
    }
  }

  TableOutcome outcome;
  outcome.rows.resize(jobs.size());
  std::atomic<std::size_t> cursor{0};
  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  const auto worker = [&]() {
    for (std::size_t i = cursor.fetch_add(1); i < jobs.size(); i = cursor.fetch_add(1)) {
      const Job& job = jobs[i];
      try {
        outcome.rows[i] = execute_invert(*job.prep, job.config).row;
      } catch (const std::exception& err) {
        ResultRow row;
        row.alpha = job.config.alpha;
        row.delta_rel = job.config.delta_rel;
        row.beta = job.config.beta.value_or(-1.0);
        row.gamma = job.config.gamma;
        row.seed = job.config.seed;
        row.ok = false;
        row.error = err.what();
        outcome.rows[i] = std::move(row);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (const auto& row : outcome.rows) {
    if (!row.ok) ++outcome.failures;
  }
  outcome.csv = rows_to_csv(outcome.rows, /*include_wall_ms=*/false);

  // medians across seeds, per configuration
  {
    std::ostringstream med;
    med << "alpha,delta_rel,beta,gamma,seeds,n_median,e_r_median,res_median\n";
    const std::size_t per = seeds.size();
    for (std::size_t c = 0; c < configs.size(); ++c) {
      std::vector<double> ns, ers, ress;
      for (std::size_t s = 0; s < per; ++s) {
        const auto& row = outcome.rows[c * per + s];
        if (!row.ok) continue;
        ns.push_back(row.n);
        ers.push_back(row.e_r);
        ress.push_back(row.res);
      }
      const auto& cfg = configs[c];
      med << format_double(cfg.alpha) << ',' << format_double(cfg.delta_rel) << ','
          << format_double(*cfg.beta) << ',' << format_double(cfg.gamma) << ',' << ns.size() << ','
          << format_double(median(ns)) << ',' << format_double(median(ers)) << ','
          << format_double(median(ress)) << '\n';
    }
    outcome.median_csv = med.str();
  }

  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto csv_path = dir / ("table" + table_id + ".csv");
    write_text(csv_path, outcome.csv);
    write_text(dir / ("table" + table_id + "_median.csv"), outcome.median_csv);
    outcome.csv_path = csv_path.string();

    nlohmann::json meta;
    meta["table"] = table_id;
    meta["seeds"] = seeds;
    meta["failures"] = outcome.failures;
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& row : outcome.rows) {
      nlohmann::json jr;
      jr["alpha"] = row.alpha;
      jr["delta_rel"] = row.delta_rel;
      jr["beta"] = row.beta;
      jr["gamma"] = row.gamma;
      jr["seed"] = row.seed;
      jr["ok"] = row.ok;
      if (row.ok) {
        jr["n"] = row.n;
        jr["e_r"] = row.e_r;
        jr["res"] = row.res;
        jr["stop_reason"] = to_string(row.reason);
        jr["step_condition_ok"] = row.step_condition_ok;
        jr["wall_ms"] = row.wall_ms;
      } else {
        jr["error"] = row.error;
      }
      jrows.push_back(std::move(jr));
    }
    meta["rows"] = std::move(jrows);
    write_text(dir / ("table" + table_id + "_meta.json"), meta.dump(2) + "\n");
  }
  if (log != nullptr) {
    *log << "table " << table_id << ": " << outcome.rows.size() << " runs, " << outcome.failures
         << " failures\n";
  }
  return outcome;
}

}  // namespace subtv
