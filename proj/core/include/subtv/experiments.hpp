#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subtv/primal_dual.hpp"
#include "subtv/spectral.hpp"

namespace subtv {

/// Everything needed to rerun one experiment: discretization, source and
/// noise model, solver knobs, seed, output location.
struct ExperimentConfig {
  double alpha = 0.9;
  std::string domain = "interval";  ///< interval | square
  int n = 40;                       ///< mesh subdivisions per direction
  int steps = 50;                   ///< time steps
  double T = 1.0;
  std::string mu = "sin2pi";       ///< sin2pi | one | expression in t
  std::string source = "example1";  ///< example1..example4 | file:PATH
  double delta_rel = 0.005;
  std::optional<double> beta;  ///< empty: beta = delta^2
  double gamma = 1e-8;
  double sigma0 = 300.0;
  double upsilon0 = 1e-4;
  double theta0 = 1.0;
  int n_max = 5000;
  double tol_rel = 1e-4;
  double discrepancy_factor = 1.2;
  std::uint64_t seed = 1;
  std::string out_dir;  ///< empty: no files are written
  bool force = false;
  bool dump_trajectory = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Defaults for a named source preset (mesh, mu, and the headline solver
/// settings that belong to it). Precedence when resolving a run is
/// command line > config file > these defaults.
ExperimentConfig preset_defaults(const std::string& source);

void apply_key_value(ExperimentConfig& config, const std::string& key, const std::string& value);
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);
ExperimentConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                                const std::map<std::string, std::string>& cli_entries);
std::string serialize_config(const ExperimentConfig& config);

/// Time profile factory: "one", "sin2pi", or an arithmetic expression in t
/// (e.g. "sin(2*pi*t)", "0.5*t+1"). Supported functions: sin cos exp sqrt abs.
std::function<double(double)> make_time_profile(const std::string& spec);

/// Analytic source presets, by name, as functions of (x, y).
std::function<double(double, double)> source_preset_function(const std::string& name, int dim);

/// Nodal interpolant of a preset (or "file:PATH" nodal values) on the mesh.
NodalField source_preset(const std::string& name, const Mesh& mesh);

Mesh build_domain(const ExperimentConfig& config);

/// Shortest round-trip decimal rendering; parsing the result recovers the
/// exact double, which keeps emitted CSVs byte-reproducible and recomputable.
std::string format_double(double value);

struct DirectOutcome {
  NodalField final_state;
  double oracle_rel_error = -1.0;   ///< vs spectral expansion; -1 if skipped
  double refined_rel_error = -1.0;  ///< same at 2x time steps; -1 if skipped
  double time_error_ratio = -1.0;
  std::string output_path;
};

/// Solves the direct problem for the configured source, optionally comparing
/// against the spectral expansion at (steps, 2*steps) when refine is set.
DirectOutcome run_direct(const ExperimentConfig& config, bool refine = false,
                         std::ostream* log = nullptr);

struct ResultRow {
  double alpha = 0.0;
  double delta_rel = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  int n = 0;
  double e_r = -1.0;
  double res = -1.0;
  StoppingReason reason = StoppingReason::kIterationCap;
  double wall_ms = 0.0;
  bool step_condition_ok = true;
  bool ok = true;
  std::string error;
};

struct InvertOutcome {
  ResultRow row;
  NodalField reconstruction;
  NodalField g_delta;
  double delta_abs = 0.0;
  Metrics metrics;
  std::string reconstruction_path;
  std::string history_path;
};

InvertOutcome run_invert(const ExperimentConfig& config, std::ostream* log = nullptr);

struct TableOutcome {
  std::vector<ResultRow> rows;
  std::string csv;         ///< byte-reproducible per-seed rows
  std::string median_csv;  ///< per-configuration medians across seeds
  int failures = 0;
  std::string csv_path;
};

std::vector<ExperimentConfig> table_configurations(const std::string& table_id);

/// Runs every configuration of the named table ("1", "2", "3", "2d") across
/// the given seeds, scheduling independent rows over `workers` threads.
/// Timings are inherently not reproducible, so the CSV carries an empty
/// wall_ms field and the measured values go to the JSON sidecar.
TableOutcome run_table(const std::string& table_id, const std::vector<std::uint64_t>& seeds,
                       int workers = 4, const std::string& out_dir = {},
                       std::ostream* log = nullptr);

std::string rows_to_csv(const std::vector<ResultRow>& rows, bool include_wall_ms);

}  // namespace subtv
