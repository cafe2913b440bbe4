#pragma once

// Scenario descriptions, manifest parsing and the batch runner behind the
// `thinspec` command line tool.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thinspec/states.hpp"

namespace thinspec {

inline constexpr std::string_view kVersion = "1.0.0";

enum class ModelKind { OrderParameter, QFunction, ThinTwoState, Quasiparticle, MultiSymmetry };
enum class StateKind { Coherent, Squeezed, Thermal, ThermalCoherent };

std::string_view to_string(ModelKind k) noexcept;
std::string_view to_string(StateKind k) noexcept;

/// SI trap parameters; when present they fix the energy unit and the seconds column.
struct TrapSpec {
  double a_s{0};       // m
  double a_ho{0};      // m
  double rho{0};       // 1/m^3
  double N{0};
  double omega_tr{0};  // 1/s
};

struct Scenario {
  std::string name;
  ModelKind model{ModelKind::OrderParameter};
  StateKind state{StateKind::Coherent};
  Complex alpha{0.0, 0.0};
  std::vector<Complex> zeta;
  std::vector<std::string> zeta_labels;
  std::vector<double> T_nK;
  std::optional<double> beta;
  std::vector<double> q_times;
  std::optional<double> q_extent;
  int grid_points{201};
  std::vector<double> delta;
  double inertia{1.0};
  std::vector<StateKind> occupation;
  bool oracle{false};
  int m{1};
  std::optional<double> N0;
  std::optional<double> u0rho0;
  double omega_qp{0.0};
  std::optional<TrapSpec> trap;
  double tol{1e-12};
  double t_max{0.0};
  int n_points{0};
  std::string output;
  /// (key, value) exactly as parsed, in input order, for the CSV header.
  std::vector<std::pair<std::string, std::string>> echo;

  /// Throws Errc::Config naming the offending field.
  void validate() const;
  bool uses_state() const { return model == ModelKind::OrderParameter || model == ModelKind::QFunction; }
  std::string output_stem() const { return output.empty() ? name : output; }
};

/// One `key = value` line of a manifest section.
struct ManifestEntry {
  std::string key;
  std::string value;
  int line{0};
};

/// Builds a scenario from a manifest section. Unknown keys, malformed numbers
/// and duplicates throw Errc::Config with the key and line number.
Scenario parse_scenario(const std::vector<ManifestEntry>& entries);

/// Parses `[scenario]` sections of `key = value` lines; `#` starts a comment.
/// Scenario names must be unique.
std::vector<Scenario> parse_manifest(std::string_view text, std::string_view source = "<manifest>");
std::vector<Scenario> load_manifest(const std::string& path);

/// The reference figure scenarios compiled into the binary.
std::string_view builtin_manifest_text();
const std::vector<Scenario>& builtin_scenarios();
const Scenario* find_builtin(std::string_view name);

/// In-memory result of one scenario: file contents plus stdout summary lines.
struct ScenarioOutput {
  std::string csv;
  std::string plot_script;
  std::vector<std::string> summary;
};

ScenarioOutput compute_scenario(const Scenario& s);

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.gp`, creating the directory.
void write_outputs(const Scenario& s, const ScenarioOutput& o, const std::string& out_dir);

/// Computes, writes `<dir>/<stem>.csv` and `<dir>/<stem>.gp`, prints the summary.
void run_scenario(const Scenario& s, const std::string& out_dir, std::ostream& out);

struct RunOptions {
  std::size_t jobs{1};
  std::string out_dir{"."};
};

/// Runs every scenario with up to `jobs` worker threads. Summaries and
/// diagnostics are printed in manifest order. Returns the number of failures.
int run_manifest(const std::vector<Scenario>& scenarios, const RunOptions& opts, std::ostream& out,
                 std::ostream& err);

/// `--out` if given, else $THINSPEC_OUT, else ".".
std::string resolve_output_dir(const std::optional<std::string>& cli_out);

}  // namespace thinspec
