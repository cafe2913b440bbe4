// thinspec: regenerate condensate coherence datasets from built-in or manifest scenarios.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thinspec/dynamics.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/scenario.hpp"
#include "thinspec/units.hpp"

namespace {

void print_row(const char* key, double value, const char* unit) {
  std::printf("%-14s = %.6g%s%s\n", key, value, *unit ? " " : "", unit);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase collapse and thin-spectrum decoherence of condensates"};
  app.set_version_flag("--version", std::string(thinspec::kVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one built-in scenario");
  std::string scenario_name;
  std::optional<std::string> run_out;
  run->add_option("scenario", scenario_name, "Scenario name (see `thinspec list`)")->required();
  run->add_option("--out", run_out, "Output directory (default: $THINSPEC_OUT or .)");

  auto* manifest = app.add_subcommand("manifest", "Run every scenario of a manifest file");
  std::string manifest_path;
  std::size_t jobs = 1;
  std::optional<std::string> manifest_out;
  manifest->add_option("file", manifest_path, "Manifest path")->required();
  manifest->add_option("--jobs,-j", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
  manifest->add_option("--out", manifest_out, "Output directory (default: $THINSPEC_OUT or .)");

  auto* list = app.add_subcommand("list", "List built-in scenarios");

  auto* params = app.add_subcommand("params", "Print derived couplings for trap parameters");
  double a_s = 0, a_ho = 0, rho = 0, N = 0, omega = 0;
  params->add_option("--as", a_s, "s-wave scattering length [m]")->required();
  params->add_option("--aho", a_ho, "Trap length [m]")->required();
  params->add_option("--rho", rho, "Density [1/m^3]")->required();
  params->add_option("--N", N, "Atom number")->required();
  params->add_option("--omega", omega, "Trap angular frequency [1/s]")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const thinspec::Scenario* s = thinspec::find_builtin(scenario_name);
      if (!s) {
        std::cerr << "error: unknown scenario '" << scenario_name << "' (try `thinspec list`)\n";
        return 2;
      }
      thinspec::run_scenario(*s, thinspec::resolve_output_dir(run_out), std::cout);
    } else if (*manifest) {
      const auto scenarios = thinspec::load_manifest(manifest_path);
      thinspec::RunOptions opts;
      opts.jobs = jobs;
      opts.out_dir = thinspec::resolve_output_dir(manifest_out);
      const int failures = thinspec::run_manifest(scenarios, opts, std::cout, std::cerr);
      if (failures) {
        std::cerr << failures << " of " << scenarios.size() << " scenarios failed\n";
        return 1;
      }
    } else if (*list) {
      for (const auto& s : thinspec::builtin_scenarios()) {
        std::printf("%-14s %-16s %s\n", s.name.c_str(), std::string(thinspec::to_string(s.model)).c_str(),
                    s.uses_state() ? std::string(thinspec::to_string(s.state)).c_str() : "-");
      }
    } else if (*params) {
      const auto p = thinspec::derive_params_from_trap_length(a_s, a_ho, omega, rho, N);
      print_row("M", p.M, "kg");
      print_row("u_tilde", p.u_tilde, "J");
      print_row("u_tilde/hw", p.u_tilde / (thinspec::units::hbar * omega), "");
      print_row("N_eff", p.N_eff, "");
      print_row("hbar/u_tilde", p.time_unit(), "s");
      print_row("t_c estimate", thinspec::collapse_time_estimate(p), "s");
    }
  } catch (const thinspec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
