#include "thinspec/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "thinspec/dynamics.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/husimi.hpp"
#include "thinspec/thin_spectrum.hpp"
#include "thinspec/units.hpp"

namespace thinspec {

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::OrderParameter: return "order-parameter";
    case ModelKind::QFunction: return "q-function";
    case ModelKind::ThinTwoState: return "thin-two-state";
    case ModelKind::Quasiparticle: return "quasiparticle";
    case ModelKind::MultiSymmetry: return "multi-symmetry";
  }
  return "unknown";
}

std::string_view to_string(StateKind k) noexcept {
  switch (k) {
    case StateKind::Coherent: return "coherent";
    case StateKind::Squeezed: return "squeezed";
    case StateKind::Thermal: return "thermal";
    case StateKind::ThermalCoherent: return "thermal-coherent";
  }
  return "unknown";
}

namespace {

[[noreturn]] void invalid(const Scenario& s, std::string_view field, const std::string& what) {
  throw Error(Errc::Config, "scenario '" + s.name + "': field '" + std::string(field) + "' " + what);
}

bool safe_stem(const std::string& t) {
  if (t.empty() || t.front() == '.') return false;
  return std::all_of(t.begin(), t.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

void require_time_window(const Scenario& s) {
  if (!(s.t_max > 0.0)) invalid(s, "t_max", "must be > 0");
  if (s.n_points < 2) invalid(s, "n_points", "must be >= 2");
}

void require_single_temperature(const Scenario& s) {
  if (s.beta && !s.T_nK.empty()) invalid(s, "beta", "conflicts with T_nK; give one of them");
  if (!s.beta && s.T_nK.size() != 1) invalid(s, "T_nK", "needs exactly one temperature (or give beta)");
  if (s.beta && !(*s.beta > 0.0)) invalid(s, "beta", "must be > 0");
  if (!s.T_nK.empty() && !(s.T_nK[0] > 0.0)) invalid(s, "T_nK", "must be > 0");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string temperature_label(double T) {
  std::string t = fmt(T);
  std::replace(t.begin(), t.end(), '.', 'p');
  return "T" + t + "nK";
}

std::string optional_time(const std::optional<double>& t) { return t ? fmt(*t) : std::string("none"); }

// Column-oriented CSV with a '#' metadata block.
struct Table {
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> columns;

  void add(std::string name, Eigen::VectorXd col) {
    names.push_back(std::move(name));
    columns.push_back(std::move(col));
  }
};

struct Context {
  const Scenario& s;
  std::optional<PhysicalParams> params;
  std::vector<std::string> meta;  // derived quantities for the header
  ScenarioOutput out;

  explicit Context(const Scenario& sc) : s(sc) {
    if (s.trap) {
      const auto& t = *s.trap;
      params = derive_params_from_trap_length(t.a_s, t.a_ho, t.omega_tr, t.rho, t.N);
    }
  }

  void summary(const std::string& line) { out.summary.push_back(s.name + " " + line); }

  std::string header() const {
    std::ostringstream h;
    h << "# thinspec " << kVersion << "\n";
    h << "# scenario = " << s.name << "\n";
    h << "# model = " << to_string(s.model) << "\n";
    if (s.uses_state()) h << "# state = " << to_string(s.state) << "\n";
    if (!s.occupation.empty()) {
      h << "# occupation =";
      for (std::size_t k = 0; k < s.occupation.size(); ++k) h << (k ? ", " : " ") << to_string(s.occupation[k]);
      h << "\n";
    }
    for (const auto& [key, value] : s.echo) h << "# " << key << " = " << value << "\n";
    for (const auto& line : meta) h << "# " << line << "\n";
    return h.str();
  }

  std::size_t header_lines() const {
    const std::string h = header();
    return static_cast<std::size_t>(std::count(h.begin(), h.end(), '\n')) + 1;  // + column row
  }

  void write_table(const Table& t) {
    std::ostringstream c;
    c << header();
    for (std::size_t k = 0; k < t.names.size(); ++k) c << (k ? "," : "") << t.names[k];
    c << "\n";
    const Eigen::Index rows = t.columns.empty() ? 0 : t.columns[0].size();
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < t.columns.size(); ++k) c << (k ? "," : "") << fmt(t.columns[k][r]);
      c << "\n";
    }
    out.csv = c.str();
  }

  // Line plot of every column from `first_y` on against column 1.
  void line_plot(const Table& t, std::size_t first_y, const std::string& xlabel, const std::string& ylabel,
                 bool log_y = false) {
    const std::string file = s.output_stem() + ".csv";
    std::ostringstream g;
    g << "# gnuplot script for " << file << "\n";
    g << "set datafile separator ','\n";
    g << "set key autotitle columnhead\n";
    g << "set xlabel '" << xlabel << "'\n";
    g << "set ylabel '" << ylabel << "'\n";
    if (log_y) g << "set logscale y\n";
    g << "plot";
    for (std::size_t k = first_y; k < t.names.size(); ++k) {
      g << (k == first_y ? " '" + file + "'" : ", ''") << " using 1:" << (k + 1) << " with lines";
    }
    g << "\n";
    out.plot_script = g.str();
  }
};

Eigen::VectorXd seconds(const Eigen::VectorXd& t, double unit) { return t * unit; }

// ---------------------------------------------------------------------------

void compute_order_parameter(Context& ctx) {
  const Scenario& s = ctx.s;
  const Eigen::VectorXd tau = uniform_times(s.t_max, s.n_points);
  std::vector<std::pair<std::string, DecaySeries>> curves;

  auto run_state = [&](const std::string& label, const FockVector& state) {
    const Spectrum spectrum = Spectrum::interaction_only(state.n_max());
    curves.emplace_back(label, order_parameter_series(state, spectrum, tau));
  };

  switch (s.state) {
    case StateKind::Coherent:
      run_state("coherent", coherent_state(s.alpha, s.tol));
      break;
    case StateKind::Squeezed:
      for (std::size_t k = 0; k < s.zeta.size(); ++k) {
        run_state(s.zeta_labels[k], squeezed_state(SqueezeSpec::from_zeta(s.alpha, s.zeta[k]), s.tol));
      }
      break;
    case StateKind::ThermalCoherent:
      for (double T : s.T_nK) {
        const double beta = units::inverse_temperature(T, ctx.params->u_tilde);
        std::vector<double> energies;
        for (int n = 0;; ++n) {
          energies.push_back(0.5 * (double(n) * n - n));
          if (n > 2 && beta * energies.back() > 60.0) break;
        }
        const NumberEnsemble ens = thermal_ensemble(beta, energies, s.alpha, s.tol);
        const Spectrum spectrum = Spectrum::interaction_only(ens.n_max());
        curves.emplace_back(temperature_label(T), order_parameter_thermal_coherent(ens, spectrum, tau));
        ctx.meta.push_back(temperature_label(T) + ": members = " + std::to_string(ens.members.size()) +
                           ", beta_u = " + fmt(beta));
      }
      break;
    case StateKind::Thermal:
      break;
  }

  Table t;
  t.add("tau", tau);
  std::size_t first_y = 1;
  if (ctx.params) {
    ctx.meta.push_back("time_unit_s = " + fmt(ctx.params->time_unit()));
    ctx.meta.push_back("N_eff = " + fmt(ctx.params->N_eff));
    t.add("t_s", seconds(tau, ctx.params->time_unit()));
    first_y = 2;
  }
  for (const auto& [label, series] : curves) {
    t.add("abs_a_" + label, series.magnitudes());
    ctx.summary("abs_a_" + label + ": collapse=" + optional_time(series.collapse_time) +
                " revival=" + optional_time(series.revival_time));
  }
  ctx.write_table(t);
  ctx.line_plot(t, first_y, "t u/hbar", "|<a>|");
}

void compute_q_function(Context& ctx) {
  const Scenario& s = ctx.s;
  std::vector<Complex> zetas = s.zeta;
  std::vector<std::string> labels = s.zeta_labels;
  if (s.state == StateKind::Coherent) {
    zetas = {Complex{}};
    labels = {"coherent"};
  }
  QGrid grid = default_q_grid(s.alpha, s.grid_points);
  if (s.q_extent) {
    grid.re = Eigen::VectorXd::LinSpaced(s.grid_points, -*s.q_extent, *s.q_extent);
    grid.im = grid.re;
  }
  const double unit = ctx.params ? ctx.params->time_unit() : 0.0;
  if (ctx.params) ctx.meta.push_back("time_unit_s = " + fmt(unit));
  ctx.meta.push_back("blocks are separated by two blank lines, grid rows by one");

  std::ostringstream body;
  std::vector<std::string> block_titles;
  for (std::size_t z = 0; z < zetas.size(); ++z) {
    const FockVector state = squeezed_state(SqueezeSpec::from_zeta(s.alpha, zetas[z]), s.tol);
    const Spectrum spectrum = Spectrum::interaction_only(state.n_max());
    for (double tau : s.q_times) {
      const QField f = husimi_q(state, spectrum, tau, grid);
      const RingStatistics ring = ring_angular_variation(state, spectrum, tau);
      if (!block_titles.empty()) body << "\n\n";
      block_titles.push_back(labels[z] + " tau=" + fmt(tau));
      for (Eigen::Index i = 0; i < grid.re.size(); ++i) {
        if (i) body << "\n";
        for (Eigen::Index j = 0; j < grid.im.size(); ++j) {
          body << fmt(zetas[z].real()) << "," << fmt(zetas[z].imag()) << "," << fmt(tau);
          if (ctx.params) body << "," << fmt(tau * unit);
          body << "," << fmt(grid.re[i]) << "," << fmt(grid.im[j]) << "," << fmt(f.values(i, j)) << "\n";
        }
      }
      ctx.summary(labels[z] + " tau=" + fmt(tau) + ": normalization=" + fmt(f.normalization) +
                  " ring_radius=" + fmt(ring.radius) + " ring_cv=" + fmt(ring.coefficient_of_variation));
    }
  }

  std::ostringstream c;
  c << ctx.header();
  c << "zeta_re,zeta_im,tau" << (ctx.params ? ",t_s" : "") << ",re_gamma,im_gamma,q\n";
  c << body.str();
  ctx.out.csv = c.str();

  const std::size_t col = ctx.params ? 5 : 4;
  const std::string file = s.output_stem() + ".csv";
  std::ostringstream g;
  g << "# gnuplot script for " << file << "\n";
  g << "set datafile separator ','\n";
  g << "set pm3d map\nset size ratio -1\n";
  g << "set xlabel 'Re gamma'\nset ylabel 'Im gamma'\n";
  g << "set multiplot layout 1," << block_titles.size() << "\n";
  for (std::size_t k = 0; k < block_titles.size(); ++k) {
    g << "set title '" << block_titles[k] << "'\n";
    g << "splot '" << file << "' skip " << ctx.header_lines() << " index " << k << " using " << col << ":"
      << col + 1 << ":" << col + 2 << " notitle\n";
  }
  g << "unset multiplot\n";
  ctx.out.plot_script = g.str();
}

// Thin spectra in units where the temperature sets the energy scale when
// T_nK is given (beta = 1, time unit hbar / k_B T).
double thin_beta(Context& ctx, std::optional<double>& unit_s) {
  const Scenario& s = ctx.s;
  if (s.beta) return *s.beta;
  unit_s = units::hbar / (units::k_B * s.T_nK[0] * units::nano_kelvin);
  ctx.meta.push_back("time_unit_s = " + fmt(*unit_s) + " (hbar / k_B T)");
  return 1.0;
}

void compute_thin_two_state(Context& ctx) {
  const Scenario& s = ctx.s;
  std::optional<double> unit_s;
  ThinSpectrumModel model;
  model.inertia = s.inertia;
  model.delta = s.delta[0];
  model.beta = thin_beta(ctx, unit_s);
  const Eigen::VectorXd t = uniform_times(s.t_max, s.n_points);
  const OffDiagSeries closed = reduced_offdiag_two_state(model, t);
  const OffDiagSeries oracle = reduced_offdiag_two_state_oracle(model, default_p_grid(model), t);
  ctx.meta.push_back("t_c = beta / |delta| = " + fmt(closed.collapse_scale));

  Table tab;
  tab.add("x", t / closed.collapse_scale);
  tab.add("t", t);
  if (unit_s) tab.add("t_s", seconds(t, *unit_s));
  tab.add("magnitude", closed.magnitudes);
  tab.add("oracle", oracle.magnitudes);
  ctx.summary("half-power collapse=" + optional_time(closed.collapse_time) +
              " oracle=" + optional_time(oracle.collapse_time) +
              " max_deviation=" + fmt((closed.magnitudes - oracle.magnitudes).cwiseAbs().maxCoeff()));
  ctx.write_table(tab);
  ctx.line_plot(tab, unit_s ? 3 : 2, "t / t_c", "|rho_od(t)| / |rho_od(0)|");
}

void compute_multi_symmetry(Context& ctx) {
  const Scenario& s = ctx.s;
  std::optional<double> unit_s;
  const double beta = thin_beta(ctx, unit_s);
  const Eigen::VectorXd t = uniform_times(s.t_max, s.n_points);
  Table tab;
  tab.add("t", t);
  if (unit_s) tab.add("t_s", seconds(t, *unit_s));
  Eigen::VectorXd joint = Eigen::VectorXd::Ones(t.size());
  std::vector<double> scales;
  for (double d : s.delta) {
    ThinSpectrumModel model{s.inertia, d, 0.0, beta};
    const OffDiagSeries c = reduced_offdiag_two_state(model, t);
    joint = joint.cwiseProduct(c.magnitudes);
    scales.push_back(c.collapse_scale);
    std::string label = fmt(d);
    std::replace(label.begin(), label.end(), '.', 'p');
    std::replace(label.begin(), label.end(), '-', 'm');
    tab.add("mag_delta" + label, c.magnitudes);
    ctx.summary("delta=" + fmt(d) + ": half-power collapse=" + optional_time(c.collapse_time));
  }
  tab.add("joint", joint);
  const auto joint_collapse = first_crossing_below(t, joint, kHalfPowerThreshold);
  ctx.summary("joint: half-power collapse=" + optional_time(joint_collapse) +
              " combined_scale=" + fmt(combine_collapse_times(scales)));
  ctx.write_table(tab);
  ctx.line_plot(tab, unit_s ? 2 : 1, "t", "|rho_od(t)| / |rho_od(0)|");
}

void compute_quasiparticle(Context& ctx) {
  const Scenario& s = ctx.s;
  CondensateLevels lv;
  std::optional<double> unit_s;
  if (ctx.params) {
    const double e_unit = units::hbar * ctx.params->omega_tr;
    lv.N0 = s.N0.value_or(ctx.params->N);
    lv.u0rho0 = s.u0rho0.value_or(ctx.params->mu / e_unit);
    lv.beta = s.beta ? *s.beta : units::inverse_temperature(s.T_nK[0], e_unit);
    unit_s = 1.0 / ctx.params->omega_tr;
    ctx.meta.push_back("energy_unit = hbar omega_tr, time_unit_s = " + fmt(*unit_s));
  } else {
    lv.N0 = *s.N0;
    lv.u0rho0 = *s.u0rho0;
    lv.beta = *s.beta;
  }
  lv.omega = s.omega_qp;
  ctx.meta.push_back("N0 = " + fmt(lv.N0) + ", u0rho0 = " + fmt(lv.u0rho0) + ", beta = " + fmt(lv.beta));
  const double t_c = lv.collapse_scale() / s.m;
  ctx.meta.push_back("t_c = N0 beta / m = " + fmt(t_c));

  const Eigen::VectorXd t = uniform_times(s.t_max, s.n_points);
  Table tab;
  tab.add("x", t / t_c);
  tab.add("t", t);
  if (unit_s) tab.add("t_s", seconds(t, *unit_s));
  for (StateKind occ : s.occupation) {
    if (occ == StateKind::Thermal) {
      const OffDiagSeries c = quasiparticle_offdiag_thermal(lv, t, s.m);
      tab.add("mag_thermal", c.magnitudes);
      ctx.summary("thermal: collapse=" + optional_time(c.collapse_time));
      if (s.oracle) {
        const OffDiagSeries o = quasiparticle_offdiag_thermal_oracle(lv, t, s.m);
        tab.add("mag_thermal_oracle", o.magnitudes);
        ctx.summary("thermal oracle: collapse=" + optional_time(o.collapse_time) +
                    " max_deviation=" + fmt((c.magnitudes - o.magnitudes).cwiseAbs().maxCoeff()));
      }
    } else {
      const OffDiagSeries c = quasiparticle_offdiag_thermal_coherent(lv, s.alpha, t, s.tol);
      tab.add("mag_thermal_coherent", c.magnitudes);
      ctx.summary("thermal-coherent: collapse=" + optional_time(c.collapse_time));
    }
  }
  ctx.write_table(tab);
  ctx.line_plot(tab, unit_s ? 3 : 2, "t / t_c", "|rho_od(t)| / |rho_od(0)|");
}

}  // namespace

void Scenario::validate() const {
  if (name.empty()) throw Error(Errc::Config, "scenario without 'name'");
  if (!safe_stem(name)) invalid(*this, "name", "may only contain letters, digits, '_', '-' and '.'");
  if (!output.empty() && !safe_stem(output)) invalid(*this, "output", "must be a plain file stem");
  if (!(tol >= kMinTruncationTol && tol <= kMaxTruncationTol)) invalid(*this, "tol", "must lie in [1e-15, 1e-3]");
  for (double T : T_nK) {
    if (!(T > 0.0)) invalid(*this, "T_nK", "must be > 0");
  }
  for (const auto& z : zeta) {
    if (!(std::abs(z) < 1.0)) invalid(*this, "zeta", "needs |zeta| < 1");
  }

  switch (model) {
    case ModelKind::OrderParameter:
      require_time_window(*this);
      if (state == StateKind::Thermal) invalid(*this, "state", "'thermal' has a vanishing order parameter");
      if (state == StateKind::Squeezed && zeta.empty()) invalid(*this, "zeta", "is required for squeezed states");
      if (state == StateKind::ThermalCoherent) {
        if (T_nK.empty()) invalid(*this, "T_nK", "is required for thermal-coherent states");
        if (!trap) invalid(*this, "a_s", "trap parameters are required to convert T_nK");
      }
      if (state != StateKind::ThermalCoherent && alpha == Complex{}) invalid(*this, "alpha", "must be nonzero");
      break;
    case ModelKind::QFunction:
      if (state != StateKind::Coherent && state != StateKind::Squeezed) {
        invalid(*this, "state", "must be coherent or squeezed for q-function");
      }
      if (state == StateKind::Squeezed && zeta.empty()) invalid(*this, "zeta", "is required for squeezed states");
      if (q_times.empty()) invalid(*this, "q_times", "is required");
      for (double q : q_times) {
        if (!(q >= 0.0)) invalid(*this, "q_times", "must be >= 0");
      }
      if (grid_points < 11) invalid(*this, "grid_points", "must be >= 11");
      if (q_extent && !(*q_extent > 0.0)) invalid(*this, "q_extent", "must be > 0");
      break;
    case ModelKind::ThinTwoState:
    case ModelKind::MultiSymmetry:
      require_time_window(*this);
      require_single_temperature(*this);
      if (delta.empty()) invalid(*this, "delta", "is required");
      if (model == ModelKind::ThinTwoState && delta.size() != 1) {
        invalid(*this, "delta", "takes one value for thin-two-state (use multi-symmetry for several)");
      }
      for (double d : delta) {
        if (d == 0.0 || !(std::abs(d) < 1.0)) invalid(*this, "delta", "needs 0 < |delta| < 1");
      }
      if (!(inertia > 0.0)) invalid(*this, "inertia", "must be > 0");
      break;
    case ModelKind::Quasiparticle:
      require_time_window(*this);
      require_single_temperature(*this);
      if (!trap) {
        if (!N0) invalid(*this, "N0", "is required without trap parameters");
        if (!u0rho0) invalid(*this, "u0rho0", "is required without trap parameters");
        if (!beta) invalid(*this, "beta", "is required without trap parameters");
      }
      if (N0 && !(*N0 >= 1.0)) invalid(*this, "N0", "must be >= 1");
      if (u0rho0 && !(*u0rho0 > 0.0)) invalid(*this, "u0rho0", "must be > 0");
      if (occupation.empty()) invalid(*this, "occupation", "is required");
      for (StateKind o : occupation) {
        if (o != StateKind::Thermal && o != StateKind::ThermalCoherent) {
          invalid(*this, "occupation", "accepts thermal and thermal-coherent");
        }
        if (o == StateKind::ThermalCoherent && alpha == Complex{}) {
          invalid(*this, "alpha", "must be nonzero for thermal-coherent occupation");
        }
      }
      if (m < 1) invalid(*this, "m", "must be >= 1");
      if (N0 && !(m < *N0)) invalid(*this, "m", "must be below N0");
      if (!(omega_qp >= 0.0)) invalid(*this, "omega_qp", "must be >= 0");
      break;
  }
}

ScenarioOutput compute_scenario(const Scenario& s) {
  s.validate();
  Context ctx(s);
  switch (s.model) {
    case ModelKind::OrderParameter: compute_order_parameter(ctx); break;
    case ModelKind::QFunction: compute_q_function(ctx); break;
    case ModelKind::ThinTwoState: compute_thin_two_state(ctx); break;
    case ModelKind::Quasiparticle: compute_quasiparticle(ctx); break;
    case ModelKind::MultiSymmetry: compute_multi_symmetry(ctx); break;
  }
  return std::move(ctx.out);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw Error(Errc::Io, "write failed for '" + path.string() + "'");
}

}  // namespace

void write_outputs(const Scenario& s, const ScenarioOutput& o, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
  write_file(dir / (s.output_stem() + ".csv"), o.csv);
  write_file(dir / (s.output_stem() + ".gp"), o.plot_script);
}

void run_scenario(const Scenario& s, const std::string& out_dir, std::ostream& out) {
  const ScenarioOutput o = compute_scenario(s);
  write_outputs(s, o, out_dir);
  for (const auto& line : o.summary) out << line << "\n";
}

std::string resolve_output_dir(const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (const char* env = std::getenv("THINSPEC_OUT"); env && *env) return env;
  return ".";
}

}  // namespace thinspec
