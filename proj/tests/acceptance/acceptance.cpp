// Acceptance checks: one PASS/FAIL line per criterion.
//
// usage: acceptance [--expect-red K[,K...]]
// Exit status is 0 when the set of failing criteria equals the expected-red set.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "thinspec/dynamics.hpp"
#include "thinspec/husimi.hpp"
#include "thinspec/scenario.hpp"
#include "thinspec/thin_spectrum.hpp"
#include "thinspec/units.hpp"

using namespace thinspec;

namespace {

std::set<int> failed;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] %2d  %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) failed.insert(id);
}

void info(const std::string& what) { std::printf("           %s\n", what.c_str()); }

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Reference 100-atom trap of the figures.
PhysicalParams figure_trap() { return derive_params_from_trap_length(10e-9, 1e-6, 100.0, 1e21, 100.0); }

template <typename F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void criterion1() {
  const auto p = derive_params_from_trap_length(10e-9, 1e-6, 100.0, 1e21, 1e6);
  const double tc = collapse_time_estimate(p);
  report(1, tc >= 0.05 && tc <= 0.15, fmt("collapse-time estimate t_c = %.4g s (accept [0.05, 0.15] s)", tc));
}

void criterion2() {
  const auto state = coherent_state({10, 0}, 1e-14);
  const auto spec = Spectrum::interaction_only(state.n_max());
  const Eigen::VectorXd t = uniform_times(7.0, 2000);
  const auto series = order_parameter_series(state, spec, t);
  const auto exact = order_parameter_coherent_exact(100.0, 0.0, t);
  const double dev = (series.values - exact.values).cwiseAbs().maxCoeff();
  Eigen::VectorXd rev(2);
  rev << 0.0, 2 * units::pi;
  const double at_revival = std::abs(order_parameter_series(state, spec, rev).values[1]);
  const bool ok = dev <= 1e-8 * 10.0 && std::abs(at_revival - 10.0) <= 1e-9;
  report(2, ok, fmt("series vs exact: max |diff| = %.3g (tol 1e-7); |<a>|(2 pi) - 10 = %.3g (tol 1e-9)", dev,
                    at_revival - 10.0));
}

void criterion3() {
  const Eigen::VectorXd t = uniform_times(0.03, 3001);
  const auto exact = order_parameter_coherent_exact(100.0, 0.0, t);
  const auto gauss = order_parameter_short_time(100.0, 0.0, t);
  const double dev = (exact.values - gauss.values).cwiseAbs().maxCoeff();
  report(3, dev <= 0.005 * 10.0, fmt("short-time Gaussian: max |diff| = %.3g for tau <= 0.03 (tol 0.05)", dev));
}

double efold(Complex zeta) {
  const auto s = squeezed_state(SqueezeSpec::from_zeta({10, 0}, zeta), 1e-13);
  return extract_collapse_time(
      order_parameter_series(s, Spectrum::interaction_only(s.n_max()), uniform_times(0.5, 5001)));
}

void criterion4() {
  const double t0 = efold({0, 0});
  const double t05 = efold({0.5, 0});
  const double t09 = efold({0.9, 0});
  const double t05i = efold({0, 0.5});
  const double tm05 = efold({-0.5, 0});
  const double m = 1.01;
  const bool ok = t09 > m * t05 && t05 > m * t0 && t05i * m < t0 && tm05 * m < t0;
  report(4, ok, "squeezing ordering t(0.9) > t(0.5) > t(0), t(0.5i) < t(0), t(-0.5) < t(0), 1% margin");
  info(fmt("t(0) = %.5g, t(0.5) = %.5g, t(0.9) = %.5g", t0, t05, t09));
  info(fmt("t(0.5i) = %.5g, t(-0.5) = %.5g", t05i, tm05));
}

NumberEnsemble figure6_ensemble(double T_nK, const PhysicalParams& p) {
  const double beta = units::inverse_temperature(T_nK, p.u_tilde);
  std::vector<double> e;
  for (int n = 0;; ++n) {
    e.push_back(0.5 * (double(n) * n - n));
    if (n > 2 && beta * e.back() > 60.0) break;
  }
  return thermal_ensemble(beta, e, {10, 0}, 1e-12);
}

void criterion5() {
  const auto p = figure_trap();
  const std::vector<double> temps{0.001, 1, 10, 100, 1000};
  std::vector<double> times;
  for (double T : temps) {
    const auto ens = figure6_ensemble(T, p);
    times.push_back(extract_collapse_time(order_parameter_thermal_coherent(
        ens, Spectrum::interaction_only(ens.n_max()), uniform_times(0.3, 6001))));
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < times.size(); ++k) decreasing = decreasing && times[k] < times[k - 1];
  const auto cold = figure6_ensemble(0.001, p);
  bool halves = cold.members.size() == 2;
  double dev = std::numeric_limits<double>::infinity();
  if (halves) {
    dev = std::max(std::abs(cold.members[0].weight - 0.5), std::abs(cold.members[1].weight - 0.5));
    halves = dev <= 1e-12 && cold.members[0].level == 0 && cold.members[1].level == 1;
  }
  report(5, decreasing && halves,
         fmt("thermal-coherent e-folding strictly decreasing in T; T->0 weights (1/2, 1/2) within %.1g "
             "(%g members)",
             dev, double(cold.members.size())));
  info(fmt("t(0.001 nK) = %.5g, t(1 nK) = %.5g, t(10 nK) = %.5g", times[0], times[1], times[2]));
  info(fmt("t(100 nK) = %.5g, t(1000 nK) = %.5g", times[3], times[4]));
}

void criterion6() {
  ThinSpectrumModel unit{1.0, 0.1, 0.0, 1.0};
  const Eigen::VectorXd t = uniform_times(100.0, 2001);
  const auto closed = reduced_offdiag_two_state(unit, t);
  const auto oracle = reduced_offdiag_two_state_oracle(unit, default_p_grid(unit), t);
  const double dev = (closed.magnitudes - oracle.magnitudes).cwiseAbs().maxCoeff();
  double dev16 = 0.0;
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    const double x = t[k] * unit.delta / unit.beta;
    dev16 = std::max(dev16, std::abs(std::pow(1.0 + 16.0 * x * x, -0.25) - oracle.magnitudes[k]));
  }

  const double hbar_beta_100nK = units::hbar / (units::k_B * 100.0 * units::nano_kelvin);
  const double tc_100 = hbar_beta_100nK / 0.1;
  const double delta_tf = delta_thomas_fermi(1e6, 1e3).exact;
  const double tc_tf = hbar_beta_100nK / delta_tf;
  const bool tf_ok = std::round(std::log10(tc_tf)) == -1.0;
  const bool ok = dev <= 1e-6 && tc_100 >= 2e-4 && tc_100 <= 5e-3 && tf_ok;
  report(6, ok, fmt("two-state closed form vs p-grid oracle max |diff| = %.3g (tol 1e-6); t_c(100 nK, 0.1) = %.3g s",
                    dev, tc_100));
  info(fmt("Thomas-Fermi delta = %.4g -> t_c = %.3g s (order of magnitude 1e-1)", delta_tf, tc_tf));
  info(fmt("half-power collapse time at 100 nK, delta 0.1: %.3g s", *closed.collapse_time * hbar_beta_100nK));
  info(fmt("uncorrected form (1 + 16 t^2 delta^2 / beta^2)^{-1/4} vs oracle: max |diff| = %.3g", dev16));
}

void criterion7() {
  // Closed form vs discrete oracle.
  CondensateLevels lv{1e4, 1.0, 0.0, 0.01};
  const double tc = quasiparticle_collapse_time_closed_form(lv);
  const Eigen::VectorXd t = uniform_times(4.0 * tc, 2001);
  const double dev = (quasiparticle_offdiag_thermal(lv, t).magnitudes -
                      quasiparticle_offdiag_thermal_oracle(lv, t).magnitudes)
                         .cwiseAbs()
                         .maxCoeff();

  // hbar N0 / k_B T across the quoted condensate range.
  bool band = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double N0 : {1e6, 1e8}) {
    for (double T : {10.0, 100.0}) {
      const double s = N0 * units::hbar / (units::k_B * T * units::nano_kelvin);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      const double order = std::round(std::log10(s));
      band = band && order >= 2.0 && order <= 5.0;
    }
  }

  const double r = quasiparticle_collapse_scaling(lv, 2) / quasiparticle_collapse_scaling(lv, 1);

  // Slopes from the closed form where beta N0 u0rho0 << 1.
  auto tc_of = [](double N0, double beta) {
    return quasiparticle_collapse_time_closed_form(CondensateLevels{N0, 1e-9, 0.0, beta});
  };
  const double slope_n = std::log10(tc_of(1e5, 1.0) / tc_of(1e4, 1.0));
  const double slope_t = std::log10(tc_of(1e4, 0.1) / tc_of(1e4, 1.0));  // T grows tenfold
  const bool slopes = std::abs(slope_n - 1.0) <= 0.02 && std::abs(slope_t + 1.0) <= 0.02;

  const bool ok = dev <= 1e-5 && band && std::abs(r - 0.5) <= 0.025 && slopes;
  report(7, ok, fmt("quasi-particle closed form vs oracle at N0 = 1e4: max |diff| = %.3g (tol 1e-5)", dev));
  info(fmt("hbar N0 / k_B T spans %.3g .. %.3g s (nearest decades within 1e2..1e5)", lo, hi));
  info(fmt("t_c(m=2) / t_c(m=1) = %.5f (accept 0.5 +- 5%%)", r));
  info(fmt("log-log slope vs N0 = %.5f, vs T = %.5f (accept +1, -1 within 2%%)", slope_n, slope_t));
}

void criterion8() {
  const auto p = figure_trap();
  const double e_unit = units::hbar * p.omega_tr;
  auto levels = [&](double T) {
    return CondensateLevels{p.N, p.mu / e_unit, 0.0, units::inverse_temperature(T, e_unit)};
  };
  const Eigen::VectorXd t = uniform_times(0.5, 10001);
  auto thermal = [&](double T) { return *quasiparticle_offdiag_thermal_oracle(levels(T), t).collapse_time; };
  auto coherent = [&](double T) {
    return *quasiparticle_offdiag_thermal_coherent(levels(T), {10, 0}, t).collapse_time;
  };
  const double th10 = thermal(10), th100 = thermal(100);
  const double tc10 = coherent(10), tc100 = coherent(100);
  const double r_th = th10 / th100;
  const double r_tc = tc10 / tc100;
  report(8, r_th > r_tc,
         fmt("t(10 nK)/t(100 nK): pure thermal %.4g > thermal-coherent %.4g", r_th, r_tc));
  info(fmt("thermal: %.4g, %.4g; thermal-coherent: %.4g (units 1/omega_tr)", th10, th100, tc10));
  info(fmt("thermal-coherent at 100 nK: %.4g", tc100));
}

void criterion9() {
  std::vector<ThinSpectrumModel> models{{1.0, 0.1, 0.2, 1.0}, {1.5, 0.05, -0.4, 1.0}};
  std::vector<Eigen::VectorXd> grids{default_p_grid(models[0], 2001), default_p_grid(models[1], 2001)};
  const Eigen::VectorXd t = uniform_times(60.0, 13);
  const auto joint = multi_thin_spectra_offdiag_oracle(models, grids, t);
  const auto a = reduced_offdiag_two_state_oracle(models[0], grids[0], t);
  const auto b = reduced_offdiag_two_state_oracle(models[1], grids[1], t);
  const double dev = (joint.magnitudes - a.magnitudes.cwiseProduct(b.magnitudes)).cwiseAbs().maxCoeff();
  const double tt = 0.7316;
  const bool exact_half = combine_collapse_times(std::vector<double>{tt, tt}) == tt / 2;
  report(9, dev <= 1e-8 && exact_half,
         fmt("joint oracle vs product of marginals max |diff| = %.3g (tol 1e-8); combine([t,t]) == t/2: %g", dev,
             exact_half ? 1.0 : 0.0));
}

void criterion10() {
  const auto state = squeezed_state(SqueezeSpec::from_zeta({10, 0}, {0.5, 0}), 1e-13);
  const auto spec = Spectrum::interaction_only(state.n_max());
  const QGrid grid = default_q_grid({10, 0}, 201);
  std::vector<double> cv;
  double worst_norm = 0.0;
  for (double tau : {0.0, 0.02, 0.10, 0.40}) {
    cv.push_back(ring_angular_variation(state, spec, tau).coefficient_of_variation);
    worst_norm = std::max(worst_norm, std::abs(husimi_q(state, spec, tau, grid).normalization - 1.0));
  }
  bool monotone = true;
  for (std::size_t k = 1; k < cv.size(); ++k) monotone = monotone && cv[k] < cv[k - 1];
  const bool ok = monotone && cv.back() < 0.1 && worst_norm <= 1e-3;
  report(10, ok, fmt("ring CV at tau = 0.40 is %.4g (needs < 0.1); monotone drop: %g; worst |norm - 1| = %.2g",
                     cv.back(), monotone ? 1.0 : 0.0, worst_norm));
  info(fmt("CV at tau = 0, 0.02, 0.10: %.4g, %.4g, %.4g", cv[0], cv[1], cv[2]));
  const double u_over_hw = figure_trap().u_tilde / (units::hbar * 100.0);
  const double tau_alt = 0.40 * u_over_hw;
  info(fmt("CV at tau = %.4g (t omega_tr = 0.40 with u_tilde = %.4g hbar omega_tr): %.4g", tau_alt, u_over_hw,
           ring_angular_variation(state, spec, tau_alt).coefficient_of_variation));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion11() {
  const auto scenarios = load_manifest(std::string(THINSPEC_SOURCE_DIR) + "/manifests/paper-figures.manifest");
  const auto root = std::filesystem::temp_directory_path() / "thinspec_acceptance";
  std::filesystem::remove_all(root);
  std::ostringstream o1, o4, e1, e4;
  const int f1 = run_manifest(scenarios, RunOptions{1, (root / "jobs1").string()}, o1, e1);
  const int f4 = run_manifest(scenarios, RunOptions{4, (root / "jobs4").string()}, o4, e4);
  std::size_t files = 0;
  bool same = f1 == 0 && f4 == 0 && o1.str() == o4.str();
  for (const auto& entry : std::filesystem::directory_iterator(root / "jobs1")) {
    ++files;
    const auto other = root / "jobs4" / entry.path().filename();
    same = same && std::filesystem::exists(other) && slurp(entry.path()) == slurp(other);
  }
  std::size_t files4 = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(root / "jobs4")) ++files4;
  same = same && files == files4 && files == 2 * scenarios.size();
  report(11, same, fmt("--jobs 4 output byte-identical to --jobs 1 (%g files, %g scenarios)", double(files),
                       double(scenarios.size())));
  if (f1 || f4) info(e1.str() + e4.str());
  std::filesystem::remove_all(root);
}

std::set<int> parse_ids(const char* text) {
  std::set<int> ids;
  std::stringstream s(text);
  std::string tok;
  while (std::getline(s, tok, ',')) ids.insert(std::stoi(tok));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_red;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--expect-red") == 0 && k + 1 < argc) {
      expect_red = parse_ids(argv[++k]);
    } else {
      std::fprintf(stderr, "usage: %s [--expect-red K[,K...]]\n", argv[0]);
      return 2;
    }
  }

  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  guarded(10, criterion10);
  guarded(11, criterion11);

  std::printf("%zu of 11 criteria pass", 11 - failed.size());
  if (!expect_red.empty()) {
    std::printf("; expected red:");
    for (int id : expect_red) std::printf(" %d", id);
  }
  std::printf("\n");
  return failed == expect_red ? 0 : 1;
}
