#pragma once

// Zero-mode dynamics: Fock spectra, order-parameter trajectories <a(t)> and
// collapse/revival extraction. Internal units: hbar = 1, energies in units
// of u_tilde, time in units of hbar/u_tilde. SI only enters via PhysicalParams.

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "thinspec/states.hpp"

namespace thinspec {

/// Trap and interaction parameters in SI units plus the derived couplings.
struct PhysicalParams {
  double a_s{0};       // s-wave scattering length [m]
  double M{0};         // atomic mass [kg]
  double a_ho{0};      // trap length sqrt(hbar / (M omega_tr)) [m]
  double omega_tr{0};  // trap angular frequency [1/s]
  double rho{0};       // density [1/m^3]
  double N{0};         // atom number
  double V{0};         // quantization volume N / rho [m^3]
  double u0{0};        // 4 pi a_s hbar^2 / M [J m^3]
  double u_tilde{0};   // u0 / V [J]
  double N_eff{0};     // rho a_ho^2 a_s
  double mu{0};        // mean-field chemical potential u_tilde N [J]

  /// hbar / u_tilde in seconds: the dimensionless time unit.
  double time_unit() const;
};

PhysicalParams derive_params(double a_s, double M, double omega_tr, double rho, double N);

/// Same as derive_params with the mass fixed by a_ho^2 M omega_tr = hbar.
PhysicalParams derive_params_from_trap_length(double a_s, double a_ho, double omega_tr, double rho,
                                              double N);

/// sqrt(N) / (4 pi N_eff omega_tr), seconds.
double collapse_time_estimate(const PhysicalParams& p);

enum class SpectrumConvention {
  WithChemicalPotential,  // E_n = (n^2 - n)/2 - (mu/u) n
  InteractionOnly,        // E_n = (n^2 - n)/2, so E_0 = E_1 = 0
};

std::string_view to_string(SpectrumConvention c) noexcept;

struct Spectrum {
  Eigen::VectorXd energies;  // units of u_tilde
  double mu_in_utilde{0};
  SpectrumConvention convention{SpectrumConvention::InteractionOnly};

  static Spectrum with_chemical_potential(Eigen::Index n_max, double mu_over_u);
  static Spectrum interaction_only(Eigen::Index n_max);

  Eigen::Index n_max() const { return energies.size() - 1; }
};

/// Order parameter <a(t)> sampled on a time grid.
struct DecaySeries {
  Eigen::VectorXd times;
  Eigen::VectorXcd values;
  std::optional<double> collapse_time;
  std::optional<double> revival_time;

  Eigen::VectorXd magnitudes() const { return values.cwiseAbs(); }
};

/// n_points uniform samples on [0, t_max], both ends included.
Eigen::VectorXd uniform_times(double t_max, Eigen::Index n_points);

/// sqrt(N) exp(N (e^{-i tau} - 1)) e^{i mu tau}.
DecaySeries order_parameter_coherent_exact(double N, double mu_over_u, const Eigen::VectorXd& times);

/// Gaussian short-time form sqrt(N) e^{i mu tau} e^{-i N tau} e^{-N tau^2 / 2}.
DecaySeries order_parameter_short_time(double N, double mu_over_u, const Eigen::VectorXd& times);

/// sum_n sqrt(n+1) A_n^* A_{n+1} e^{i (E_n - E_{n+1}) t}, ascending n.
DecaySeries order_parameter_series(const FockVector& state, const Spectrum& spectrum,
                                   const Eigen::VectorXd& times);

/// Boltzmann-weighted order parameter of a (thermal-)coherent ensemble.
DecaySeries order_parameter_thermal_coherent(const NumberEnsemble& ens, const Spectrum& spectrum,
                                             const Eigen::VectorXd& times);

/// Threshold used by extract_collapse_time: |a(t)|/|a(0)| = e^{-1/2}.
inline const double kCollapseThreshold = 0.6065306597126334;  // exp(-0.5)

/// First time |value|/|value(0)| drops below e^{-1/2}, linearly interpolated.
/// Throws Errc::NoCollapse when the threshold is never crossed.
double extract_collapse_time(const DecaySeries& series);

/// First upward re-crossing of the collapse threshold after the collapse.
std::optional<double> extract_revival_time(const DecaySeries& series);

/// Generic downward crossing of `threshold` (relative to magnitudes[0]).
std::optional<double> first_crossing_below(const Eigen::VectorXd& times, const Eigen::VectorXd& magnitudes,
                                           double threshold);

/// Throws Errc::InvalidArgument if |<a(t)>|^2 exceeds mean_number anywhere.
void check_order_parameter_bound(const DecaySeries& series, double mean_number);

}  // namespace thinspec
