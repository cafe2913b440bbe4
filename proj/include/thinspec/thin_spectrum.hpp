#pragma once

// Decoherence of observable superpositions through a thermally occupied thin
// spectrum. Closed forms are Gaussian integrals over the thin-spectrum label;
// each has a discrete-sum oracle that evaluates the same sum term by term.
// Units: hbar = 1. Time is measured in hbar / [energy unit of the model].

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "thinspec/states.hpp"

namespace thinspec {

/// Thin spectrum p^2/2I with an excitation of energy epsilon that changes the
/// inertia to I (1 + delta).
struct ThinSpectrumModel {
  double inertia{1.0};
  double delta{0.0};
  double epsilon{0.0};
  double beta{1.0};

  void validate() const;
  /// kappa in E_1(p) - E_0(p) = epsilon - kappa p^2 / 2I, i.e. delta / (1 + delta).
  double dephasing_coefficient() const { return delta / (1.0 + delta); }
  /// sqrt(I / beta)
  double thermal_momentum_width() const;
  /// beta / |delta|, the 1/(k_B T delta) scale (infinite for delta = 0).
  double collapse_scale() const;
};

struct OffDiagSeries {
  Eigen::VectorXd times;
  Eigen::VectorXd magnitudes;  // |rho_od(t)| / |rho_od(0)|
  std::optional<double> collapse_time;
  double collapse_scale{0.0};
};

/// |rho_od|^2 halves at the collapse time of the two-state law.
inline const double kHalfPowerThreshold = 0.8408964152537145;  // 2^{-1/4}

/// (1 + kappa^2 t^2 / beta^2)^{-1/4}; collapse_time at the half-power point.
OffDiagSeries reduced_offdiag_two_state(const ThinSpectrumModel& model, const Eigen::VectorXd& times);

/// Uniform momentum grid over +-widths * sqrt(I/beta).
Eigen::VectorXd default_p_grid(const ThinSpectrumModel& model, Eigen::Index points = 4001,
                               double widths = 8.0);

/// Direct sum over p of e^{-beta E_0(p)} e^{-i (E_1(p) - E_0(p)) t} with
/// E_0 = p^2/2I, E_1 = epsilon + p^2 / (2 I (1 + delta)). The grid must be
/// uniform, span >= 8 thermal widths each side and hold >= 2000 points.
OffDiagSeries reduced_offdiag_two_state_oracle(const ThinSpectrumModel& model, const Eigen::VectorXd& p_grid,
                                               const Eigen::VectorXd& times);

/// Joint off-diagonal decay with several independent thin spectra (one grid
/// per model, common beta). The energy offset is the sum of the epsilons.
OffDiagSeries multi_thin_spectra_offdiag_oracle(std::span<const ThinSpectrumModel> models,
                                                std::span<const Eigen::VectorXd> p_grids,
                                                const Eigen::VectorXd& times);

struct DeltaEstimate {
  double exact{0.0};       // ((N + dN)^{2/5} - N^{2/5}) / N^{2/5}
  double linearized{0.0};  // 2 dN / 5 N
};

/// Fractional inertia shift for I ~ N^{2/5} (Thomas-Fermi).
DeltaEstimate delta_thomas_fermi(double N, double dN);

/// Bogoliubov energy sqrt(eps^2 - (u0 rho0)^2) with eps = E_k + u0 rho0.
double bogoliubov_omega(double E_k, double u0rho0);

/// Zero-mode levels with m quasi-particles in one k mode:
/// E_m^{(n)} = u0rho0 n^2 / (2 (N0 - m)) - u0rho0 n + m omega.
struct CondensateLevels {
  double N0{1.0};
  double u0rho0{1.0};
  double omega{0.0};
  double beta{1.0};

  void validate() const;
  double energy(double n, int m) const;
  /// E_m^{(n)} - E_0^{(n)}, evaluated without the cancelling linear terms.
  double excitation_gap(double n, int m) const;
  /// Width sqrt(N0 / (beta u0rho0)) of the Boltzmann distribution over n.
  double thermal_width() const;
  /// N0 beta, the hbar N0 / k_B T scale.
  double collapse_scale() const { return N0 * beta; }
};

/// Gaussian-integral closed form of the thermal zero-mode sum; for m = 1 and
/// N0 (N0 - 1) -> N0^2 it is the square root of
/// exp(beta^3 N0^3 u0rho0 / (beta^2 N0^2 + t^2)) / sqrt(beta^2 + t^2 / N0^2), normalized.
OffDiagSeries quasiparticle_offdiag_thermal(const CondensateLevels& levels, const Eigen::VectorXd& times,
                                            int m = 1);

/// Collapse time (e^{-1/2} crossing) of the closed form, solved to 1e-12 relative.
double quasiparticle_collapse_time_closed_form(const CondensateLevels& levels, int m = 1);

/// Discrete sum over integer n >= 0 within +-window_widths thermal widths of N0.
/// Throws Errc::WindowTooNarrow if the window edges carry weight above 1e-14.
OffDiagSeries quasiparticle_offdiag_thermal_oracle(const CondensateLevels& levels, const Eigen::VectorXd& times,
                                                   int m = 1, double window_widths = 10.0);

/// Oracle collapse time of the |n,0> <-> |n,m> superposition. Requires m < N0/10.
double quasiparticle_collapse_scaling(const CondensateLevels& levels, int m);

/// Zero mode in the displaced thermal state: sum over n, l of
/// e^{-beta E_0^{(n)}} |C_l(n, alpha)|^2 e^{-i (E_1^{(l)} - E_0^{(l)}) t}.
OffDiagSeries quasiparticle_offdiag_thermal_coherent(const CondensateLevels& levels, Complex alpha,
                                                     const Eigen::VectorXd& times, double tol = 1e-12);

/// (sum_i 1/t_i)^{-1}
double combine_collapse_times(std::span<const double> times);

}  // namespace thinspec
