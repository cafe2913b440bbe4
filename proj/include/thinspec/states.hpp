#pragma once

// Truncated Fock-basis representations of single-mode states: coherent,
// squeezed-coherent, displaced number states and Boltzmann ensembles of them.

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace thinspec {

using Complex = std::complex<double>;

/// Smallest truncation tolerance that double precision can certify.
inline constexpr double kMinTruncationTol = 1e-15;
/// Largest truncation tolerance accepted by the constructors.
inline constexpr double kMaxTruncationTol = 1e-3;
/// Ensemble members lighter than this fraction of the heaviest are dropped.
inline constexpr double kEnsembleCutoff = 1e-12;

/// Amplitudes over |0>, ..., |n_max>. The probability outside the kept
/// range is recorded in tail_mass, so norm_squared() + tail_mass == 1.
struct FockVector {
  Eigen::VectorXcd amplitudes;
  double tail_mass{0.0};
  double tolerance{0.0};

  Eigen::Index n_max() const { return amplitudes.size() - 1; }
  double norm_squared() const { return amplitudes.squaredNorm(); }
  double mean_number() const;
  double number_variance() const;
  /// Eigen-style inner product <this|other>, shorter vector zero-padded.
  Complex dot(const FockVector& other) const;
};

/// Displacement alpha and squeeze argument gamma, with the derived
/// zeta = gamma tanh|gamma| / |gamma|.
struct SqueezeSpec {
  Complex alpha{0.0, 0.0};
  Complex gamma{0.0, 0.0};
  Complex zeta{0.0, 0.0};

  static SqueezeSpec from_gamma(Complex alpha, Complex gamma);
  /// Inverse map; requires |zeta| < 1.
  static SqueezeSpec from_zeta(Complex alpha, Complex zeta);
};

enum class EnsembleKind { Thermal, ThermalCoherent };

std::string_view to_string(EnsembleKind kind) noexcept;

struct EnsembleMember {
  double weight{0.0};
  int level{0};  // Fock label n of the displaced state D(alpha)|n>
  FockVector state;
};

struct NumberEnsemble {
  std::vector<EnsembleMember> members;
  double beta{0.0};
  EnsembleKind kind{EnsembleKind::Thermal};

  double total_weight() const;
  double mean_number() const;
  /// Longest member truncation.
  Eigen::Index n_max() const;
};

/// Truncation for the number distribution of a squeezed-coherent state such
/// that the omitted probability stays below tol.
int choose_truncation(Complex alpha, Complex zeta, double tol);

FockVector coherent_state(Complex z, double tol);

/// Closed-form Fock expansion of D(alpha)S(gamma)|0>. Renormalized over an
/// extended range; falls back to coherent_state when |zeta| < 1e-14.
FockVector squeezed_state(const SqueezeSpec& spec, double tol);

/// <m|D(alpha)|n> for every m, via generalized Laguerre polynomials.
FockVector displaced_number_state(int n, Complex alpha, double tol);

/// Single matrix element <m|D(alpha)|n>.
Complex displacement_matrix_element(int m, int n, Complex alpha);

/// Boltzmann mixture sum_n e^{-beta E_n}/Z D(alpha)|n><n|D(alpha)^dagger.
/// beta may be +infinity (ground manifold only).
NumberEnsemble thermal_ensemble(double beta, std::span<const double> energies, Complex alpha,
                                double tol);

}  // namespace thinspec
