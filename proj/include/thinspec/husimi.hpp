#pragma once

// Husimi Q-function snapshots of evolved Fock states,
// Q(gamma, t) = |<gamma|psi(t)>|^2 / pi with psi_n(t) = A_n e^{-i E_n t}.

#include <Eigen/Dense>

#include "thinspec/dynamics.hpp"
#include "thinspec/states.hpp"

namespace thinspec {

struct QGrid {
  Eigen::VectorXd re;
  Eigen::VectorXd im;
};

struct QField {
  Eigen::VectorXd grid_re;
  Eigen::VectorXd grid_im;
  Eigen::MatrixXd values;  // values(i, j) = Q(grid_re[i] + i grid_im[j])
  double normalization{0.0};
};

/// Square grid spanning [-(|alpha| + 5), |alpha| + 5] on both axes.
QGrid default_q_grid(Complex alpha, Eigen::Index points = 201);

/// Q at a single phase-space point.
double husimi_value(const FockVector& state, const Spectrum& spectrum, double t, Complex gamma);

/// Throws Errc::GridTooSmall if the Riemann sum misses unit mass by > 1e-2.
QField husimi_q(const FockVector& state, const Spectrum& spectrum, double t, const QGrid& grid);
QField husimi_q(const NumberEnsemble& ens, const Spectrum& spectrum, double t, const QGrid& grid);

/// Angle-integrated radial density 2 r sum_n |A_n|^2 e^{-r^2} r^{2n} / n!.
/// Time independent, since evolution only rephases the amplitudes.
double husimi_radial_density(const FockVector& state, double r);

struct RingStatistics {
  double radius{0.0};
  double mean{0.0};
  double coefficient_of_variation{0.0};  // population std / mean over the ring
};

/// Radius maximizing husimi_radial_density.
double ring_of_max_radial_mass(const FockVector& state);

/// Angular coefficient of variation of Q on the ring of maximal radial mass.
RingStatistics ring_angular_variation(const FockVector& state, const Spectrum& spectrum, double t,
                                      int n_angles = 720);

}  // namespace thinspec
