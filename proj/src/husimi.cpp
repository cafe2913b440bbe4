#include "thinspec/husimi.hpp"

#include <cmath>
#include <string>

#include "thinspec/detail/compensated_sum.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/specfun.hpp"
#include "thinspec/units.hpp"

namespace thinspec {

namespace {

Eigen::VectorXcd evolve(const FockVector& state, const Spectrum& spectrum, double t) {
  if (spectrum.n_max() < state.n_max()) {
    throw Error(Errc::TruncationMismatch, "spectrum shorter than the state truncation");
  }
  Eigen::VectorXcd psi(state.amplitudes.size());
  for (Eigen::Index n = 0; n < psi.size(); ++n) {
    psi[n] = state.amplitudes[n] * std::polar(1.0, -spectrum.energies[n] * t);
  }
  return psi;
}

// |<gamma|psi>|^2 / pi with a running rescale of gamma*^n / sqrt(n!).
double q_of(const Eigen::VectorXcd& psi, Complex gamma) {
  const Complex g = std::conj(gamma);
  double log_scale = -0.5 * std::norm(gamma);
  Complex term{1.0, 0.0};
  Complex sum{0.0, 0.0};
  for (Eigen::Index n = 0; n < psi.size(); ++n) {
    sum += psi[n] * term;
    term *= g / std::sqrt(static_cast<double>(n + 1));
    const double big = std::abs(term);
    if (big > 1e150) {
      term /= big;
      sum /= big;
      log_scale += std::log(big);
    }
  }
  const double mag2 = std::norm(sum);
  if (mag2 == 0.0) return 0.0;
  return std::exp(std::log(mag2) + 2.0 * log_scale) / units::pi;
}

double cell_area(const QGrid& grid) {
  auto step = [](const Eigen::VectorXd& v) {
    if (v.size() < 2) throw Error(Errc::InvalidArgument, "Q grid needs at least two points per axis");
    return (v[v.size() - 1] - v[0]) / static_cast<double>(v.size() - 1);
  };
  return step(grid.re) * step(grid.im);
}

void finish(QField& field, const QGrid& grid) {
  field.grid_re = grid.re;
  field.grid_im = grid.im;
  field.normalization = field.values.sum() * cell_area(grid);
  if (std::abs(field.normalization - 1.0) > 1e-2) {
    throw Error(Errc::GridTooSmall,
                "Q-function grid captures mass " + std::to_string(field.normalization) + ", expected 1");
  }
}

}  // namespace

QGrid default_q_grid(Complex alpha, Eigen::Index points) {
  const double half = std::abs(alpha) + 5.0;
  QGrid g;
  g.re = Eigen::VectorXd::LinSpaced(points, -half, half);
  g.im = g.re;
  return g;
}

double husimi_value(const FockVector& state, const Spectrum& spectrum, double t, Complex gamma) {
  return q_of(evolve(state, spectrum, t), gamma);
}

QField husimi_q(const FockVector& state, const Spectrum& spectrum, double t, const QGrid& grid) {
  const Eigen::VectorXcd psi = evolve(state, spectrum, t);
  QField field;
  field.values.resize(grid.re.size(), grid.im.size());
  for (Eigen::Index i = 0; i < grid.re.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.im.size(); ++j) {
      field.values(i, j) = q_of(psi, {grid.re[i], grid.im[j]});
    }
  }
  finish(field, grid);
  return field;
}

QField husimi_q(const NumberEnsemble& ens, const Spectrum& spectrum, double t, const QGrid& grid) {
  QField field;
  field.values = Eigen::MatrixXd::Zero(grid.re.size(), grid.im.size());
  for (const auto& member : ens.members) {
    const Eigen::VectorXcd psi = evolve(member.state, spectrum, t);
    for (Eigen::Index i = 0; i < grid.re.size(); ++i) {
      for (Eigen::Index j = 0; j < grid.im.size(); ++j) {
        field.values(i, j) += member.weight * q_of(psi, {grid.re[i], grid.im[j]});
      }
    }
  }
  finish(field, grid);
  return field;
}

double husimi_radial_density(const FockVector& state, double r) {
  if (r <= 0.0) return 0.0;
  const double log_r = std::log(r);
  detail::CompensatedSum<double> s;
  for (Eigen::Index n = 0; n < state.amplitudes.size(); ++n) {
    const double p = std::norm(state.amplitudes[n]);
    if (p == 0.0) continue;
    const double x = std::log(p) - r * r + 2.0 * static_cast<double>(n) * log_r - log_factorial(n);
    if (x > -745.0) s.add(std::exp(x));
  }
  return 2.0 * r * s.value();
}

double ring_of_max_radial_mass(const FockVector& state) {
  const double r_hi = std::sqrt(static_cast<double>(state.n_max())) + 6.0;
  constexpr int kScan = 2000;
  double best_r = 0.0;
  double best = -1.0;
  for (int k = 1; k <= kScan; ++k) {
    const double r = r_hi * k / kScan;
    const double d = husimi_radial_density(state, r);
    if (d > best) {
      best = d;
      best_r = r;
    }
  }
  // Golden-section refinement inside the bracketing scan cell.
  double a = std::max(0.0, best_r - r_hi / kScan);
  double b = best_r + r_hi / kScan;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  for (int it = 0; it < 60; ++it) {
    if (husimi_radial_density(state, c) > husimi_radial_density(state, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - inv_phi * (b - a);
    d = a + inv_phi * (b - a);
  }
  return 0.5 * (a + b);
}

RingStatistics ring_angular_variation(const FockVector& state, const Spectrum& spectrum, double t,
                                      int n_angles) {
  if (n_angles < 8) throw Error(Errc::InvalidArgument, "need at least 8 ring samples");
  RingStatistics out;
  out.radius = ring_of_max_radial_mass(state);
  const Eigen::VectorXcd psi = evolve(state, spectrum, t);
  Eigen::VectorXd q(n_angles);
  for (int k = 0; k < n_angles; ++k) {
    q[k] = q_of(psi, std::polar(out.radius, 2.0 * units::pi * k / n_angles));
  }
  out.mean = q.mean();
  const double var = (q.array() - out.mean).square().mean();
  out.coefficient_of_variation = std::sqrt(var) / out.mean;
  return out;
}

}  // namespace thinspec
