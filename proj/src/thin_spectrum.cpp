#include "thinspec/thin_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "thinspec/detail/compensated_sum.hpp"
#include "thinspec/dynamics.hpp"
#include "thinspec/errors.hpp"

namespace thinspec {

namespace {

constexpr double kWindowEdgeWeight = 1e-14;

void check_times(const Eigen::VectorXd& times) {
  if (times.size() == 0) throw Error(Errc::InvalidArgument, "empty time grid");
  for (Eigen::Index k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error(Errc::InvalidArgument, "times must be strictly increasing");
  }
}

// |sum_k w_k e^{-i gap_k t}| / |sum_k w_k| for every t.
Eigen::VectorXd dephased_magnitudes(const std::vector<double>& weights, const std::vector<double>& gaps,
                                    const Eigen::VectorXd& times) {
  detail::CompensatedSum<double> z;
  for (double w : weights) z.add(w);
  const double norm = z.value();
  Eigen::VectorXd out(times.size());
  for (Eigen::Index j = 0; j < times.size(); ++j) {
    detail::CompensatedSum<Complex> s;
    for (std::size_t k = 0; k < weights.size(); ++k) s.add(weights[k] * std::polar(1.0, -gaps[k] * times[j]));
    out[j] = std::abs(s.value()) / norm;
  }
  return out;
}

double quasiparticle_log_magnitude(const CondensateLevels& lv, int m, double t) {
  const double a = 0.5 * lv.beta * lv.u0rho0 / lv.N0;
  const double c = 0.5 * lv.u0rho0 * m / (lv.N0 * (lv.N0 - m));
  const double b = lv.beta * lv.u0rho0;
  const double ct = c * t;
  return -0.25 * std::log1p((ct / a) * (ct / a)) - 0.25 * b * b * ct * ct / (a * (a * a + ct * ct));
}

void check_m(const CondensateLevels& lv, int m) {
  if (m < 1) throw Error(Errc::InvalidArgument, "quasi-particle number m must be >= 1");
  if (!(m < lv.N0)) throw Error(Errc::MTooLarge, "m must stay below N0");
}

}  // namespace

void ThinSpectrumModel::validate() const {
  if (!(inertia > 0.0) || !std::isfinite(inertia)) throw Error(Errc::InvalidArgument, "inertia must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(Errc::InvalidArgument, "beta must be > 0 and finite");
  if (!(std::abs(delta) < 1.0)) throw Error(Errc::InvalidArgument, "|delta| must be < 1");
  if (!std::isfinite(epsilon)) throw Error(Errc::InvalidArgument, "epsilon must be finite");
}

double ThinSpectrumModel::thermal_momentum_width() const { return std::sqrt(inertia / beta); }

double ThinSpectrumModel::collapse_scale() const {
  return delta == 0.0 ? std::numeric_limits<double>::infinity() : beta / std::abs(delta);
}

OffDiagSeries reduced_offdiag_two_state(const ThinSpectrumModel& model, const Eigen::VectorXd& times) {
  model.validate();
  check_times(times);
  const double kappa = model.dephasing_coefficient();
  OffDiagSeries s;
  s.times = times;
  s.magnitudes = times.unaryExpr([&](double t) {
    const double x = kappa * t / model.beta;
    return std::pow(1.0 + x * x, -0.25);
  });
  s.collapse_scale = model.collapse_scale();
  // (1 + x^2)^{-1/4} = 2^{-1/4} at x = 1.
  if (kappa != 0.0) s.collapse_time = model.beta / std::abs(kappa);
  return s;
}

Eigen::VectorXd default_p_grid(const ThinSpectrumModel& model, Eigen::Index points, double widths) {
  model.validate();
  const double half = widths * model.thermal_momentum_width();
  return Eigen::VectorXd::LinSpaced(points, -half, half);
}

namespace {

void check_p_grid(const ThinSpectrumModel& model, const Eigen::VectorXd& grid) {
  if (grid.size() < 2000) {
    throw Error(Errc::GridTooCoarse, "p grid needs >= 2000 points, got " + std::to_string(grid.size()));
  }
  const double need = 8.0 * model.thermal_momentum_width() * (1.0 - 1e-12);
  if (grid[0] > -need || grid[grid.size() - 1] < need) {
    throw Error(Errc::GridTooCoarse, "p grid must span 8 thermal widths on each side");
  }
  const double h = (grid[grid.size() - 1] - grid[0]) / static_cast<double>(grid.size() - 1);
  for (Eigen::Index k = 1; k < grid.size(); ++k) {
    if (std::abs(grid[k] - grid[k - 1] - h) > 1e-9 * h) throw Error(Errc::GridTooCoarse, "p grid must be uniform");
  }
}

}  // namespace

OffDiagSeries reduced_offdiag_two_state_oracle(const ThinSpectrumModel& model, const Eigen::VectorXd& p_grid,
                                               const Eigen::VectorXd& times) {
  model.validate();
  check_times(times);
  check_p_grid(model, p_grid);
  std::vector<double> weights;
  std::vector<double> gaps;
  weights.reserve(static_cast<std::size_t>(p_grid.size()));
  gaps.reserve(static_cast<std::size_t>(p_grid.size()));
  for (Eigen::Index k = 0; k < p_grid.size(); ++k) {
    const double kinetic = p_grid[k] * p_grid[k] / (2.0 * model.inertia);
    const double e0 = kinetic;
    const double e1 = model.epsilon + kinetic / (1.0 + model.delta);
    weights.push_back(std::exp(-model.beta * e0));
    gaps.push_back(e1 - e0);
  }
  OffDiagSeries s;
  s.times = times;
  s.magnitudes = dephased_magnitudes(weights, gaps, times);
  s.collapse_scale = model.collapse_scale();
  s.collapse_time = first_crossing_below(times, s.magnitudes, kHalfPowerThreshold);
  return s;
}

OffDiagSeries multi_thin_spectra_offdiag_oracle(std::span<const ThinSpectrumModel> models,
                                                std::span<const Eigen::VectorXd> p_grids,
                                                const Eigen::VectorXd& times) {
  if (models.empty() || models.size() != p_grids.size()) {
    throw Error(Errc::InvalidArgument, "need one p grid per thin spectrum");
  }
  check_times(times);
  const double beta = models[0].beta;
  double epsilon = 0.0;
  std::vector<double> collapse_scales;
  for (std::size_t i = 0; i < models.size(); ++i) {
    models[i].validate();
    check_p_grid(models[i], p_grids[i]);
    if (models[i].beta != beta) throw Error(Errc::InvalidArgument, "thin spectra must share one temperature");
    epsilon += models[i].epsilon;
    collapse_scales.push_back(models[i].collapse_scale());
  }

  // Odometer over the product grid, last index fastest.
  std::vector<Eigen::Index> idx(models.size(), 0);
  std::vector<double> weights;
  std::vector<double> gaps;
  for (;;) {
    double e0 = 0.0;
    double shift = 0.0;
    for (std::size_t i = 0; i < models.size(); ++i) {
      const double p = p_grids[i][idx[i]];
      const double kinetic = p * p / (2.0 * models[i].inertia);
      e0 += kinetic;
      shift += kinetic / (1.0 + models[i].delta) - kinetic;
    }
    weights.push_back(std::exp(-beta * e0));
    gaps.push_back(epsilon + shift);
    bool wrapped = true;
    for (std::size_t i = models.size(); i-- > 0;) {
      if (++idx[i] < p_grids[i].size()) {
        wrapped = false;
        break;
      }
      idx[i] = 0;
    }
    if (wrapped) break;
  }

  OffDiagSeries s;
  s.times = times;
  s.magnitudes = dephased_magnitudes(weights, gaps, times);
  s.collapse_scale = combine_collapse_times(collapse_scales);
  s.collapse_time = first_crossing_below(times, s.magnitudes, kHalfPowerThreshold);
  return s;
}

DeltaEstimate delta_thomas_fermi(double N, double dN) {
  if (!(N > 0.0)) throw Error(Errc::InvalidArgument, "N must be > 0");
  if (!(dN >= 0.0)) throw Error(Errc::InvalidArgument, "dN must be >= 0");
  DeltaEstimate d;
  // (1 + x)^{2/5} - 1 without cancellation.
  d.exact = std::expm1(0.4 * std::log1p(dN / N));
  d.linearized = 0.4 * dN / N;
  return d;
}

double bogoliubov_omega(double E_k, double u0rho0) {
  if (!(E_k >= 0.0)) throw Error(Errc::InvalidArgument, "E_k must be >= 0");
  if (!(u0rho0 >= 0.0)) throw Error(Errc::InvalidArgument, "u0rho0 must be >= 0");
  // eps^2 - u^2 = (eps - u)(eps + u) = E_k (E_k + 2u)
  return std::sqrt(E_k * (E_k + 2.0 * u0rho0));
}

void CondensateLevels::validate() const {
  if (!(N0 >= 1.0) || !std::isfinite(N0)) throw Error(Errc::InvalidArgument, "N0 must be >= 1");
  if (!(u0rho0 > 0.0) || !std::isfinite(u0rho0)) throw Error(Errc::InvalidArgument, "u0rho0 must be > 0");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw Error(Errc::InvalidArgument, "omega must be >= 0");
  if (!(beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be > 0");
}

double CondensateLevels::energy(double n, int m) const {
  return u0rho0 * n * n / (2.0 * (N0 - m)) - u0rho0 * n + m * omega;
}

double CondensateLevels::excitation_gap(double n, int m) const {
  return 0.5 * u0rho0 * n * n * m / (N0 * (N0 - m)) + m * omega;
}

double CondensateLevels::thermal_width() const {
  if (std::isinf(beta)) return 0.0;
  return std::sqrt(N0 / (beta * u0rho0));
}

OffDiagSeries quasiparticle_offdiag_thermal(const CondensateLevels& levels, const Eigen::VectorXd& times, int m) {
  levels.validate();
  if (!std::isfinite(levels.beta)) throw Error(Errc::InvalidArgument, "closed form needs finite beta");
  check_m(levels, m);
  check_times(times);
  OffDiagSeries s;
  s.times = times;
  s.magnitudes = times.unaryExpr([&](double t) { return std::exp(quasiparticle_log_magnitude(levels, m, t)); });
  s.collapse_scale = levels.collapse_scale() / m;
  s.collapse_time = quasiparticle_collapse_time_closed_form(levels, m);
  return s;
}

double quasiparticle_collapse_time_closed_form(const CondensateLevels& levels, int m) {
  levels.validate();
  check_m(levels, m);
  const double target = -0.5;
  double lo = 0.0;
  double hi = levels.collapse_scale() / m;
  while (quasiparticle_log_magnitude(levels, m, hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (quasiparticle_log_magnitude(levels, m, mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OffDiagSeries quasiparticle_offdiag_thermal_oracle(const CondensateLevels& levels, const Eigen::VectorXd& times,
                                                   int m, double window_widths) {
  levels.validate();
  check_m(levels, m);
  check_times(times);
  const double centre = std::round(levels.N0);
  const double half = std::ceil(window_widths * levels.thermal_width()) + 1.0;
  const double n_lo = std::max(0.0, centre - half);
  const double n_hi = centre + half;

  std::vector<double> energies;
  for (double n = n_lo; n <= n_hi; n += 1.0) energies.push_back(levels.energy(n, 0));
  const double e_min = *std::min_element(energies.begin(), energies.end());
  std::vector<double> weights;
  std::vector<double> gaps;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    const double de = energies[k] - e_min;
    weights.push_back(de == 0.0 ? 1.0 : (std::isinf(levels.beta) ? 0.0 : std::exp(-levels.beta * de)));
    gaps.push_back(levels.excitation_gap(n_lo + static_cast<double>(k), m));
  }
  const double w_max = *std::max_element(weights.begin(), weights.end());
  if (weights.front() > kWindowEdgeWeight * w_max || weights.back() > kWindowEdgeWeight * w_max) {
    throw Error(Errc::WindowTooNarrow, "summation window edges carry weight above 1e-14 of the maximum");
  }

  OffDiagSeries s;
  s.times = times;
  s.magnitudes = dephased_magnitudes(weights, gaps, times);
  s.collapse_scale = levels.collapse_scale() / m;
  s.collapse_time = first_crossing_below(times, s.magnitudes, kCollapseThreshold);
  return s;
}

double quasiparticle_collapse_scaling(const CondensateLevels& levels, int m) {
  levels.validate();
  if (m < 1) throw Error(Errc::InvalidArgument, "quasi-particle number m must be >= 1");
  if (!(m < levels.N0 / 10.0)) throw Error(Errc::MTooLarge, "m must stay below N0/10");
  const double guess = quasiparticle_collapse_time_closed_form(levels, m);
  const Eigen::VectorXd times = uniform_times(3.0 * guess, 3001);
  const auto s = quasiparticle_offdiag_thermal_oracle(levels, times, m);
  if (!s.collapse_time) throw Error(Errc::NoCollapse, "oracle did not collapse within three closed-form times");
  return *s.collapse_time;
}

OffDiagSeries quasiparticle_offdiag_thermal_coherent(const CondensateLevels& levels, Complex alpha,
                                                     const Eigen::VectorXd& times, double tol) {
  levels.validate();
  check_m(levels, 1);
  check_times(times);
  const double sigma = levels.thermal_width();
  const auto n_top = static_cast<std::size_t>(std::ceil(levels.N0 + 12.0 * sigma + 10.0));
  std::vector<double> energies(n_top + 1);
  for (std::size_t n = 0; n <= n_top; ++n) energies[n] = levels.energy(static_cast<double>(n), 0);
  const NumberEnsemble ens = thermal_ensemble(levels.beta, energies, alpha, tol);

  // Occupation of zero-mode level l: sum_n w_n |C_l(n, alpha)|^2.
  std::vector<detail::CompensatedSum<double>> occupation(static_cast<std::size_t>(ens.n_max() + 1));
  for (const auto& member : ens.members) {
    const auto& a = member.state.amplitudes;
    for (Eigen::Index l = 0; l < a.size(); ++l) occupation[static_cast<std::size_t>(l)].add(member.weight * std::norm(a[l]));
  }
  std::vector<double> weights;
  std::vector<double> gaps;
  for (std::size_t l = 0; l < occupation.size(); ++l) {
    weights.push_back(occupation[l].value());
    gaps.push_back(levels.excitation_gap(static_cast<double>(l), 1));
  }
  OffDiagSeries s;
  s.times = times;
  s.magnitudes = dephased_magnitudes(weights, gaps, times);
  s.collapse_scale = levels.collapse_scale();
  s.collapse_time = first_crossing_below(times, s.magnitudes, kCollapseThreshold);
  return s;
}

double combine_collapse_times(std::span<const double> times) {
  if (times.empty()) throw Error(Errc::InvalidArgument, "no collapse times to combine");
  double rate = 0.0;
  for (double t : times) {
    if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "collapse times must be > 0");
    rate += 1.0 / t;
  }
  return 1.0 / rate;
}

}  // namespace thinspec
