#include "thinspec/dynamics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "thinspec/detail/compensated_sum.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/units.hpp"

namespace thinspec {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(Errc::NonPhysical, std::string(name) + " must be positive and finite");
  }
}

// Sum_k coeff_k e^{i freq_k t} for every t, ascending k, compensated.
Eigen::VectorXcd evaluate_phase_series(const Eigen::VectorXcd& coeff, const Eigen::VectorXd& freq,
                                       const Eigen::VectorXd& times) {
  Eigen::VectorXcd out(times.size());
  for (Eigen::Index j = 0; j < times.size(); ++j) {
    const double t = times[j];
    detail::CompensatedSum<Complex> s;
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
      if (coeff[k] == Complex{0.0, 0.0}) continue;
      s.add(coeff[k] * std::polar(1.0, freq[k] * t));
    }
    out[j] = s.value();
  }
  return out;
}

void annotate(DecaySeries& s) {
  if (s.values.size() == 0 || s.values[0] == Complex{0.0, 0.0}) return;
  s.collapse_time = first_crossing_below(s.times, s.magnitudes(), kCollapseThreshold);
  if (s.collapse_time) s.revival_time = extract_revival_time(s);
}

void check_times(const Eigen::VectorXd& times) {
  for (Eigen::Index k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error(Errc::InvalidArgument, "times must be strictly increasing");
  }
}

}  // namespace

double PhysicalParams::time_unit() const { return units::hbar / u_tilde; }

PhysicalParams derive_params(double a_s, double M, double omega_tr, double rho, double N) {
  require_positive(a_s, "a_s");
  require_positive(M, "M");
  require_positive(omega_tr, "omega_tr");
  require_positive(rho, "rho");
  require_positive(N, "N");
  PhysicalParams p;
  p.a_s = a_s;
  p.M = M;
  p.omega_tr = omega_tr;
  p.rho = rho;
  p.N = N;
  p.a_ho = std::sqrt(units::hbar / (M * omega_tr));
  p.V = N / rho;
  p.u0 = 4.0 * units::pi * a_s * units::hbar * units::hbar / M;
  p.u_tilde = p.u0 / p.V;
  p.N_eff = rho * p.a_ho * p.a_ho * a_s;
  p.mu = p.u_tilde * N;
  return p;
}

PhysicalParams derive_params_from_trap_length(double a_s, double a_ho, double omega_tr, double rho,
                                              double N) {
  require_positive(a_ho, "a_ho");
  require_positive(omega_tr, "omega_tr");
  return derive_params(a_s, units::hbar / (a_ho * a_ho * omega_tr), omega_tr, rho, N);
}

double collapse_time_estimate(const PhysicalParams& p) {
  return std::sqrt(p.N) / (4.0 * units::pi * p.N_eff * p.omega_tr);
}

std::string_view to_string(SpectrumConvention c) noexcept {
  return c == SpectrumConvention::WithChemicalPotential ? "with-chemical-potential" : "interaction-only";
}

Spectrum Spectrum::with_chemical_potential(Eigen::Index n_max, double mu_over_u) {
  Spectrum s;
  s.convention = SpectrumConvention::WithChemicalPotential;
  s.mu_in_utilde = mu_over_u;
  s.energies.resize(n_max + 1);
  for (Eigen::Index n = 0; n <= n_max; ++n) {
    const double x = static_cast<double>(n);
    s.energies[n] = 0.5 * (x * x - x) - mu_over_u * x;
  }
  return s;
}

Spectrum Spectrum::interaction_only(Eigen::Index n_max) {
  Spectrum s = with_chemical_potential(n_max, 0.0);
  s.convention = SpectrumConvention::InteractionOnly;
  return s;
}

Eigen::VectorXd uniform_times(double t_max, Eigen::Index n_points) {
  if (!(t_max > 0.0) || n_points < 2) {
    throw Error(Errc::InvalidArgument, "time window needs t_max > 0 and at least two points");
  }
  return Eigen::VectorXd::LinSpaced(n_points, 0.0, t_max);
}

DecaySeries order_parameter_coherent_exact(double N, double mu_over_u, const Eigen::VectorXd& times) {
  require_positive(N, "N");
  check_times(times);
  DecaySeries s;
  s.times = times;
  s.values.resize(times.size());
  const double root_n = std::sqrt(N);
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const double tau = times[k];
    // N (e^{-i tau} - 1) = N (cos tau - 1) - i N sin tau
    const Complex exponent{N * (std::cos(tau) - 1.0), -N * std::sin(tau) + mu_over_u * tau};
    s.values[k] = root_n * std::exp(exponent);
  }
  annotate(s);
  return s;
}

DecaySeries order_parameter_short_time(double N, double mu_over_u, const Eigen::VectorXd& times) {
  require_positive(N, "N");
  check_times(times);
  DecaySeries s;
  s.times = times;
  s.values.resize(times.size());
  const double root_n = std::sqrt(N);
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const double tau = times[k];
    s.values[k] = root_n * std::exp(Complex{-0.5 * N * tau * tau, (mu_over_u - N) * tau});
  }
  annotate(s);
  return s;
}

DecaySeries order_parameter_series(const FockVector& state, const Spectrum& spectrum,
                                   const Eigen::VectorXd& times) {
  check_times(times);
  const Eigen::Index n_max = state.n_max();
  if (spectrum.n_max() < n_max) {
    throw Error(Errc::TruncationMismatch, "spectrum covers n <= " + std::to_string(spectrum.n_max()) +
                                              " but the state extends to " + std::to_string(n_max));
  }
  const Eigen::Index terms = std::max<Eigen::Index>(n_max, 0);
  Eigen::VectorXcd coeff(terms);
  Eigen::VectorXd freq(terms);
  for (Eigen::Index n = 0; n < terms; ++n) {
    coeff[n] = std::sqrt(static_cast<double>(n + 1)) * std::conj(state.amplitudes[n]) * state.amplitudes[n + 1];
    freq[n] = spectrum.energies[n] - spectrum.energies[n + 1];
  }
  DecaySeries s;
  s.times = times;
  s.values = evaluate_phase_series(coeff, freq, times);
  annotate(s);
  return s;
}

DecaySeries order_parameter_thermal_coherent(const NumberEnsemble& ens, const Spectrum& spectrum,
                                             const Eigen::VectorXd& times) {
  check_times(times);
  const Eigen::Index n_max = ens.n_max();
  if (spectrum.n_max() < n_max) {
    throw Error(Errc::TruncationMismatch, "spectrum covers n <= " + std::to_string(spectrum.n_max()) +
                                              " but the ensemble extends to " + std::to_string(n_max));
  }
  // The time dependence is member independent, so the Boltzmann sum is folded
  // into one coefficient per Fock level before the time loop.
  std::vector<detail::CompensatedSum<Complex>> acc(static_cast<std::size_t>(std::max<Eigen::Index>(n_max, 0)));
  for (const auto& member : ens.members) {
    const auto& a = member.state.amplitudes;
    for (Eigen::Index m = 0; m + 1 < a.size(); ++m) {
      acc[static_cast<std::size_t>(m)].add(member.weight * std::sqrt(static_cast<double>(m + 1)) *
                                           std::conj(a[m]) * a[m + 1]);
    }
  }
  Eigen::VectorXcd coeff(static_cast<Eigen::Index>(acc.size()));
  Eigen::VectorXd freq(coeff.size());
  for (Eigen::Index m = 0; m < coeff.size(); ++m) {
    coeff[m] = acc[static_cast<std::size_t>(m)].value();
    freq[m] = spectrum.energies[m] - spectrum.energies[m + 1];
  }
  DecaySeries s;
  s.times = times;
  s.values = evaluate_phase_series(coeff, freq, times);
  annotate(s);
  return s;
}

std::optional<double> first_crossing_below(const Eigen::VectorXd& times, const Eigen::VectorXd& magnitudes,
                                           double threshold) {
  if (magnitudes.size() == 0 || !(magnitudes[0] > 0.0)) {
    throw Error(Errc::InvalidArgument, "initial magnitude must be positive");
  }
  const double level = threshold * magnitudes[0];
  for (Eigen::Index k = 1; k < magnitudes.size(); ++k) {
    if (magnitudes[k] < level) {
      const double m0 = magnitudes[k - 1];
      const double m1 = magnitudes[k];
      return times[k - 1] + (level - m0) / (m1 - m0) * (times[k] - times[k - 1]);
    }
  }
  return std::nullopt;
}

double extract_collapse_time(const DecaySeries& series) {
  const auto t = first_crossing_below(series.times, series.magnitudes(), kCollapseThreshold);
  if (!t) throw Error(Errc::NoCollapse, "magnitude never drops below e^{-1/2} of its initial value");
  return *t;
}

std::optional<double> extract_revival_time(const DecaySeries& series) {
  const Eigen::VectorXd mag = series.magnitudes();
  if (mag.size() == 0 || !(mag[0] > 0.0)) return std::nullopt;
  const double level = kCollapseThreshold * mag[0];
  Eigen::Index k = 1;
  while (k < mag.size() && mag[k] >= level) ++k;
  for (++k; k < mag.size(); ++k) {
    if (mag[k] >= level && mag[k - 1] < level) {
      const double m0 = mag[k - 1];
      const double m1 = mag[k];
      return series.times[k - 1] + (level - m0) / (m1 - m0) * (series.times[k] - series.times[k - 1]);
    }
  }
  return std::nullopt;
}

void check_order_parameter_bound(const DecaySeries& series, double mean_number) {
  const double bound = std::sqrt(mean_number) + 1e-6;
  for (Eigen::Index k = 0; k < series.values.size(); ++k) {
    if (std::abs(series.values[k]) > bound) {
      throw Error(Errc::InvalidArgument, "|<a(t)>| exceeds sqrt(mean number) at t = " +
                                             std::to_string(series.times[k]));
    }
  }
}

}  // namespace thinspec
