#include "thinspec/states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "thinspec/detail/compensated_sum.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/specfun.hpp"

namespace thinspec {

namespace {

// Amplitudes below this (squared) are treated as the end of the support once
// enough consecutive ones have been seen past the requested truncation.
constexpr double kNegligibleMass = 1e-40;
constexpr int kNegligibleRun = 16;
constexpr int kMaxFockIndex = 200000;

void check_tolerance(double tol) {
  if (!(tol > 0.0) || tol > kMaxTruncationTol) {
    throw Error(Errc::InvalidArgument,
                "truncation tolerance must lie in (0, 1e-3], got " + std::to_string(tol));
  }
  if (tol < kMinTruncationTol) {
    throw Error(Errc::TolUnreachable, "tolerance " + std::to_string(tol) +
                                          " is below double-precision resolution");
  }
}

double tail_multiplier(double tol) { return std::max(10.0, std::sqrt(2.0 * std::log(1.0 / tol)) + 2.0); }

// Generates amplitudes a_0, a_1, ... in order until the support has ended
// beyond n_guess, then picks the smallest n_max >= n_guess whose tail mass is
// below tol. `renormalize` rescales the full generated vector to unit norm.
FockVector assemble(const std::function<Complex(int)>& next, int n_guess, double tol,
                    bool renormalize) {
  std::vector<Complex> amps;
  amps.reserve(static_cast<std::size_t>(n_guess) + 64);
  int run = 0;
  for (int n = 0;; ++n) {
    if (n > kMaxFockIndex) {
      throw Error(Errc::TolUnreachable, "state support exceeds the largest Fock index");
    }
    const Complex a = next(n);
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw Error(Errc::Overflow, "amplitude " + std::to_string(n) + " is not finite");
    }
    amps.push_back(a);
    if (n > n_guess) {
      run = std::norm(a) < kNegligibleMass ? run + 1 : 0;
      if (run >= kNegligibleRun) break;
    }
  }

  const auto size = static_cast<Eigen::Index>(amps.size());
  // Suffix sums, accumulated from the smallest terms upwards.
  std::vector<double> suffix(amps.size() + 1, 0.0);
  for (Eigen::Index n = size - 1; n >= 0; --n) {
    suffix[static_cast<std::size_t>(n)] =
        suffix[static_cast<std::size_t>(n) + 1] + std::norm(amps[static_cast<std::size_t>(n)]);
  }
  const double total = suffix[0];
  const double scale = renormalize ? 1.0 / total : 1.0;

  Eigen::Index n_max = std::min<Eigen::Index>(n_guess, size - 1);
  while (n_max < size - 1 && suffix[static_cast<std::size_t>(n_max) + 1] * scale >= tol) ++n_max;
  const double tail = suffix[static_cast<std::size_t>(n_max) + 1] * scale;
  if (tail >= tol) {
    throw Error(Errc::TolUnreachable, "could not certify tail mass below tolerance");
  }

  FockVector v;
  v.amplitudes.resize(n_max + 1);
  const double amp_scale = std::sqrt(scale);
  for (Eigen::Index n = 0; n <= n_max; ++n) v.amplitudes[n] = amps[static_cast<std::size_t>(n)] * amp_scale;
  v.tail_mass = tail;
  v.tolerance = tol;
  return v;
}

Complex from_log(double log_magnitude, double phase) {
  if (log_magnitude < -745.0) return {0.0, 0.0};
  return std::polar(std::exp(log_magnitude), phase);
}

}  // namespace

double FockVector::mean_number() const {
  detail::CompensatedSum<double> s;
  for (Eigen::Index n = 0; n < amplitudes.size(); ++n) s.add(static_cast<double>(n) * std::norm(amplitudes[n]));
  return s.value();
}

double FockVector::number_variance() const {
  const double mean = mean_number();
  detail::CompensatedSum<double> s;
  for (Eigen::Index n = 0; n < amplitudes.size(); ++n) {
    const double d = static_cast<double>(n) - mean;
    s.add(d * d * std::norm(amplitudes[n]));
  }
  return s.value();
}

Complex FockVector::dot(const FockVector& other) const {
  const Eigen::Index k = std::min(amplitudes.size(), other.amplitudes.size());
  return amplitudes.head(k).dot(other.amplitudes.head(k));
}

SqueezeSpec SqueezeSpec::from_gamma(Complex alpha, Complex gamma) {
  SqueezeSpec s;
  s.alpha = alpha;
  s.gamma = gamma;
  const double r = std::abs(gamma);
  s.zeta = r == 0.0 ? Complex{0.0, 0.0} : gamma * (std::tanh(r) / r);
  return s;
}

SqueezeSpec SqueezeSpec::from_zeta(Complex alpha, Complex zeta) {
  const double z = std::abs(zeta);
  if (!(z < 1.0)) throw Error(Errc::InvalidArgument, "|zeta| must be < 1");
  SqueezeSpec s;
  s.alpha = alpha;
  s.zeta = zeta;
  s.gamma = z == 0.0 ? Complex{0.0, 0.0} : zeta * (std::atanh(z) / z);
  return s;
}

std::string_view to_string(EnsembleKind kind) noexcept {
  return kind == EnsembleKind::Thermal ? "thermal" : "thermal-coherent";
}

double NumberEnsemble::total_weight() const {
  detail::CompensatedSum<double> s;
  for (const auto& m : members) s.add(m.weight);
  return s.value();
}

double NumberEnsemble::mean_number() const {
  detail::CompensatedSum<double> s;
  for (const auto& m : members) s.add(m.weight * m.state.mean_number());
  return s.value();
}

Eigen::Index NumberEnsemble::n_max() const {
  Eigen::Index n = 0;
  for (const auto& m : members) n = std::max(n, m.state.n_max());
  return n;
}

int choose_truncation(Complex alpha, Complex zeta, double tol) {
  check_tolerance(tol);
  const double z = std::abs(zeta);
  if (!(z < 1.0)) throw Error(Errc::InvalidArgument, "|zeta| must be < 1");
  const double a2 = std::norm(alpha);
  if (a2 == 0.0 && z == 0.0) return 0;

  const double k = tail_multiplier(tol);
  const double mean = a2 + z * z / (1.0 - z * z);
  const double inflate = (1.0 + z) / (1.0 - z);
  double n = mean + k * std::sqrt((a2 + 1.0) * inflate) + 0.5 * k * k;
  // Squeezed-vacuum component: P(2j) falls off like |zeta|^{2j}.
  if (z > 0.0) n += std::log(tol) / std::log(z);
  if (n > kMaxFockIndex) throw Error(Errc::TolUnreachable, "truncation exceeds the largest Fock index");
  return static_cast<int>(std::ceil(n));
}

FockVector coherent_state(Complex z, double tol) {
  const int n_guess = choose_truncation(z, {0.0, 0.0}, tol);
  if (z == Complex{0.0, 0.0}) {
    FockVector v;
    v.amplitudes = Eigen::VectorXcd::Zero(n_guess + 1);
    v.amplitudes[0] = 1.0;
    v.tolerance = tol;
    return v;
  }
  const double log_r = std::log(std::abs(z));
  const double theta = std::arg(z);
  const double half_r2 = 0.5 * std::norm(z);
  auto amp = [&](int n) {
    return from_log(-half_r2 + n * log_r - 0.5 * log_factorial(n), n * theta);
  };
  return assemble(amp, n_guess, tol, false);
}

FockVector squeezed_state(const SqueezeSpec& spec, double tol) {
  const Complex alpha = spec.alpha;
  const Complex zeta = spec.zeta;
  if (std::abs(zeta) < 1e-14) return coherent_state(alpha, tol);
  const int n_guess = choose_truncation(alpha, zeta, tol);

  // A_n = (1-|z|^2)^{1/4} e^{-(a + z a*) a*/2} h_n with
  // h_n = (zeta/2)^{n/2} H_n(w) / sqrt(n!), w = (a + z a*)/sqrt(2 zeta), which obeys
  // h_{n+1} = (b h_n - zeta sqrt(n) h_{n-1}) / sqrt(n+1), b = a + z a*.
  // This is independent of the branch of sqrt(2 zeta) and never forms H_n directly.
  const Complex b = alpha + zeta * std::conj(alpha);
  const Complex log_pref = 0.25 * std::log(1.0 - std::norm(zeta)) - 0.5 * b * std::conj(alpha);
  Complex h_prev{0.0, 0.0};
  Complex h{1.0, 0.0};
  double log_scale = 0.0;
  auto amp = [&](int n) {
    if (n > 0) {
      const Complex h_next = (b * h - zeta * std::sqrt(static_cast<double>(n - 1)) * h_prev) /
                             std::sqrt(static_cast<double>(n));
      h_prev = h;
      h = h_next;
      const double big = std::max(std::abs(h), std::abs(h_prev));
      if (big > 1e150) {
        h /= big;
        h_prev /= big;
        log_scale += std::log(big);
      }
    }
    if (h == Complex{0.0, 0.0}) return Complex{0.0, 0.0};
    const auto w = LogWeight<double>::from_complex(h);
    return from_log(log_pref.real() + log_scale + w.log_magnitude, log_pref.imag() + w.phase);
  };
  return assemble(amp, n_guess, tol, true);
}

Complex displacement_matrix_element(int m, int n, Complex alpha) {
  if (m < 0 || n < 0) throw Error(Errc::InvalidArgument, "Fock indices must be >= 0");
  if (alpha == Complex{0.0, 0.0}) return m == n ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
  const double x = std::norm(alpha);
  const double log_a = 0.5 * std::log(x);
  const double theta = std::arg(alpha);
  const int lo = std::min(m, n);
  const int gap = std::abs(m - n);
  const LogWeight<double> lag = laguerre_assoc_log(lo, gap, x);
  if (lag.is_zero()) return {0.0, 0.0};
  // m >= n: sqrt(n!/m!) alpha^{m-n};  m < n: sqrt(m!/n!) (-alpha*)^{n-m}.
  const double phase = m >= n ? gap * theta : gap * (units::pi - theta);
  const double log_mag = 0.5 * (log_factorial(lo) - log_factorial(std::max(m, n))) + gap * log_a - 0.5 * x;
  return from_log(log_mag + lag.log_magnitude, phase + lag.phase);
}

FockVector displaced_number_state(int n, Complex alpha, double tol) {
  check_tolerance(tol);
  if (n < 0) throw Error(Errc::InvalidArgument, "displaced_number_state: n must be >= 0");
  const double x = std::norm(alpha);
  if (x == 0.0) {
    FockVector v;
    v.amplitudes = Eigen::VectorXcd::Zero(n + 1);
    v.amplitudes[n] = 1.0;
    v.tolerance = tol;
    return v;
  }
  const double k = tail_multiplier(tol);
  const double guess = n + x + k * std::sqrt((2.0 * n + 1.0) * (x + 1.0)) + 0.5 * k * k;
  if (guess > kMaxFockIndex) throw Error(Errc::TolUnreachable, "truncation exceeds the largest Fock index");
  auto amp = [&](int m) { return displacement_matrix_element(m, n, alpha); };
  return assemble(amp, static_cast<int>(std::ceil(guess)), tol, false);
}

NumberEnsemble thermal_ensemble(double beta, std::span<const double> energies, Complex alpha, double tol) {
  if (!(beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be > 0");
  if (energies.empty()) throw Error(Errc::InvalidArgument, "energies must not be empty");
  for (double e : energies) {
    if (!std::isfinite(e)) throw Error(Errc::InvalidArgument, "energies must be finite");
  }
  const double e_min = *std::min_element(energies.begin(), energies.end());
  auto weight = [&](double e) {
    if (e == e_min) return 1.0;
    if (std::isinf(beta)) return 0.0;
    return std::exp(-beta * (e - e_min));
  };
  if (weight(energies.back()) >= kEnsembleCutoff) {
    throw Error(Errc::DivergentPartition, "Boltzmann weights do not decay within the supplied " +
                                              std::to_string(energies.size()) + " levels");
  }

  NumberEnsemble ens;
  ens.beta = beta;
  ens.kind = alpha == Complex{0.0, 0.0} ? EnsembleKind::Thermal : EnsembleKind::ThermalCoherent;
  detail::CompensatedSum<double> z;
  for (std::size_t n = 0; n < energies.size(); ++n) {
    const double w = weight(energies[n]);
    if (w < kEnsembleCutoff) continue;
    z.add(w);
    ens.members.push_back({w, static_cast<int>(n), displaced_number_state(static_cast<int>(n), alpha, tol)});
  }
  const double partition = z.value();
  for (auto& m : ens.members) m.weight /= partition;
  return ens;
}

}  // namespace thinspec
