#pragma once

// Special-function kernels shared by the state constructors: log-factorial,
// physicists' Hermite polynomials and generalized Laguerre polynomials.
// Recurrences only; closed-form factorial sums are never used.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>

#include "thinspec/errors.hpp"
#include "thinspec/units.hpp"

namespace thinspec {

/// Largest Hermite order accepted by hermite().
inline constexpr int kHermiteMaxOrder = 4096;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

/// A complex number stored as (ln|z|, arg z). Zero has log_magnitude = -inf.
template <typename Real = double>
struct LogWeight {
  Real log_magnitude{0};
  Real phase{0};  // in (-pi, pi]

  static Real wrap_phase(Real p) {
    constexpr Real two_pi = Real(2) * Real(units::pi);
    p = std::remainder(p, two_pi);  // [-pi, pi]
    if (p <= -Real(units::pi)) p += two_pi;
    return p;
  }

  static LogWeight from_complex(const std::complex<Real>& z) {
    return {std::log(std::abs(z)), wrap_phase(std::arg(z))};
  }
  static LogWeight from_real(Real x) {
    return {std::log(std::abs(x)), x < 0 ? Real(units::pi) : Real(0)};
  }
  static LogWeight zero() { return {-std::numeric_limits<Real>::infinity(), Real(0)}; }

  bool is_zero() const { return log_magnitude == -std::numeric_limits<Real>::infinity(); }

  std::complex<Real> to_complex() const {
    if (is_zero()) return {0, 0};
    return std::polar(std::exp(log_magnitude), phase);
  }

  LogWeight& operator*=(const LogWeight& o) {
    log_magnitude += o.log_magnitude;
    phase = wrap_phase(phase + o.phase);
    return *this;
  }
  friend LogWeight operator*(LogWeight a, const LogWeight& b) { return a *= b; }
};

/// ln(n!). Exact summation up to n = 30, Stirling series beyond.
double log_factorial(std::int64_t n);

/// Physicists' Hermite polynomial H_n(z) by the three-term recurrence.
/// Throws Errc::Overflow when the value leaves the representable range.
template <typename Scalar>
Scalar hermite(int n, const Scalar& z) {
  if (n < 0 || n > kHermiteMaxOrder) {
    throw Error(Errc::InvalidArgument, "hermite order out of range");
  }
  Scalar h0(1);
  if (n == 0) return h0;
  Scalar h1 = Scalar(2) * z;
  for (int k = 1; k < n; ++k) {
    using Real = decltype(std::abs(h1));
    Scalar h2 = Scalar(2) * z * h1 - Scalar(Real(2) * Real(k)) * h0;
    h0 = h1;
    h1 = h2;
    if (!std::isfinite(std::abs(h1))) {
      throw Error(Errc::Overflow, "hermite: H_" + std::to_string(k + 1) + " overflows");
    }
  }
  return h1;
}

namespace detail {
inline void check_laguerre_args(int n, int k, double x) {
  if (n < 0) throw Error(Errc::InvalidArgument, "laguerre: n must be >= 0");
  if (n + k < 0) throw Error(Errc::InvalidArgument, "laguerre: n + k must be >= 0");
  if (!(x >= 0)) throw Error(Errc::InvalidArgument, "laguerre: x must be >= 0");
}
}  // namespace detail

/// Generalized Laguerre polynomial L_n^{(k)}(x), forward recurrence in n.
/// k may be negative provided n + k >= 0; that case goes through the
/// reflection L_n^{(-k)} = (-x)^k (n-k)!/n! L_{n-k}^{(k)}.
template <typename Real>
Real laguerre_assoc(int n, int k, Real x) {
  detail::check_laguerre_args(n, k, static_cast<double>(x));
  if (k < 0) {
    const int m = -k;
    Real ratio(1);
    for (int j = n - m + 1; j <= n; ++j) ratio *= -x / Real(j);
    return ratio * laguerre_assoc(n - m, m, x);
  }
  Real l0(1);
  if (n == 0) return l0;
  Real l1 = Real(1) + Real(k) - x;
  for (int j = 1; j < n; ++j) {
    Real l2 = ((Real(2 * j + 1 + k) - x) * l1 - Real(j + k) * l0) / Real(j + 1);
    l0 = l1;
    l1 = l2;
    if (!std::isfinite(l1)) {
      throw Error(Errc::Overflow, "laguerre: L_" + std::to_string(j + 1) + " overflows");
    }
  }
  return l1;
}

/// Scaled path for laguerre_assoc: same recurrence with running rescaling,
/// result returned as (ln|L|, sign as phase 0 or pi). Never overflows.
LogWeight<double> laguerre_assoc_log(int n, int k, double x);

}  // namespace thinspec
