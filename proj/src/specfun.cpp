#include "thinspec/specfun.hpp"

#include <array>
#include <limits>

namespace thinspec {

namespace {

constexpr int kExactLimit = 30;

const std::array<double, kExactLimit + 1>& exact_log_factorials() {
  static const auto table = [] {
    std::array<double, kExactLimit + 1> t{};
    long double acc = 0.0L;
    t[0] = 0.0;
    for (int k = 1; k <= kExactLimit; ++k) {
      acc += std::log(static_cast<long double>(k));
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

}  // namespace

double log_factorial(std::int64_t n) {
  if (n < 0) throw Error(Errc::InvalidArgument, "log_factorial: n must be >= 0");
  if (n <= kExactLimit) return exact_log_factorials()[static_cast<std::size_t>(n)];

  // ln n! = (n + 1/2) ln(n + 1) - (n + 1) + ln(2 pi)/2 + Bernoulli tail in 1/(n + 1).
  const long double x = static_cast<long double>(n) + 1.0L;
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  const long double series =
      inv * (1.0L / 12 - inv2 * (1.0L / 360 - inv2 * (1.0L / 1260 - inv2 * (1.0L / 1680))));
  const long double half_log_two_pi = 0.918938533204672741780329736405617639L;
  return static_cast<double>((x - 0.5L) * std::log(x) - x + half_log_two_pi + series);
}

LogWeight<double> laguerre_assoc_log(int n, int k, double x) {
  detail::check_laguerre_args(n, k, x);
  if (n == 0) return {0.0, 0.0};
  double l0 = 1.0;
  double l1 = 1.0 + k - x;
  double log_scale = 0.0;
  for (int j = 1; j < n; ++j) {
    const double l2 = ((2.0 * j + 1.0 + k - x) * l1 - static_cast<double>(j + k) * l0) / (j + 1.0);
    l0 = l1;
    l1 = l2;
    const double big = std::max(std::abs(l0), std::abs(l1));
    if (big > 1e150) {
      l0 /= big;
      l1 /= big;
      log_scale += std::log(big);
    }
  }
  if (l1 == 0.0) return LogWeight<double>::zero();
  LogWeight<double> w = LogWeight<double>::from_real(l1);
  w.log_magnitude += log_scale;
  return w;
}

}  // namespace thinspec
