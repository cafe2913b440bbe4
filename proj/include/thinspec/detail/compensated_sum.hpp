#pragma once

#include <cmath>
#include <complex>

namespace thinspec::detail {

// Neumaier summation. Results depend only on the order of add() calls.
template <typename Real>
class CompensatedSum {
public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

private:
  Real sum_{0};
  Real comp_{0};
};

template <typename Real>
class CompensatedSum<std::complex<Real>> {
public:
  void add(const std::complex<Real>& z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<Real> value() const { return {re_.value(), im_.value()}; }

private:
  CompensatedSum<Real> re_;
  CompensatedSum<Real> im_;
};

}  // namespace thinspec::detail
