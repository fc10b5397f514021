#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace fl {

/// Chebyshev interpolant of f on [a, b] at degree n (n+1 nodes), evaluated
/// by Clenshaw recurrence.  Good to near machine precision for analytic f.
class ChebInterp {
 public:
  ChebInterp() = default;
  ChebInterp(const std::function<double(double)>& f, double a, double b, int n)
      : a_(a), b_(b), coef_(n + 1) {
    const int m = n + 1;
    std::vector<double> fv(m);
    for (int k = 0; k < m; ++k) {
      const double x = std::cos(M_PI * (k + 0.5) / m);
      fv[k] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
    }
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k)
        s += fv[k] * std::cos(M_PI * j * (k + 0.5) / m);
      coef_[j] = 2.0 * s / m;
    }
  }

  double operator()(double x) const {
    const double t = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int j = static_cast<int>(coef_.size()) - 1; j >= 1; --j) {
      const double b0 = 2.0 * t * b1 - b2 + coef_[j];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + 0.5 * coef_[0];
  }

  double lo() const { return a_; }
  double hi() const { return b_; }

  /// Magnitude of the trailing coefficient pair, a cheap truncation-error
  /// proxy.
  double tail_estimate() const {
    const std::size_t n = coef_.size();
    if (n < 2) return 0.0;
    return std::abs(coef_[n - 1]) + std::abs(coef_[n - 2]);
  }

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> coef_;
};

}  // namespace fl
