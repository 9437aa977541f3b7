// SPDX-License-Identifier: Apache-2.0
#include "aabsp/numerics.hpp"

#include <numbers>

namespace aabsp::numerics {

void QuadSettings::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("QuadSettings: rel_tol must be positive");
  if (!(abs_tol >= 0.0)) throw DomainError("QuadSettings: abs_tol must be nonnegative");
  if (max_subdivisions < 1) throw DomainError("QuadSettings: max_subdivisions must be >= 1");
}

Bracket::Bracket(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) throw DomainError("Bracket: need lo < hi");
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 5000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge", h, 0.0);
}

}  // namespace

BetaPair incomplete_beta_pair(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("incomplete beta: shape parameters must be positive and finite");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return {0.0, 1.0};
  if (x == 1.0) return {1.0, 0.0};
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = std::min(1.0, front * beta_cf(x, a, b) / a);
    return {lower, 1.0 - lower};
  }
  const double upper = std::min(1.0, front * beta_cf(1.0 - x, b, a) / b);
  return {1.0 - upper, upper};
}

double regularized_incomplete_beta(double x, double a, double b) {
  return incomplete_beta_pair(x, a, b).lower;
}

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma: a must be positive");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // power series
    double ap = a, del = 1.0 / a, sum = del;
    for (int n = 0; n < 10000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-17) return std::min(1.0, sum * std::exp(log_front));
    }
    throw ConvergenceError("incomplete gamma series did not converge", sum, 0.0);
  }
  // continued fraction for the upper tail
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= 1e-16) return std::max(0.0, 1.0 - std::exp(log_front) * h);
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge", h, 0.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  k = std::min(k, n - k);
  long double v = 1.0L;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return std::round(v);
}

// ---------------------------------------------------------------------------

std::vector<double> PiecewiseChebyshev::nodes(int degree) {
  const int n = degree + 1;
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = std::cos(std::numbers::pi * (k + 0.5) / n);
  return t;
}

std::vector<double> PiecewiseChebyshev::coefficients(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += v[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
    c[j] = 2.0 * acc / n;
  }
  c[0] *= 0.5;
  return c;
}

double PiecewiseChebyshev::operator()(double x) const {
  if (coeffs_.empty()) return 0.0;
  std::size_t i;
  if (x <= breaks_.front()) {
    i = 0;
    x = breaks_.front();
  } else if (x >= breaks_.back()) {
    i = coeffs_.size() - 1;
    x = breaks_.back();
  } else {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  }
  const double a = breaks_[i], b = breaks_[i + 1];
  const double t = (2.0 * x - a - b) / (b - a);
  const std::vector<double>& c = coeffs_[i];
  // Clenshaw recurrence
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double tmp = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = tmp;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace aabsp::numerics

namespace aabsp::numerics {

std::vector<double> scan_grid(const Bracket& br, int grid_points) {
  if (grid_points < 2) throw DomainError("scan_grid: need at least 2 points");
  const double h = br.width() / (grid_points - 1);
  std::vector<double> xs(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) xs[i] = (i == grid_points - 1) ? br.hi : br.lo + i * h;
  return xs;
}

}  // namespace aabsp::numerics
