// SPDX-License-Identifier: Apache-2.0
#include "aabsp/exposure.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "aabsp/error.hpp"
#include "aabsp/numerics.hpp"

namespace aabsp::exposure {

namespace {

constexpr int kMaxMomentOrder = 96;

// moments[k][p] = E[S_k^p], built by convolving one uniform at a time
const std::vector<std::vector<long double>>& moment_table() {
  static const std::vector<std::vector<long double>> table = [] {
    std::vector<std::vector<long double>> t(kMaxMomentOrder + 1,
                                            std::vector<long double>(kMaxMomentOrder + 1, 0.0L));
    t[0][0] = 1.0L;
    for (int k = 1; k <= kMaxMomentOrder; ++k)
      for (int p = 0; p <= kMaxMomentOrder; ++p) {
        long double acc = 0.0L;
        for (int i = 0; i <= p; ++i)
          acc += numerics::binomial(p, i) * t[k - 1][i] / static_cast<long double>(p - i + 1);
        t[k][p] = acc;
      }
    return t;
  }();
  return table;
}

long double ipow(long double x, int p) {
  long double r = 1.0L;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

long double factorial(int k) {
  long double f = 1.0L;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

long double irwin_hall_moment(int k, int p) {
  if (k < 0 || p < 0 || k > kMaxMomentOrder || p > kMaxMomentOrder)
    throw DomainError("irwin_hall_moment: order out of range");
  return moment_table()[k][p];
}

double irwin_hall_density(int k, double x) {
  if (k < 1) throw DomainError("irwin_hall_density: need k >= 1");
  if (!(x > 0.0 && x < k)) return 0.0;
  long double y = x;
  if (y > 0.5L * k) y = k - y;  // symmetric about k/2
  long double acc = 0.0L;
  for (int i = 0; i <= k && i < y; ++i) {
    const long double term = numerics::binomial(k, i) * ipow(y - i, k - 1);
    acc += (i % 2 == 0) ? term : -term;
  }
  const double v = static_cast<double>(acc / factorial(k - 1));
  return v > 0.0 ? v : 0.0;
}

double pre_change_kernel(double w1, int n, int d1, double tau1) {
  if (d1 < 1 || d1 > n) throw DomainError("pre_change_kernel: need 1 <= d1 <= n");
  if (!(tau1 > 0.0)) return 0.0;
  const double x = (w1 - (n - d1) * tau1) / tau1;
  return std::pow(tau1, d1 - 1) * irwin_hall_density(d1, x);
}

double total_exposure_kernel(double u, int n, int d1, int r, double tau1) {
  if (d1 < 0 || d1 >= r || r > n) throw DomainError("total_exposure_kernel: need 0 <= d1 < r <= n");
  const int d2 = r - d1;
  const double start = (n - d1) * tau1;
  if (!(u > start)) return 0.0;
  const double y0 = u - n * tau1;
  if (y0 >= 0.0) {
    // all shifted arguments positive: expand the d1-th backward difference
    // as tau1^d1 E[(y0 + tau1 V)^{d2-1}] / Gamma(d2), V ~ Irwin-Hall(d1)
    if (d1 > kMaxMomentOrder || d2 - 1 > kMaxMomentOrder)
      throw DomainError("total_exposure_kernel: order too large");
    long double acc = 0.0L;
    for (int k = 0; k <= d2 - 1; ++k)
      acc += numerics::binomial(d2 - 1, k) * ipow(y0, d2 - 1 - k) * ipow(tau1, k) *
             irwin_hall_moment(d1, k);
    return static_cast<double>(ipow(tau1, d1) * acc / factorial(d2 - 1));
  }
  long double acc = 0.0L;
  for (int i = 0; i <= d1; ++i) {
    const long double arg = static_cast<long double>(u) - static_cast<long double>(n - d1 + i) * tau1;
    if (arg <= 0.0L) break;
    const long double term = numerics::binomial(d1, i) * ipow(arg, r - 1);
    acc += (i % 2 == 0) ? term : -term;
  }
  const double v = static_cast<double>(acc / factorial(r - 1));
  return v > 0.0 ? v : 0.0;
}

double censored_kernel(double w1, int n, int r, double tau1) {
  if (r < 1 || r > n) throw DomainError("censored_kernel: need 1 <= r <= n");
  if (!(w1 > 0.0 && w1 < n * tau1)) return 0.0;
  long double acc = 0.0L;
  for (int k = r; k <= n; ++k) {
    long double inner = 0.0L;
    for (int j = 0; j <= k; ++j) {
      const long double arg = static_cast<long double>(w1) - static_cast<long double>(n - k + j) * tau1;
      if (arg <= 0.0L) break;
      const long double term = numerics::binomial(k, j) * ipow(arg, r - 1);
      inner += (j % 2 == 0) ? term : -term;
    }
    acc += numerics::binomial(n, k) * inner;
  }
  const double v = static_cast<double>(acc / factorial(r - 1));
  return v > 0.0 ? v : 0.0;
}

double unelevated_kernel(double u, int n, int r, int m, double tau1) {
  if (m < 0 || m > r || r > n) throw DomainError("unelevated_kernel: need 0 <= m <= r <= n");
  if (!(u > 0.0)) return 0.0;
  long double acc = ipow(u, r - 1) / factorial(r - 1);
  for (int d1 = 0; d1 < m; ++d1)
    acc -= numerics::binomial(n, d1) * total_exposure_kernel(u, n, d1, r, tau1);
  const double v = static_cast<double>(acc);
  return v > 0.0 ? v : 0.0;
}

}  // namespace aabsp::exposure
