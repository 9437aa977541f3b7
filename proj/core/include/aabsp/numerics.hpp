// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "aabsp/error.hpp"

namespace aabsp::numerics {

struct QuadSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;

  void validate() const;
};

struct Bracket {
  double lo;
  double hi;

  Bracket(double lo, double hi);
  double width() const { return hi - lo; }
};

double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double x, double a, double b);

// I_x(a,b) and its complement 1 - I_x(a,b) = I_{1-x}(b,a), each computed
// without cancellation from whichever continued fraction converges.
struct BetaPair {
  double lower;
  double upper;
};
BetaPair incomplete_beta_pair(double x, double a, double b);

// Regularized lower incomplete gamma P(a, x).
double regularized_lower_gamma(double a, double x);

// log C(n, k) and exact-ish C(n, k) for the small counts used here.
double log_binomial(int n, int k);
long double binomial(int n, int k);

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (10/21) quadrature.

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7, 9).
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b;
  double value;
  double error;
  double floor;  // roundoff level below which subdivision cannot help
};

template <class F>
Segment gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double aw = std::abs(half);
  const double result = resk * half;
  resabs *= aw;
  resasc *= aw;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double floor = 50.0 * eps * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(floor, err);
  return {a, b, result, err, floor};
}

inline bool heap_less(const Segment& x, const Segment& y) { return x.error < y.error; }

}  // namespace detail

// Globally adaptive bisection driven by the largest local error estimate.
// Never throws on non-convergence; check `converged`.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadSettings& s = {}) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::vector<detail::Segment> heap;
  heap.reserve(static_cast<std::size_t>(s.max_subdivisions) + 1);
  heap.push_back(detail::gk21(f, a, b));
  out.evaluations = 21;
  double total = heap.front().value;
  double errsum = heap.front().error;
  double floorsum = heap.front().floor;

  auto done = [&] {
    const double tol = std::max(s.abs_tol, s.rel_tol * std::abs(total));
    return errsum <= tol || errsum <= 2.0 * floorsum;
  };

  int subdivisions = 1;
  while (!done()) {
    if (subdivisions >= s.max_subdivisions) break;
    std::pop_heap(heap.begin(), heap.end(), detail::heap_less);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval cannot be split in floating point
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), detail::heap_less);
      break;
    }
    const detail::Segment left = detail::gk21(f, worst.a, mid);
    const detail::Segment right = detail::gk21(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    errsum += left.error + right.error - worst.error;
    floorsum += left.floor + right.floor - worst.floor;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), detail::heap_less);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), detail::heap_less);
    ++subdivisions;
  }
  // re-sum to shed the drift of the running updates
  total = 0.0;
  errsum = 0.0;
  floorsum = 0.0;
  for (const auto& seg : heap) {
    total += seg.value;
    errsum += seg.error;
    floorsum += seg.floor;
  }
  out.value = total;
  out.abs_error = errsum;
  out.converged = done();
  return out;
}

template <class F>
double integrate_1d(F&& f, const Bracket& br, const QuadSettings& s = {}) {
  const QuadResult q = integrate_adaptive(f, br.lo, br.hi, s);
  if (!q.converged)
    throw ConvergenceError("integrate_1d: subdivision budget exhausted", q.value, q.abs_error);
  return q.value;
}

// Integral over [lo, inf) through x = lo + scale * t / (1 - t).
template <class F>
QuadResult integrate_semi_infinite_adaptive(F&& f, double lo, const QuadSettings& s = {},
                                            double scale = 1.0) {
  auto g = [&](double t) {
    const double u = 1.0 - t;
    const double x = lo + scale * t / u;
    if (!std::isfinite(x)) return 0.0;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v * scale / (u * u);
  };
  return integrate_adaptive(g, 0.0, 1.0, s);
}

template <class F>
double integrate_semi_infinite(F&& f, double lo, const QuadSettings& s = {}, double scale = 1.0) {
  const QuadResult q = integrate_semi_infinite_adaptive(f, lo, s, scale);
  if (!q.converged)
    throw ConvergenceError("integrate_semi_infinite: subdivision budget exhausted", q.value,
                           q.abs_error);
  return q.value;
}

// ---------------------------------------------------------------------------
// Root of a strictly monotone function.

enum class RootLocation { inside, below, above };

struct RootResult {
  double x;
  RootLocation location;
  int evaluations;
};

// If f has no sign change on the bracket the root lies outside it; the
// result then reports which side and x is the nearer bracket end.
template <class F>
RootResult find_root_monotone(F&& f, const Bracket& br, double tol = 1e-9) {
  if (!(tol > 0.0)) throw DomainError("find_root_monotone: tol must be positive");
  double a = br.lo, b = br.hi;
  double fa = f(a), fb = f(b);
  int evals = 2;
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw ModelViolation("find_root_monotone: non-finite value at bracket end");
  if (fa == 0.0) return {a, RootLocation::inside, evals};
  if (fb == 0.0) return {b, RootLocation::inside, evals};
  if ((fa > 0.0) == (fb > 0.0)) {
    if (fa == fb) throw ModelViolation("find_root_monotone: function is flat, no root");
    const bool increasing = fa < fb;
    const bool positive = fa > 0.0;
    // increasing & positive, or decreasing & negative: root below lo
    if (increasing == positive) return {a, RootLocation::below, evals};
    return {b, RootLocation::above, evals};
  }
  const bool increasing = fa < fb;
  const double slack = 1e-12 * (std::abs(fa) + std::abs(fb));
  double ta = fa, tb = fb;  // true end values; fa/fb get Illinois-scaled
  int side = 0;  // Illinois bookkeeping: which end was retained last
  double width_before = b - a;
  int slow_steps = 0;
  while (b - a > tol) {
    double x;
    if (slow_steps >= 2) {
      x = 0.5 * (a + b);
      slow_steps = 0;
    } else {
      x = b - fb * (b - a) / (fb - fa);
      const double guard = 0.5 * tol;
      if (!(x > a + guard)) x = std::min(a + guard, 0.5 * (a + b));
      if (!(x < b - guard)) x = std::max(b - guard, 0.5 * (a + b));
    }
    const double fx = f(x);
    ++evals;
    if (!std::isfinite(fx)) throw ModelViolation("find_root_monotone: non-finite value");
    const bool out_of_order =
        increasing ? (fx < ta - slack || fx > tb + slack) : (fx > ta + slack || fx < tb - slack);
    if (out_of_order)
      throw ModelViolation("find_root_monotone: non-monotone sample at x=" + std::to_string(x));
    if (fx == 0.0) return {x, RootLocation::inside, evals};
    if ((fx > 0.0) == (fb > 0.0)) {
      b = x;
      fb = tb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = ta = fx;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    const double w = b - a;
    slow_steps = (w > 0.5 * width_before) ? slow_steps + 1 : 0;
    width_before = w;
    if (evals > 400) break;
  }
  return {std::abs(ta) <= std::abs(tb) ? a : b, RootLocation::inside, evals};
}

// ---------------------------------------------------------------------------
// Grid scan followed by golden-section refinement.

struct ScalarMin {
  double argmin;
  double min;
  int evaluations;
};

// Golden-section refinement around the best of precomputed grid values
// (xs ascending).  Grid points and smaller arguments win ties.
template <class F>
ScalarMin refine_grid_minimum(F&& f, const std::vector<double>& xs, const std::vector<double>& fs,
                              double tol = 1e-3) {
  const int n = static_cast<int>(xs.size());
  if (n < 3 || fs.size() != xs.size())
    throw DomainError("refine_grid_minimum: need at least 3 matching grid points");
  if (!(tol > 0.0)) throw DomainError("refine_grid_minimum: tol must be positive");
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (fs[i] < fs[best]) best = i;
  int evals = 0;
  double bx = xs[best], bf = fs[best];
  double lo = xs[std::max(best - 1, 0)];
  double hi = xs[std::min(best + 1, n - 1)];

  constexpr double invphi = 0.61803398874989484820;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  evals += 2;
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
    ++evals;
  }
  // strict improvement required, so grid points (and smaller x) win ties
  if (f1 < bf || (f1 == bf && x1 < bx)) {
    bx = x1;
    bf = f1;
  }
  if (f2 < bf) {
    bx = x2;
    bf = f2;
  }
  return {bx, bf, evals};
}

// Evenly spaced grid on the bracket, endpoints included.
std::vector<double> scan_grid(const Bracket& br, int grid_points);

template <class F>
ScalarMin minimize_scalar_unimodal(F&& f, const Bracket& br, double tol = 1e-3,
                                   int grid_points = 25) {
  if (grid_points < 3) throw DomainError("minimize_scalar_unimodal: need at least 3 grid points");
  if (!(tol > 0.0)) throw DomainError("minimize_scalar_unimodal: tol must be positive");
  const std::vector<double> xs = scan_grid(br, grid_points);
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);
  ScalarMin m = refine_grid_minimum(f, xs, fs, tol);
  m.evaluations += grid_points;
  return m;
}

// ---------------------------------------------------------------------------
// Piecewise Chebyshev interpolant on [a, b], adaptively bisected until the
// trailing coefficients of every piece are negligible.

class PiecewiseChebyshev {
 public:
  struct Settings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int degree = 24;
    int max_depth = 16;
  };

  PiecewiseChebyshev() = default;

  template <class F>
  static PiecewiseChebyshev fit(F&& f, double a, double b, const Settings& s = {});

  double operator()(double x) const;
  double lo() const { return breaks_.empty() ? 0.0 : breaks_.front(); }
  double hi() const { return breaks_.empty() ? 0.0 : breaks_.back(); }
  std::size_t pieces() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }

 private:
  static std::vector<double> coefficients(const std::vector<double>& samples);
  static std::vector<double> nodes(int degree);

  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
};

template <class F>
PiecewiseChebyshev PiecewiseChebyshev::fit(F&& f, double a, double b, const Settings& s) {
  PiecewiseChebyshev out;
  if (!(b > a)) return out;
  const std::vector<double> t = nodes(s.degree);
  double scale = 0.0;

  struct Piece {
    double a, b;
    std::vector<double> c;
  };
  std::vector<Piece> accepted;

  auto sample = [&](double pa, double pb) {
    std::vector<double> v(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      v[k] = f(0.5 * (pa + pb) + 0.5 * (pb - pa) * t[k]);
      scale = std::max(scale, std::abs(v[k]));
    }
    return coefficients(v);
  };

  // depth-first, left to right, so pieces come out sorted
  struct Pending {
    double a, b;
    int depth;
  };
  std::vector<Pending> stack{{a, b, 0}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    std::vector<double> c = sample(p.a, p.b);
    const std::size_t n = c.size();
    const double tail = std::abs(c[n - 1]) + std::abs(c[n - 2]) + std::abs(c[n - 3]);
    const double tol = std::max(s.abs_tol, s.rel_tol * scale);
    if (tail <= tol || p.depth >= s.max_depth) {
      // drop negligible trailing terms to cheapen evaluation
      std::size_t keep = n;
      while (keep > 1 && std::abs(c[keep - 1]) <= 0.01 * tol) --keep;
      c.resize(keep);
      accepted.push_back({p.a, p.b, std::move(c)});
    } else {
      const double mid = 0.5 * (p.a + p.b);
      stack.push_back({mid, p.b, p.depth + 1});
      stack.push_back({p.a, mid, p.depth + 1});
    }
  }
  out.breaks_.reserve(accepted.size() + 1);
  out.breaks_.push_back(a);
  for (auto& p : accepted) {
    out.breaks_.push_back(p.b);
    out.coeffs_.push_back(std::move(p.c));
  }
  out.breaks_.back() = b;
  return out;
}

}  // namespace aabsp::numerics
