// SPDX-License-Identifier: Apache-2.0
#include "aabsp/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aabsp/exposure.hpp"

namespace aabsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long double multinomial(const std::vector<int>& k) {
  long double v = 1.0L;
  int total = 0;
  for (int x : k) {
    total += x;
    v *= numerics::binomial(total, x);
  }
  return v;
}

// Laplace transform of the Gamma prior of lambda_j at s.
double gamma_laplace(const CausePrior& c, double s) {
  return std::exp(-c.alpha * std::log1p(s / c.beta));
}

// prod_j E[exp(-lambda_j s)]
double prior_laplace(const PriorSpec& priors, double s) {
  double v = 0.0;
  for (const CausePrior& c : priors.causes()) v -= c.alpha * std::log1p(s / c.beta);
  return std::exp(v);
}

// E over (lambda_j, phi_j) of exp(-lambda_j (c + s phi_j^delta)).
double cause_laplace(const CausePrior& p, double c, double s, bool elevated) {
  if (!elevated || s == 0.0) return gamma_laplace(p, c + s);
  const double X = p.beta + c;
  const double a = std::log1p(s / X);
  const double b = std::log1p(s * p.l / X);
  // (1/(l-1)) int_1^l (beta/(X + s phi))^alpha dphi
  const double lead = p.alpha * std::log(p.beta / X) - std::log((p.l - 1.0) * s / X);
  if (std::abs(p.alpha - 1.0) < 1e-12) return std::exp(lead) * (b - a);
  const double e = 1.0 - p.alpha;
  // (e^{e a} - e^{e b}) / (alpha - 1), written without cancellation
  return std::exp(lead + e * b) * std::expm1(e * (a - b)) / (p.alpha - 1.0);
}

double total_alpha(const PriorSpec& priors) {
  double s = 0.0;
  for (const CausePrior& c : priors.causes()) s += c.alpha;
  return s;
}

double typical_rate_scale(const PriorSpec& priors) {
  double b = 0.0;
  for (const CausePrior& c : priors.causes()) b += c.beta;
  return b / priors.J();
}

numerics::QuadSettings outer_settings() {
  numerics::QuadSettings qs;
  qs.rel_tol = 1e-10;
  qs.abs_tol = 1e-13;
  qs.max_subdivisions = 600;
  return qs;
}

// Integrates over [a, b] split at the given interior breakpoints.
template <class F>
double integrate_pieces(F&& f, double a, double b, std::vector<double> breaks,
                        const numerics::QuadSettings& qs, double accept_abs) {
  if (!(b > a)) return 0.0;
  if (std::isinf(b)) {
    // finite knots first, then the tail past the last one
    const double tail = breaks.empty() ? a : std::max(a, *std::max_element(breaks.begin(), breaks.end()));
    const numerics::QuadResult q = numerics::integrate_semi_infinite_adaptive(f, tail, qs);
    if (!q.converged && q.abs_error > accept_abs)
      throw ConvergenceError("risk tail integral did not converge", q.value, q.abs_error);
    return integrate_pieces(f, a, tail, std::move(breaks), qs, accept_abs) + q.value;
  }
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  double prev = a;
  for (double x : breaks) {
    if (x <= prev) continue;
    if (x > b) break;
    const numerics::QuadResult q = numerics::integrate_adaptive(f, prev, x, qs);
    if (!q.converged && q.abs_error > accept_abs)
      throw ConvergenceError("risk integral did not converge on [" + std::to_string(prev) + ", " +
                                 std::to_string(x) + "]",
                             q.value, q.abs_error);
    total += q.value;
    prev = x;
  }
  return total;
}

// Density of the ordered failure process contributes the knots k tau1.
std::vector<double> knots(int first, int last, double tau1) {
  std::vector<double> v;
  for (int k = first; k <= last; ++k) v.push_back(k * tau1);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

RelativeRisks relative_risks(const Theta& theta, bool elevated) {
  const int J = theta.J();
  RelativeRisks out{std::vector<double>(J), std::vector<double>(J)};
  double s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < J; ++j) {
    s1 += theta.lambda()[j];
    s2 += theta.lambda()[j] * (elevated ? theta.phi()[j] : 1.0);
  }
  if (!(s1 > 0.0)) throw DomainError("relative_risks: total hazard must be positive");
  for (int j = 0; j < J; ++j) {
    out.p1[j] = theta.lambda()[j] / s1;
    out.p2[j] = theta.lambda()[j] * (elevated ? theta.phi()[j] : 1.0) / s2;
  }
  return out;
}

double expected_stress_count(const Plan& plan, const PriorSpec& priors) {
  if (plan.is_none() || plan.m == 0) return 0.0;
  return expected_stress_count_all_m(plan.n, plan.r, plan.tau1, priors)[plan.m];
}

std::vector<double> expected_stress_count_all_m(int n, int r, double tau1,
                                                const PriorSpec& priors) {
  if (n < 1 || r < 1 || r > n) throw DomainError("expected_stress_count: need 1 <= r <= n");
  std::vector<double> out(static_cast<std::size_t>(r + 1), 0.0);
  long double total = 0.0L;
  for (int d1 = 0; d1 < r; ++d1) {
    if (d1 > 0 && tau1 == 0.0) {
      out[d1 + 1] = out[d1];
      continue;
    }
    long double inner = 0.0L;
    for (int i = 0; i <= d1; ++i) {
      const long double term =
          numerics::binomial(d1, i) * prior_laplace(priors, (n - d1 + i) * tau1);
      inner += (i % 2 == 0) ? term : -term;
    }
    total += (n - d1) * numerics::binomial(n, d1) * inner;
    out[d1 + 1] = std::max(0.0, static_cast<double>(total));
  }
  return out;
}

std::vector<double> expected_duration_all_m(int n, int r, double tau1, const PriorSpec& priors) {
  if (n < 1 || r < 1 || r > n) throw DomainError("expected_duration: need 1 <= r <= n");
  std::vector<double> out(static_cast<std::size_t>(r + 1), kInf);
  if (total_alpha(priors) <= 1.0) return out;

  // P(N(t) < r) averaged over the prior, expanded in exponentials
  auto survival_before = [&](double t) {
    long double total = 0.0L;
    for (int k = 0; k < r; ++k) {
      long double inner = 0.0L;
      for (int i = 0; i <= k; ++i) {
        const long double term = numerics::binomial(k, i) * prior_laplace(priors, (n - k + i) * t);
        inner += (i % 2 == 0) ? term : -term;
      }
      total += numerics::binomial(n, k) * inner;
    }
    return static_cast<double>(total);
  };
  numerics::QuadSettings qs;
  qs.rel_tol = 1e-10;
  qs.abs_tol = 1e-14;
  qs.max_subdivisions = 1000;
  double part_a = 0.0;
  if (tau1 > 0.0) part_a = numerics::integrate_adaptive(survival_before, 0.0, tau1, qs).value;

  // After tau1 with N(tau1) = k < r: remaining time sum_{i=k+1}^r 1/((n-i+1) mu),
  // and E[1{N(tau1)=k} / mu] = int_0^inf E[1{N(tau1)=k} exp(-s mu)] ds.
  // The stress path (mu with or without acceleration) is 1{k < m}.
  const double scale = typical_rate_scale(priors) + n * tau1;
  auto after = [&](int k, bool elevated) {
    auto integrand = [&](double s) {
      long double inner = 0.0L;
      for (int i = 0; i <= k; ++i) {
        double prod = 1.0;
        for (const CausePrior& p : priors.causes())
          prod *= cause_laplace(p, (n - k + i) * tau1, s, elevated);
        const long double term = numerics::binomial(k, i) * prod;
        inner += (i % 2 == 0) ? term : -term;
      }
      return static_cast<double>(numerics::binomial(n, k) * inner);
    };
    return numerics::integrate_semi_infinite_adaptive(integrand, 0.0, qs, scale).value;
  };
  std::vector<double> plain(static_cast<std::size_t>(r), 0.0), fast(plain);
  for (int k = 0; k < r; ++k) {
    if (tau1 == 0.0 && k > 0) break;
    double harmonic = 0.0;
    for (int i = k + 1; i <= r; ++i) harmonic += 1.0 / (n - i + 1);
    plain[k] = harmonic * after(k, false);
    fast[k] = harmonic * after(k, true);
  }
  double unelevated = 0.0;
  for (int k = 0; k < r; ++k) unelevated += plain[k];
  double acc = part_a + unelevated;
  out[0] = acc;
  for (int m = 1; m <= r; ++m) {
    acc += fast[m - 1] - plain[m - 1];
    out[m] = acc;
  }
  return out;
}

double expected_duration(const Plan& plan, const PriorSpec& priors) {
  if (plan.is_none()) return 0.0;
  return expected_duration_all_m(plan.n, plan.r, plan.tau1, priors)[plan.m];
}

double accelerated_duration_bound(int n, int r, const PriorSpec& priors) {
  if (n < 1 || r < 1 || r > n) throw DomainError("accelerated_duration_bound: need 1 <= r <= n");
  if (total_alpha(priors) <= 1.0) return kInf;
  double harmonic = 0.0;
  for (int i = 1; i <= r; ++i) harmonic += 1.0 / (n - i + 1);
  numerics::QuadSettings qs;
  qs.rel_tol = 1e-11;
  qs.abs_tol = 1e-14;
  qs.max_subdivisions = 1000;
  auto integrand = [&](double s) {
    double prod = 1.0;
    for (const CausePrior& p : priors.causes()) prod *= cause_laplace(p, 0.0, s, true);
    return prod;
  };
  const auto q = numerics::integrate_semi_infinite_adaptive(integrand, 0.0, qs,
                                                            typical_rate_scale(priors));
  return harmonic * q.value;
}

DensityValue joint_density(double w1, double w2, const FailureCounts& counts, const Theta& theta,
                           const Plan& plan) {
  if (plan.is_none()) throw DomainError("joint_density: plan has no test");
  if (counts.J() != theta.J()) throw DomainError("joint_density: dimension mismatch");
  if (counts.total() != plan.r) throw DomainError("joint_density: counts must total r");
  const int n = plan.n, r = plan.r, J = theta.J();
  const int d1 = counts.d1(), d2 = counts.d2();
  const double tau1 = plan.tau1;
  const bool elevated = d1 < plan.m;

  DensityValue out;
  double rate1 = 0.0, rate2 = 0.0, log_rates = 0.0;
  for (int j = 0; j < J; ++j) {
    const double lam = theta.lambda()[j];
    const double lam2 = lam * (elevated ? theta.phi()[j] : 1.0);
    rate1 += lam;
    rate2 += lam2;
    if (counts.before(j) > 0) log_rates += counts.before(j) * std::log(lam);
    if (counts.after(j) > 0) log_rates += counts.after(j) * std::log(lam2);
  }
  const double rate_factor = std::exp(log_rates - rate1 * w1 - rate2 * w2);

  if (d1 == r) {
    out.w2_degenerate = true;
    if (w2 != 0.0) return out;
    const double k = exposure::censored_kernel(w1, n, r, tau1);
    out.value = static_cast<double>(multinomial(counts.before())) * k * rate_factor;
    return out;
  }
  if (w2 <= 0.0) return out;
  const double w2_kernel = std::exp((d2 - 1) * std::log(w2) - std::lgamma(d2));
  const double weight = static_cast<double>(numerics::binomial(n, d1) *
                                            multinomial(counts.before()) *
                                            multinomial(counts.after()));
  if (d1 == 0) {
    out.w1_degenerate = true;
    if (std::abs(w1 - n * tau1) > 1e-12 * std::max(1.0, n * tau1)) return out;
    out.value = weight * w2_kernel * rate_factor;
    return out;
  }
  out.value = weight * exposure::pre_change_kernel(w1, n, d1, tau1) * w2_kernel * rate_factor;
  return out;
}

std::vector<FailureCounts> enumerate_counts(int r, int J) {
  if (r < 0 || J < 1) throw DomainError("enumerate_counts: need r >= 0, J >= 1");
  std::vector<FailureCounts> out;
  std::vector<int> cells(static_cast<std::size_t>(2 * J), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == 2 * J - 1) {
      cells[pos] = left;
      out.emplace_back(std::vector<int>(cells.begin(), cells.begin() + J),
                       std::vector<int>(cells.begin() + J, cells.end()));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cells[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, r);
  return out;
}

double realized_loss(const SuffStats& stats, Action decision, const Theta& theta, const Plan& plan,
                     const CostModel& costs, const LossPoly& loss, double t_r) {
  double v = (decision == Action::accept) ? loss(theta.lambda()) : costs.rejection();
  v += plan.n * costs.sampling() - (plan.n - plan.r) * costs.salvage();
  if (stats.elevated) v += (plan.n - stats.counts.d1()) * costs.stress();
  v += t_r * costs.time();
  return v;
}

// ---------------------------------------------------------------------------
// Direct evaluation pieces shared by the reference path and the cache.

namespace {

// Phi_d(w1): inner w2 integral over the rejection strip.
double inner_phi(const PosteriorKernel& kernel, int d2, const LossPoly& loss, double C_r, double c,
                 double w1) {
  if (!(w1 < c)) return 0.0;
  // c = +inf: a_0 >= C_r, every point rejects
  const double c1 = std::isinf(c) ? c : threshold_c1(w1, kernel, loss, C_r, c);
  if (!(c1 > 0.0)) return 0.0;
  const double lg = std::lgamma(d2);
  auto f = [&](double w2) {
    if (w2 <= 0.0 && d2 > 1) return 0.0;
    const auto mo = kernel.moments(w1, w2);
    const double lead = (d2 > 1 ? (d2 - 1) * std::log(w2) : 0.0) - lg;
    return std::exp(lead + kernel.log_marginal(mo)) * (C_r - kernel.expected_loss(mo, loss));
  };
  numerics::QuadSettings qs;
  qs.rel_tol = 1e-9;
  qs.abs_tol = 1e-15;
  qs.max_subdivisions = 400;
  if (std::isinf(c1)) return numerics::integrate_semi_infinite_adaptive(f, 0.0, qs).value;
  return numerics::integrate_adaptive(f, 0.0, c1, qs).value;
}

// F0(u) = m(u, 0) (C_r - phi(u, 0)) for the unelevated kernel of totals.
double unelevated_integrand(const PosteriorKernel& kernel, const LossPoly& loss, double C_r,
                            double u) {
  const auto mo = kernel.moments(u, 0.0);
  return std::exp(kernel.log_marginal(mo)) * (C_r - kernel.expected_loss(mo, loss));
}

FailureCounts totals_as_counts(const FailureCounts& d) {
  std::vector<int> t(d.J());
  for (int j = 0; j < d.J(); ++j) t[j] = d.cause_total(j);
  return FailureCounts(t, std::vector<int>(d.J(), 0));
}

}  // namespace

double h_of_d(const FailureCounts& counts, const Plan& plan, const PriorSpec& priors,
              const LossPoly& loss, double C_r) {
  check_compatible(priors, loss);
  if (plan.is_none()) throw DomainError("h_of_d: plan has no test");
  if (counts.total() != plan.r) throw DomainError("h_of_d: counts must total r");
  const int n = plan.n, r = plan.r;
  const int d1 = counts.d1(), d2 = counts.d2();
  const double tau1 = plan.tau1;
  const double c = threshold_c_unclipped(counts, priors, loss, C_r);
  if (c == 0.0) return 0.0;
  const auto qs = outer_settings();
  const double accept_abs = 1e-9 * C_r;

  if (d1 == r) {
    // all failures before tau1, w2 = 0
    const PosteriorKernel k0(priors, counts, false);
    const double hi = std::min(c, n * tau1);
    auto f = [&](double w1) {
      return exposure::censored_kernel(w1, n, r, tau1) * unelevated_integrand(k0, loss, C_r, w1);
    };
    return static_cast<double>(multinomial(counts.before())) *
           integrate_pieces(f, 0.0, hi, knots(1, n, tau1), qs, accept_abs);
  }
  const double weight = static_cast<double>(numerics::binomial(n, d1) *
                                            multinomial(counts.before()) *
                                            multinomial(counts.after()));
  const bool elevated = d1 < plan.m;
  if (!elevated) {
    // phi depends on w1 + w2 only, so integrate the convolved exposure kernel
    const PosteriorKernel k0(priors, totals_as_counts(counts), false);
    auto f = [&](double u) {
      return exposure::total_exposure_kernel(u, n, d1, r, tau1) *
             unelevated_integrand(k0, loss, C_r, u);
    };
    return weight * integrate_pieces(f, (n - d1) * tau1, c, knots(n - d1 + 1, n, tau1), qs,
                                     accept_abs);
  }
  const PosteriorKernel k1(priors, counts, true);
  if (d1 == 0) return weight * inner_phi(k1, d2, loss, C_r, c, n * tau1);
  auto f = [&](double w1) {
    return exposure::pre_change_kernel(w1, n, d1, tau1) * inner_phi(k1, d2, loss, C_r, c, w1);
  };
  const double hi = std::min(c, n * tau1);
  return weight * integrate_pieces(f, (n - d1) * tau1, hi, knots(n - d1 + 1, n - 1, tau1), qs,
                                   accept_abs);
}

double r1_reference(const Plan& plan, const PriorSpec& priors, const LossPoly& loss, double C_r) {
  check_compatible(priors, loss);
  const double eh = expected_acceptance_loss(priors, loss);
  if (plan.is_none()) return std::min(eh, C_r);
  if (loss.a0() >= C_r) return C_r;
  double total = eh;
  for (const FailureCounts& d : enumerate_counts(plan.r, priors.J()))
    total += h_of_d(d, plan, priors, loss, C_r);
  return total;
}

// ---------------------------------------------------------------------------
// RiskModel

struct RiskModel::CountsEntry {
  FailureCounts counts;
  double weight;  // multinom(d1; d1.) multinom(d2; d2.)
  double c;
  PosteriorKernel kernel;
  mutable std::once_flag once;
  mutable numerics::PiecewiseChebyshev cheb;

  CountsEntry(FailureCounts d, double w, double c_, const PriorSpec& priors)
      : counts(d), weight(w), c(c_), kernel(priors, d, true) {}
};

struct RiskModel::TotalsEntry {
  double weight;  // multinom(r; d+)
  double c;
  PosteriorKernel kernel;

  TotalsEntry(double w, double c_, PosteriorKernel k) : weight(w), c(c_), kernel(std::move(k)) {}
};

struct RiskModel::Level {
  int r;
  std::vector<std::unique_ptr<CountsEntry>> counts;  // d1 < r only
  std::vector<std::vector<const CountsEntry*>> by_d1;
  std::vector<TotalsEntry> totals;
  double base = 0.0;
};

RiskModel::RiskModel(PriorSpec priors, LossPoly loss, double C_r)
    : priors_(std::move(priors)), loss_(std::move(loss)), C_r_(C_r) {
  check_compatible(priors_, loss_);
  if (!(C_r_ > 0.0)) throw ConfigError("must be positive", "costs.C_r");
  e_h_ = expected_acceptance_loss(priors_, loss_);
}

RiskModel::~RiskModel() = default;

struct RiskModel::LevelSlot {
  std::once_flag once;
  std::unique_ptr<Level> level;
};

const RiskModel::Level& RiskModel::level(int r) const {
  LevelSlot* slot;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& entry = levels_[r];
    if (!entry) entry = std::make_unique<LevelSlot>();
    slot = entry.get();
  }
  // build outside the map lock so different r can be prepared concurrently
  std::call_once(slot->once, [&] { slot->level = build_level(r); });
  return *slot->level;
}

std::unique_ptr<RiskModel::Level> RiskModel::build_level(int r) const {
  auto lv = std::make_unique<Level>();
  lv->r = r;
  lv->by_d1.resize(static_cast<std::size_t>(r));
  const int J = priors_.J();
  std::map<std::vector<int>, double> c_of_totals;
  for (const FailureCounts& d : enumerate_counts(r, J)) {
    std::vector<int> t(J);
    for (int j = 0; j < J; ++j) t[j] = d.cause_total(j);
    auto ct = c_of_totals.find(t);
    if (ct == c_of_totals.end()) {
      const double c = threshold_c_unclipped(d, priors_, loss_, C_r_);
      ct = c_of_totals.emplace(t, c).first;
      lv->totals.emplace_back(static_cast<double>(multinomial(t)), c,
                              PosteriorKernel(priors_, FailureCounts(t, std::vector<int>(J, 0)),
                                              false));
    }
    if (d.d1() == r) continue;
    const double w =
        static_cast<double>(multinomial(d.before()) * multinomial(d.after()));
    lv->counts.push_back(std::make_unique<CountsEntry>(d, w, ct->second, priors_));
    lv->by_d1[d.d1()].push_back(lv->counts.back().get());
  }
  // n- and tau1-free part: sum_{d+} multinom int_0^c u^{r-1}/Gamma(r) F0(u) du
  const auto qs = outer_settings();
  const double lg = std::lgamma(r);
  for (const TotalsEntry& t : lv->totals) {
    if (!(t.c > 0.0)) continue;
    auto f = [&](double u) {
      if (u <= 0.0 && r > 1) return 0.0;
      const double lead = (r > 1 ? (r - 1) * std::log(u) : 0.0) - lg;
      return std::exp(lead) * unelevated_integrand(t.kernel, loss_, C_r_, u);
    };
    lv->base += t.weight * integrate_pieces(f, 0.0, t.c, {}, qs, 1e-9 * C_r_);
  }
  return lv;
}

double RiskModel::inner_integral(const FailureCounts& counts, double w1) const {
  const double c = threshold_c_unclipped(counts, priors_, loss_, C_r_);
  if (std::isinf(c)) throw DomainError("inner_integral: rejection region unbounded");
  return inner_phi(PosteriorKernel(priors_, counts, true), counts.d2(), loss_, C_r_, c, w1);
}

double RiskModel::phi_cached(const CountsEntry& e, double w1) const {
  if (!(w1 < e.c)) return 0.0;
  std::call_once(e.once, [&] {
    numerics::PiecewiseChebyshev::Settings s;
    s.rel_tol = 1e-7;
    s.degree = 20;
    s.max_depth = 14;
    const int d2 = e.counts.d2();
    e.cheb = numerics::PiecewiseChebyshev::fit(
        [&](double x) { return inner_phi(e.kernel, d2, loss_, C_r_, e.c, x); }, 0.0, e.c, s);
  });
  return e.cheb(w1);
}

RiskModel::Pieces RiskModel::pieces(int n, int r, double tau1, int m_max) const {
  const Level& lv = level(r);
  Pieces out;
  out.base = lv.base;
  out.elevated.assign(static_cast<std::size_t>(m_max), 0.0);
  out.unelevated.assign(static_cast<std::size_t>(m_max), 0.0);
  const auto qs = outer_settings();
  const double accept_abs = 1e-9 * C_r_;

  for (int d1 = 0; d1 < m_max; ++d1) {
    const double binom = static_cast<double>(numerics::binomial(n, d1));
    const double lo = (n - d1) * tau1;
    if (d1 > 0 && tau1 == 0.0) break;  // no failures can precede tau1 = 0

    // paths with D1 = d1 that the rule would leave unelevated
    double un = 0.0;
    for (const TotalsEntry& t : lv.totals) {
      if (!(t.c > lo)) continue;
      auto f = [&](double u) {
        return exposure::total_exposure_kernel(u, n, d1, r, tau1) *
               unelevated_integrand(t.kernel, loss_, C_r_, u);
      };
      un += t.weight * integrate_pieces(f, lo, t.c, knots(n - d1 + 1, n, tau1), qs, accept_abs);
    }
    out.unelevated[d1] = binom * un;

    // the same paths with the stress raised
    const auto& group = lv.by_d1[d1];
    double el = 0.0;
    if (d1 == 0) {
      for (const CountsEntry* e : group) el += e->weight * phi_cached(*e, n * tau1);
    } else {
      double hi = lo;
      std::vector<double> breaks = knots(n - d1 + 1, n - 1, tau1);
      for (const CountsEntry* e : group) {
        const double top = std::min(e->c, n * tau1);
        hi = std::max(hi, top);
        if (top > lo && top < n * tau1) breaks.push_back(top);
      }
      if (hi > lo) {
        auto f = [&](double w1) {
          const double g = exposure::pre_change_kernel(w1, n, d1, tau1);
          if (g == 0.0) return 0.0;
          double s = 0.0;
          for (const CountsEntry* e : group)
            if (w1 < e->c) s += e->weight * phi_cached(*e, w1);
          return g * s;
        };
        el = integrate_pieces(f, lo, hi, breaks, qs, accept_abs);
      }
    }
    out.elevated[d1] = binom * el;
  }
  return out;
}

std::vector<double> RiskModel::decision_loss_all_m(int n, int r, double tau1) const {
  if (!(1 <= r && r <= n)) throw DomainError("decision_loss_all_m: need 1 <= r <= n");
  std::vector<double> out(static_cast<std::size_t>(r + 1));
  if (loss_.a0() >= C_r_) {
    std::fill(out.begin(), out.end(), C_r_);
    return out;
  }
  const Pieces p = pieces(n, r, tau1, r);
  double acc = e_h_ + p.base;
  out[0] = acc;
  for (int m = 1; m <= r; ++m) {
    acc += p.elevated[m - 1] - p.unelevated[m - 1];
    out[m] = acc;
  }
  return out;
}

double RiskModel::decision_loss(const Plan& plan) const {
  if (plan.is_none()) return std::min(e_h_, C_r_);
  if (loss_.a0() >= C_r_) return C_r_;
  const Pieces p = pieces(plan.n, plan.r, plan.tau1, plan.m);
  double acc = e_h_ + p.base;
  for (int d1 = 0; d1 < plan.m; ++d1) acc += p.elevated[d1] - p.unelevated[d1];
  return acc;
}

PlanEvaluation RiskModel::evaluate(const Plan& plan, const CostModel& costs) const {
  PlanEvaluation ev;
  if (plan.is_none()) {
    ev.decision_loss = std::min(e_h_, C_r_);
    ev.total = ev.decision_loss;
    return ev;
  }
  if (costs.rejection() != C_r_)
    throw DomainError("RiskModel::evaluate: cost model has a different rejection cost");
  ev.sampling_cost = plan.n * (costs.sampling() - costs.salvage()) + plan.r * costs.salvage();
  ev.stress_cost = costs.stress() > 0.0 ? costs.stress() * expected_stress_count(plan, priors_) : 0.0;
  ev.time_cost = costs.time() > 0.0 ? costs.time() * expected_duration(plan, priors_) : 0.0;
  ev.decision_loss = decision_loss(plan);
  ev.total = ev.sampling_cost + ev.stress_cost + ev.time_cost + ev.decision_loss;
  return ev;
}

double r1(const Plan& plan, const PriorSpec& priors, const LossPoly& loss, double C_r) {
  return RiskModel(priors, loss, C_r).decision_loss(plan);
}

PlanEvaluation bayes_risk(const Plan& plan, const PriorSpec& priors, const LossPoly& loss,
                          const CostModel& costs) {
  return RiskModel(priors, loss, costs.rejection()).evaluate(plan, costs);
}

}  // namespace aabsp
