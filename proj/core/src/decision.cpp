// SPDX-License-Identifier: Apache-2.0
#include "aabsp/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aabsp/numerics.hpp"

namespace aabsp {

FailureCounts::FailureCounts(std::vector<int> before, std::vector<int> after)
    : before_(std::move(before)), after_(std::move(after)) {
  if (before_.empty() || before_.size() != after_.size())
    throw DomainError("FailureCounts: before/after must be nonempty and of equal length");
  for (std::size_t j = 0; j < before_.size(); ++j) {
    if (before_[j] < 0 || after_[j] < 0) throw DomainError("FailureCounts: negative count");
    d1_ += before_[j];
    d2_ += after_[j];
  }
}

bool operator==(const FailureCounts& a, const FailureCounts& b) {
  return a.before() == b.before() && a.after() == b.after();
}

SuffStats::SuffStats(double w1_, double w2_, FailureCounts counts_, bool elevated_)
    : w1(w1_), w2(w2_), counts(std::move(counts_)), elevated(elevated_) {
  if (!(std::isfinite(w1) && w1 >= 0.0)) throw DomainError("SuffStats: w1 must be >= 0");
  if (!(std::isfinite(w2) && w2 >= 0.0)) throw DomainError("SuffStats: w2 must be >= 0");
}

ExponentVector::ExponentVector(std::vector<int> p) : p_(std::move(p)) {
  int nonzero = 0, sum = 0;
  for (int v : p_) {
    if (v < 0 || v > 2) throw DomainError("ExponentVector: entries must be 0, 1 or 2");
    nonzero += v != 0;
    sum += v;
  }
  if (nonzero > 2 || sum > 2) throw DomainError("ExponentVector: total degree must be <= 2");
}

ExponentVector ExponentVector::zero(int J) { return ExponentVector(std::vector<int>(J, 0)); }

ExponentVector ExponentVector::unit(int J, int j) {
  std::vector<int> p(J, 0);
  p[j] = 1;
  return ExponentVector(std::move(p));
}

ExponentVector ExponentVector::pair(int J, int i, int j) {
  std::vector<int> p(J, 0);
  p[i] += 1;
  p[j] += 1;
  return ExponentVector(std::move(p));
}

// ---------------------------------------------------------------------------

PosteriorKernel::PosteriorKernel(const PriorSpec& priors, const FailureCounts& counts,
                                 bool elevated)
    : elevated_(elevated), prior_log_const_(0.0) {
  if (priors.J() != counts.J()) throw DomainError("PosteriorKernel: dimension mismatch");
  for (int j = 0; j < priors.J(); ++j) {
    const CausePrior& p = priors[j];
    cause_.push_back({p.alpha + counts.cause_total(j), counts.before(j),
                      elevated ? counts.after(j) : 0, p.alpha, p.beta, p.l});
    prior_log_const_ += p.alpha * std::log(p.beta) - std::lgamma(p.alpha) - std::log(p.l - 1.0);
  }
}

double PosteriorKernel::log_g_quadrature(const Cause& c, double w1, double w2, int k) const {
  const double sk = c.s + k;
  const double A = w1 + c.beta;
  const double ww = elevated_ ? w2 : 0.0;
  auto expo = [&](double phi) {
    const double base = elevated_ ? A + phi * ww : w1 + w2 + c.beta;
    return c.d2 * std::log(phi) - sk * std::log(base);
  };
  double peak = std::max(expo(1.0), expo(c.l));
  if (elevated_ && ww > 0.0 && c.d2 > 0) {
    const double star = c.d2 * A / ((sk - c.d2) * ww);
    if (star > 1.0 && star < c.l) peak = std::max(peak, expo(star));
  }
  numerics::QuadSettings qs;
  qs.rel_tol = 1e-13;
  qs.abs_tol = 0.0;
  qs.max_subdivisions = 500;
  const auto q = numerics::integrate_adaptive(
      [&](double phi) { return std::exp(expo(phi) - peak); }, 1.0, c.l, qs);
  return std::lgamma(sk) + peak + std::log(q.value);
}

double PosteriorKernel::log_g_one(const Cause& c, double w1, double w2, int k) const {
  const double sk = c.s + k;
  if (!elevated_) return std::lgamma(sk) + std::log(c.l - 1.0) - sk * std::log(w1 + w2 + c.beta);
  const double A = w1 + c.beta;
  const double a = c.d2 + 1.0;
  if (w2 == 0.0) {
    // int_1^l phi^d2 dphi = (l^a - 1) / a
    const double log_int = a * std::log(c.l) + std::log1p(-std::pow(c.l, -a)) - std::log(a);
    return std::lgamma(sk) - sk * std::log(A) + log_int;
  }
  const double b = c.alpha + c.d1 + k - 1.0;
  if (!(b > 0.0)) return log_g_quadrature(c, w1, w2, k);
  const double eta2 = w2 / A;
  const double eta1 = c.l * eta2;
  const double z1 = eta1 / (1.0 + eta1);
  const double z2 = eta2 / (1.0 + eta2);
  if (a * std::log(z1) < -600.0) return log_g_quadrature(c, w1, w2, k);
  const numerics::BetaPair p1 = numerics::incomplete_beta_pair(z1, a, b);
  const numerics::BetaPair p2 = numerics::incomplete_beta_pair(z2, a, b);
  // difference taken on the side where both values are small
  const bool use_upper = p2.lower > 0.5;
  const double diff = use_upper ? p2.upper - p1.upper : p1.lower - p2.lower;
  const double scale = use_upper ? p2.upper : p1.lower;
  if (!(diff > 1e-7 * scale)) return log_g_quadrature(c, w1, w2, k);
  return std::lgamma(a) + std::lgamma(b) + (a - sk) * std::log(A) - a * std::log(w2) +
         std::log(diff);
}

void PosteriorKernel::log_g(const Cause& c, double w1, double w2, double out[3]) const {
  const double A = w1 + c.beta;
  const double a = c.d2 + 1.0;
  const double b0 = c.alpha + c.d1 - 1.0;
  if (!elevated_ || w2 == 0.0 || !(b0 > 0.0)) {
    for (int k = 0; k < 3; ++k) out[k] = log_g_one(c, w1, w2, k);
    return;
  }
  const double eta2 = w2 / A;
  const double eta1 = c.l * eta2;
  const double z1 = eta1 / (1.0 + eta1);
  const double z2 = eta2 / (1.0 + eta2);
  if (a * std::log(z1) < -600.0) {
    for (int k = 0; k < 3; ++k) out[k] = log_g_quadrature(c, w1, w2, k);
    return;
  }
  const numerics::BetaPair p1 = numerics::incomplete_beta_pair(z1, a, b0);
  const numerics::BetaPair p2 = numerics::incomplete_beta_pair(z2, a, b0);
  const bool use_upper = p2.lower > 0.5;
  double diff = use_upper ? p2.upper - p1.upper : p1.lower - p2.lower;
  const double scale = use_upper ? p2.upper : p1.lower;
  if (!(diff > 1e-7 * scale)) {
    for (int k = 0; k < 3; ++k) out[k] = log_g_quadrature(c, w1, w2, k);
    return;
  }
  // raise b one step at a time: I_x(a, b+1) = I_x(a, b) + x^a (1-x)^b / (b B(a, b))
  const double la = std::lgamma(a), lA = std::log(A), lw2 = std::log(w2);
  const double lz1 = std::log(z1), lz2 = std::log(z2);
  const double l1z1 = std::log1p(-z1), l1z2 = std::log1p(-z2);
  double b = b0;
  for (int k = 0; k < 3; ++k) {
    const double sk = c.s + k;
    out[k] = la + std::lgamma(b) + (a - sk) * lA - a * lw2 + std::log(diff);
    if (k == 2) break;
    const double lnorm = -std::log(b) - numerics::log_beta(a, b);
    const double t1 = std::exp(a * lz1 + b * l1z1 + lnorm);
    const double t2 = std::exp(a * lz2 + b * l1z2 + lnorm);
    const double next = diff + t1 - t2;
    if (!(next > 1e-4 * (diff + t1 + t2))) {
      for (int kk = k + 1; kk < 3; ++kk) out[kk] = log_g_one(c, w1, w2, kk);
      return;
    }
    diff = next;
    b += 1.0;
  }
}

double PosteriorKernel::log_h1(double w1, double w2, const ExponentVector& p) const {
  if (p.J() != J()) throw DomainError("log_h1: exponent dimension mismatch");
  double s = 0.0;
  for (int j = 0; j < J(); ++j) s += log_g_one(cause_[j], w1, w2, p[j]);
  return s;
}

double PosteriorKernel::log_h1_quadrature(double w1, double w2, const ExponentVector& p) const {
  if (p.J() != J()) throw DomainError("log_h1: exponent dimension mismatch");
  double s = 0.0;
  for (int j = 0; j < J(); ++j) s += log_g_quadrature(cause_[j], w1, w2, p[j]);
  return s;
}

PosteriorKernel::Moments PosteriorKernel::moments(double w1, double w2) const {
  Moments mo;
  mo.m1.resize(cause_.size());
  mo.m2.resize(cause_.size());
  double lg[3];
  for (std::size_t j = 0; j < cause_.size(); ++j) {
    log_g(cause_[j], w1, w2, lg);
    mo.m1[j] = std::exp(lg[1] - lg[0]);
    mo.m2[j] = std::exp(lg[2] - lg[0]);
    mo.log_h0 += lg[0];
  }
  return mo;
}

double PosteriorKernel::expected_loss(const Moments& mo, const LossPoly& loss) const {
  const int n = J();
  double phi = loss.a0();
  for (int i = 0; i < n; ++i) {
    phi += loss.linear(i) * mo.m1[i] + loss.quad(i, i) * mo.m2[i];
    for (int j = i + 1; j < n; ++j) phi += loss.quad(i, j) * mo.m1[i] * mo.m1[j];
  }
  return phi;
}

double PosteriorKernel::expected_loss(double w1, double w2, const LossPoly& loss) const {
  return expected_loss(moments(w1, w2), loss);
}

double PosteriorKernel::log_marginal(double w1, double w2) const {
  double s = prior_log_const_;
  for (const Cause& c : cause_) s += log_g_one(c, w1, w2, 0);
  return s;
}

// ---------------------------------------------------------------------------

double log_h1(const SuffStats& stats, const PriorSpec& priors, const ExponentVector& p) {
  return PosteriorKernel(priors, stats.counts, stats.elevated).log_h1(stats.w1, stats.w2, p);
}

double h1(const SuffStats& stats, const PriorSpec& priors, const ExponentVector& p) {
  return std::exp(log_h1(stats, priors, p));
}

double h1_by_quadrature(const SuffStats& stats, const PriorSpec& priors, const ExponentVector& p) {
  return std::exp(PosteriorKernel(priors, stats.counts, stats.elevated)
                      .log_h1_quadrature(stats.w1, stats.w2, p));
}

double posterior_expected_loss(const SuffStats& stats, const PriorSpec& priors,
                               const LossPoly& loss) {
  check_compatible(priors, loss);
  return PosteriorKernel(priors, stats.counts, stats.elevated)
      .expected_loss(stats.w1, stats.w2, loss);
}

Action bayes_decision(const SuffStats& stats, const PriorSpec& priors, const LossPoly& loss,
                      double C_r) {
  return posterior_expected_loss(stats, priors, loss) <= C_r ? Action::accept : Action::reject;
}

double expected_loss_at_zero_w2(const FailureCounts& counts, const PriorSpec& priors,
                                const LossPoly& loss, double w1) {
  check_compatible(priors, loss);
  const int J = priors.J();
  double m1[16], m2[16];
  std::vector<double> big1, big2;
  double* p1 = m1;
  double* p2 = m2;
  if (J > 16) {
    big1.resize(J);
    big2.resize(J);
    p1 = big1.data();
    p2 = big2.data();
  }
  for (int j = 0; j < J; ++j) {
    const double s = priors[j].alpha + counts.cause_total(j);
    const double A = w1 + priors[j].beta;
    p1[j] = s / A;
    p2[j] = s * (s + 1.0) / (A * A);
  }
  double phi = loss.a0();
  for (int i = 0; i < J; ++i) {
    phi += loss.linear(i) * p1[i] + loss.quad(i, i) * p2[i];
    for (int j = i + 1; j < J; ++j) phi += loss.quad(i, j) * p1[i] * p1[j];
  }
  return phi;
}

namespace {

double root_tol(double width) { return 1e-9 * std::max(1.0, width / 1e3); }

// Grows [0, B] until f(B) <= 0 for a decreasing f with f(0) > 0.
template <class F>
double expand_upper(F& f, double start) {
  double B = std::max(start, 1.0);
  for (int i = 0; i < 2000 && f(B) > 0.0; ++i) B *= 2.0;
  return B;
}

}  // namespace

double threshold_c_unclipped(const FailureCounts& counts, const PriorSpec& priors,
                             const LossPoly& loss, double C_r) {
  auto f = [&](double w1) { return expected_loss_at_zero_w2(counts, priors, loss, w1) - C_r; };
  if (f(0.0) <= 0.0) return 0.0;
  if (loss.a0() >= C_r) return std::numeric_limits<double>::infinity();
  double start = 0.0;
  for (int j = 0; j < priors.J(); ++j) start = std::max(start, priors[j].beta);
  const double B = expand_upper(f, start);
  return numerics::find_root_monotone(f, numerics::Bracket(0.0, B), root_tol(B)).x;
}

double threshold_c(const FailureCounts& counts, const PriorSpec& priors, const LossPoly& loss,
                   double C_r, int n, double tau1) {
  return std::min(threshold_c_unclipped(counts, priors, loss, C_r), n * tau1);
}

double threshold_c1(double w1, const PosteriorKernel& kernel, const LossPoly& loss, double C_r,
                    double c) {
  if (!(w1 < c)) return 0.0;
  if (std::isinf(c)) return std::numeric_limits<double>::infinity();
  if (!kernel.elevated()) return c - w1;
  auto f = [&](double w2) { return kernel.expected_loss(w1, w2, loss) - C_r; };
  if (f(0.0) <= 0.0) return 0.0;
  const double B = expand_upper(f, c);
  return numerics::find_root_monotone(f, numerics::Bracket(0.0, B), root_tol(B)).x;
}

double threshold_c1(double w1, const FailureCounts& counts, bool elevated,
                    const PriorSpec& priors, const LossPoly& loss, double C_r) {
  const double c = threshold_c_unclipped(counts, priors, loss, C_r);
  return threshold_c1(w1, PosteriorKernel(priors, counts, elevated), loss, C_r, c);
}

}  // namespace aabsp
