// SPDX-License-Identifier: Apache-2.0
#include "aabsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aabsp/numerics.hpp"

namespace aabsp {

namespace {

bool finite_at_least(double v, double lo) { return std::isfinite(v) && v >= lo; }

std::string idx(const char* name, int j) { return std::string(name) + "_" + std::to_string(j + 1); }

}  // namespace

PriorSpec::PriorSpec(std::vector<CausePrior> causes) : causes_(std::move(causes)) {
  if (causes_.empty()) throw ConfigError("at least one competing risk is required", "priors");
  for (int j = 0; j < J(); ++j) {
    const CausePrior& c = causes_[j];
    if (!(std::isfinite(c.alpha) && c.alpha > 0.0))
      throw ConfigError("must be positive", "priors." + idx("alpha", j));
    if (!(std::isfinite(c.beta) && c.beta > 0.0))
      throw ConfigError("must be positive", "priors." + idx("beta", j));
    if (!(std::isfinite(c.l) && c.l > 1.0))
      throw ConfigError("must exceed 1", "priors." + idx("l", j));
  }
}

double PriorSpec::total_mean_rate() const {
  double s = 0.0;
  for (int j = 0; j < J(); ++j) s += mean_rate(j);
  return s;
}

CostModel::CostModel(double sampling, double salvage, double time, double stress,
                     double rejection)
    : C_s_(sampling), v_s_(salvage), C_t_(time), C_a_(stress), C_r_(rejection) {
  if (!finite_at_least(C_s_, 0.0)) throw ConfigError("must be nonnegative", "costs.C_s");
  if (!finite_at_least(v_s_, 0.0)) throw ConfigError("must be nonnegative", "costs.v_s");
  if (!finite_at_least(C_t_, 0.0)) throw ConfigError("must be nonnegative", "costs.C_t");
  if (!finite_at_least(C_a_, 0.0)) throw ConfigError("must be nonnegative", "costs.C_a");
  if (!(std::isfinite(C_r_) && C_r_ > 0.0)) throw ConfigError("must be positive", "costs.C_r");
}

CostModel CostModel::with_stress(double C_a) const { return {C_s_, v_s_, C_t_, C_a, C_r_}; }

CostModel CostModel::with_rejection(double C_r) const { return {C_s_, v_s_, C_t_, C_a_, C_r}; }

LossPoly::LossPoly(double a0, std::vector<double> linear, std::vector<double> upper)
    : a0_(a0), linear_(std::move(linear)) {
  const int J = static_cast<int>(linear_.size());
  if (J < 1) throw ConfigError("at least one linear coefficient is required", "loss");
  if (upper.size() != static_cast<std::size_t>(J * (J + 1) / 2))
    throw ConfigError("expected " + std::to_string(J * (J + 1) / 2) + " quadratic coefficients",
                      "loss");
  if (!finite_at_least(a0_, 0.0)) throw ConfigError("must be nonnegative", "loss.a_0");
  for (int j = 0; j < J; ++j)
    if (!finite_at_least(linear_[j], 0.0))
      throw ConfigError("must be nonnegative", "loss." + idx("a", j));
  quad_.assign(static_cast<std::size_t>(J * J), 0.0);
  std::size_t k = 0;
  for (int i = 0; i < J; ++i)
    for (int j = i; j < J; ++j, ++k) {
      if (!finite_at_least(upper[k], 0.0))
        throw ConfigError("must be nonnegative",
                          "loss.a_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      quad_[i * J + j] = upper[k];
    }
}

double LossPoly::quad(int i, int j) const {
  if (i > j) std::swap(i, j);
  return quad_[static_cast<std::size_t>(i * J() + j)];
}

bool LossPoly::is_constant() const {
  for (double v : linear_)
    if (v != 0.0) return false;
  for (double v : quad_)
    if (v != 0.0) return false;
  return true;
}

double LossPoly::operator()(std::span<const double> lambda) const {
  const int J = this->J();
  if (static_cast<int>(lambda.size()) != J) throw DomainError("LossPoly: dimension mismatch");
  double h = a0_;
  for (int i = 0; i < J; ++i) {
    h += linear_[i] * lambda[i];
    for (int j = i; j < J; ++j) h += quad_[i * J + j] * lambda[i] * lambda[j];
  }
  return h;
}

Plan::Plan(int n_, int r_, int m_, double tau1_) : n(n_), r(r_), m(m_), tau1(tau1_) {
  if (!(0 <= m && m <= r && r <= n)) throw DomainError("Plan: need 0 <= m <= r <= n");
  if (!(std::isfinite(tau1) && tau1 >= 0.0)) throw DomainError("Plan: tau1 must be >= 0");
  if (n > 0 && r < 1) throw DomainError("Plan: a test needs r >= 1");
  if (m == 0) tau1 = 0.0;
}

bool operator==(const Plan& a, const Plan& b) {
  return a.n == b.n && a.r == b.r && a.m == b.m && a.tau1 == b.tau1;
}

Theta::Theta(std::vector<double> lambda, std::vector<double> phi)
    : lambda_(std::move(lambda)), phi_(std::move(phi)) {
  if (lambda_.empty() || lambda_.size() != phi_.size())
    throw DomainError("Theta: lambda and phi must be nonempty and of equal length");
  for (std::size_t j = 0; j < lambda_.size(); ++j) {
    if (!finite_at_least(lambda_[j], 0.0)) throw DomainError("Theta: lambda must be >= 0");
    if (!finite_at_least(phi_[j], 1.0)) throw DomainError("Theta: phi must be >= 1");
  }
}

void check_compatible(const PriorSpec& priors, const LossPoly& loss) {
  if (priors.J() != loss.J())
    throw ConfigError("loss has " + std::to_string(loss.J()) + " risks but priors have " +
                      std::to_string(priors.J()));
}

double expected_acceptance_loss(const PriorSpec& priors, const LossPoly& loss) {
  check_compatible(priors, loss);
  const int J = priors.J();
  double e = loss.a0();
  for (int i = 0; i < J; ++i) {
    const double mi = priors.mean_rate(i);
    e += loss.linear(i) * mi;
    const double ai = priors[i].alpha, bi = priors[i].beta;
    e += loss.quad(i, i) * ai * (ai + 1.0) / (bi * bi);
    for (int j = i + 1; j < J; ++j) e += loss.quad(i, j) * mi * priors.mean_rate(j);
  }
  return e;
}

NoSamplingRisk no_sampling_risk(const PriorSpec& priors, const LossPoly& loss,
                                const CostModel& costs) {
  const double eh = expected_acceptance_loss(priors, loss);
  if (eh <= costs.rejection()) return {eh, Action::accept};
  return {costs.rejection(), Action::reject};
}

int n_upper_bound(const PriorSpec& priors, const LossPoly& loss, const CostModel& costs) {
  const double margin = costs.sampling() - costs.salvage();
  if (!(margin > 0.0))
    throw ConfigError("sampling cost must exceed salvage value for the search bound", "costs");
  const double bound = std::floor(no_sampling_risk(priors, loss, costs).risk / margin);
  return static_cast<int>(std::min(bound, 1e9));
}

namespace {

// E[min{h, C_r}] conditional on lambda_0..lambda_{k-1} fixed in `lam`.
double min_loss_rec(const PriorSpec& priors, const LossPoly& loss, double C_r,
                    std::vector<double>& lam, int k) {
  const int J = priors.J();
  const double alpha = priors[k].alpha, beta = priors[k].beta;
  // h as a quadratic in lambda_k with the later rates at zero
  auto coeffs = [&](double& A, double& B, double& C) {
    const double saved = lam[k];
    lam[k] = 0.0;
    A = loss(lam);
    B = loss.linear(k);
    for (int i = 0; i < J; ++i)
      if (i != k) B += loss.quad(i, k) * lam[i];
    C = loss.quad(k, k);
    lam[k] = saved;
  };
  for (int i = k; i < J; ++i) lam[i] = 0.0;
  double A, B, C;
  coeffs(A, B, C);
  if (A >= C_r) return C_r;

  // kink: the rate at which h reaches C_r with the later rates at zero
  double x_star;
  if (C > 0.0)
    x_star = 2.0 * (C_r - A) / (B + std::sqrt(B * B + 4.0 * C * (C_r - A)));
  else if (B > 0.0)
    x_star = (C_r - A) / B;
  else
    x_star = std::numeric_limits<double>::infinity();

  if (k == J - 1) {
    if (std::isinf(x_star)) return A;
    const double z = beta * x_star;
    const double p0 = numerics::regularized_lower_gamma(alpha, z);
    const double p1 = numerics::regularized_lower_gamma(alpha + 1.0, z);
    const double p2 = numerics::regularized_lower_gamma(alpha + 2.0, z);
    return A * p0 + B * (alpha / beta) * p1 + C * alpha * (alpha + 1.0) / (beta * beta) * p2 +
           C_r * (1.0 - p0);
  }

  // integrate against the Gamma density in t = x^alpha, which removes the
  // x^(alpha-1) factor: dGamma = beta^alpha / Gamma(alpha+1) exp(-beta t^(1/alpha)) dt
  const double log_norm = alpha * std::log(beta) - std::lgamma(alpha + 1.0);
  auto integrand = [&](double t) {
    const double x = std::pow(t, 1.0 / alpha);
    lam[k] = x;
    const double inner = min_loss_rec(priors, loss, C_r, lam, k + 1);
    lam[k] = 0.0;
    return inner * std::exp(log_norm - beta * x);
  };
  numerics::QuadSettings qs;
  qs.rel_tol = 1e-10;
  qs.abs_tol = 1e-13 * C_r;
  qs.max_subdivisions = 400;
  double body, tail_mass;
  if (std::isinf(x_star)) {
    // cut where the remaining Gamma mass is negligible
    double hi = (alpha + 40.0 * std::sqrt(alpha) + 60.0) / beta;
    body = numerics::integrate_adaptive(integrand, 0.0, std::pow(hi, alpha), qs).value;
    tail_mass = 0.0;
  } else {
    body = numerics::integrate_adaptive(integrand, 0.0, std::pow(x_star, alpha), qs).value;
    tail_mass = 1.0 - numerics::regularized_lower_gamma(alpha, beta * x_star);
  }
  return body + C_r * tail_mass;
}

}  // namespace

double expected_min_loss(const PriorSpec& priors, const LossPoly& loss, double C_r) {
  check_compatible(priors, loss);
  if (!(C_r > 0.0)) return 0.0;
  std::vector<double> lam(static_cast<std::size_t>(priors.J()), 0.0);
  return min_loss_rec(priors, loss, C_r, lam, 0);
}

}  // namespace aabsp

namespace aabsp {

namespace {

// E[(phi - C_r)_+] over t_k..t_{J-1}, t_j ~ Beta(r, alpha_j) independent, where
// phi is the posterior mean of h after r events of every cause and the
// posterior rate mean is (alpha_j + r)(1 - t_j)/beta_j.  s[j] = 1 - t_j.
double informed_excess_rec(const PriorSpec& priors, const LossPoly& loss, double C_r, int r,
                           std::vector<double>& s, int k) {
  const int J = priors.J();
  auto scale = [&](int j) { return (priors[j].alpha + r) / priors[j].beta; };
  auto second = [&](int j) {
    const double a = priors[j].alpha + r, b = priors[j].beta;
    return a * (a + 1.0) / (b * b);
  };
  // phi as A + B s_k + C s_k^2 with s_{k+1..} at one (t = 0), where phi is
  // largest, so the bound on s_k covers the whole exceedance region
  for (int i = k + 1; i < J; ++i) s[i] = 1.0;
  s[k] = 0.0;
  double A = loss.a0(), B = loss.linear(k) * scale(k), C = loss.quad(k, k) * second(k);
  for (int i = 0; i < J; ++i) {
    if (i == k) continue;
    A += loss.linear(i) * scale(i) * s[i] + loss.quad(i, i) * second(i) * s[i] * s[i];
    B += loss.quad(i, k) * scale(i) * s[i] * scale(k);
    for (int j = i + 1; j < J; ++j)
      if (j != k) A += loss.quad(i, j) * scale(i) * s[i] * scale(j) * s[j];
  }
  if (A + B + C <= C_r) return 0.0;  // even at s_k = 1 (t_k = 0) nothing exceeds C_r
  // s_k above which phi > C_r with the later coordinates at their minimum
  double s_star;
  if (A >= C_r)
    s_star = 0.0;
  else if (C > 0.0)
    s_star = 2.0 * (C_r - A) / (B + std::sqrt(B * B + 4.0 * C * (C_r - A)));
  else
    s_star = (C_r - A) / B;
  const double t_star = 1.0 - s_star;  // integrate t_k over (0, t_star)
  const double alpha = priors[k].alpha;

  if (k == J - 1) {
    // closed form: int_0^{t*} (1-t)^q Beta(r, alpha) dt = B(r, alpha+q)/B(r, alpha) I_{t*}(r, alpha+q)
    auto mom = [&](double q) {
      if (t_star <= 0.0) return 0.0;
      const double ib = t_star >= 1.0 ? 1.0 : numerics::regularized_incomplete_beta(t_star, r, alpha + q);
      return std::exp(numerics::log_beta(r, alpha + q) - numerics::log_beta(r, alpha)) * ib;
    };
    return (A - C_r) * mom(0.0) + B * mom(1.0) + C * mom(2.0);
  }
  const double log_norm = -numerics::log_beta(r, alpha);
  auto integrand = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    s[k] = 1.0 - t;
    const double inner = informed_excess_rec(priors, loss, C_r, r, s, k + 1);
    s[k] = 0.0;
    if (inner == 0.0) return 0.0;
    return inner * std::exp(log_norm + (r - 1) * std::log(t) + (alpha - 1.0) * std::log1p(-t));
  };
  numerics::QuadSettings qs;
  qs.rel_tol = 1e-10;
  qs.abs_tol = 1e-13 * C_r;
  qs.max_subdivisions = 400;
  return numerics::integrate_adaptive(integrand, 0.0, std::min(t_star, 1.0), qs).value;
}

}  // namespace

double informed_loss_bound(const PriorSpec& priors, const LossPoly& loss, double C_r, int r) {
  check_compatible(priors, loss);
  if (r < 1) throw DomainError("informed_loss_bound: need r >= 1");
  if (!(C_r > 0.0)) return 0.0;
  std::vector<double> s(static_cast<std::size_t>(priors.J()), 0.0);
  const double e_h = expected_acceptance_loss(priors, loss);
  const double excess = informed_excess_rec(priors, loss, C_r, r, s, 0);
  return std::max(e_h - excess, expected_min_loss(priors, loss, C_r));
}

}  // namespace aabsp
