// SPDX-License-Identifier: Apache-2.0
#include "aabsp/datalab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"

namespace aabsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fail(const std::string& what) { throw ValidationError("dataset: " + what); }

std::vector<FailureRecord> sorted_records(const RawDataset& d) {
  std::vector<FailureRecord> v = d.records;
  std::stable_sort(v.begin(), v.end(), [](const FailureRecord& a, const FailureRecord& b) {
    return a.time < b.time || (a.time == b.time && a.cause < b.cause);
  });
  return v;
}

// Reduction for a known stress path; `end` is the time the test stopped.
SuffStats reduce(const RawDataset& d, bool elevated_rule_known, bool elevated, double end) {
  const auto recs = sorted_records(d);
  std::vector<int> before(d.J, 0), after(d.J, 0);
  double pre = 0.0, post = 0.0;
  for (const FailureRecord& f : recs) {
    if (f.time <= d.tau1) {
      ++before[f.cause - 1];
      pre += f.time;
    } else {
      ++after[f.cause - 1];
      post += f.time - d.tau1;
    }
  }
  const int d1 = std::accumulate(before.begin(), before.end(), 0);
  const int total = static_cast<int>(recs.size());
  const int survivors = d.n - total;
  double w1, w2;
  if (end <= d.tau1) {
    // the test ended before the stress-change time
    w1 = pre + survivors * end;
    w2 = 0.0;
    elevated = false;
  } else {
    w1 = pre + (d.n - d1) * d.tau1;
    w2 = post + survivors * (end - d.tau1);
    if (!elevated_rule_known && total > d1 && !d.stress_changed)
      fail("stress_changed must be given for failures after tau1");
  }
  return SuffStats(w1, w2, FailureCounts(before, after), elevated);
}

}  // namespace

void RawDataset::validate() const {
  if (n < 1) fail("n must be >= 1");
  if (J < 1) fail("J must be >= 1");
  if (!(tau1 >= 0.0 && std::isfinite(tau1))) fail("tau1 must be finite and >= 0");
  if (static_cast<int>(records.size()) > n) fail("more records than units on test");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const FailureRecord& f = records[i];
    if (!(std::isfinite(f.time) && f.time >= 0.0))
      fail("record " + std::to_string(i + 1) + ": time must be finite and >= 0");
    if (f.cause < 1 || f.cause > J)
      fail("record " + std::to_string(i + 1) + ": cause must be in 1.." + std::to_string(J));
  }
  if (regime == Regime::type2) {
    if (r < 1 || r > n) fail("type-II regime needs 1 <= r <= n");
    if (static_cast<int>(records.size()) != r) fail("type-II data must hold exactly r records");
  } else {
    if (!(tau2 > tau1 && std::isfinite(tau2))) fail("type-I regime needs tau2 > tau1");
    for (const FailureRecord& f : records)
      if (f.time > tau2) fail("type-I record after the termination time tau2");
  }
}

SuffStats suff_stats(const RawDataset& data, const Plan& plan) {
  data.validate();
  if (plan.is_none()) fail("plan has no test");
  if (plan.n != data.n) fail("plan n does not match the data");
  if (plan.m > 0 && std::abs(plan.tau1 - data.tau1) > 1e-12 * std::max(1.0, plan.tau1))
    fail("plan tau1 does not match the data");
  if (data.regime == Regime::type1) {
    const bool el = data.stress_changed.value_or(true);
    return reduce(data, true, el, data.tau2);
  }
  if (plan.r != data.r) fail("plan r does not match the data");
  const auto recs = sorted_records(data);
  const double t_r = recs.back().time;
  int d1 = 0;
  for (const FailureRecord& f : recs) d1 += f.time <= data.tau1;
  const bool elevated = t_r > data.tau1 && d1 < plan.m;
  if (data.stress_changed && t_r > data.tau1 && *data.stress_changed != elevated)
    fail("stress_changed contradicts the plan's rule (d1 = " + std::to_string(d1) +
         ", m = " + std::to_string(plan.m) + ")");
  return reduce(data, true, elevated, t_r);
}

SuffStats suff_stats(const RawDataset& data) {
  data.validate();
  if (data.regime == Regime::type1)
    return reduce(data, true, data.stress_changed.value_or(true), data.tau2);
  const auto recs = sorted_records(data);
  return reduce(data, false, data.stress_changed.value_or(false), recs.back().time);
}

MleResult fit_mle(const SuffStats& s) {
  const int J = s.counts.J();
  MleResult out{std::vector<double>(J, 0.0), std::vector<std::optional<double>>(J), {}, s};
  if (!s.elevated) {
    if (!(s.w1 + s.w2 > 0.0)) throw DomainError("fit_mle: needs positive exposure");
    // a single stress level: the ordinary exponential MLE on total exposure
    for (int j = 0; j < J; ++j) out.lambda_hat[j] = s.counts.cause_total(j) / (s.w1 + s.w2);
    out.notes.push_back("stress not raised: acceleration factors are not identifiable");
    return out;
  }
  if (!(s.w1 > 0.0)) throw DomainError("fit_mle: needs w1 > 0");
  for (int j = 0; j < J; ++j) {
    const int a = s.counts.before(j), b = s.counts.after(j);
    out.lambda_hat[j] = a / s.w1;
    const std::string tag = "cause " + std::to_string(j + 1) + ": ";
    if (a == 0 && b > 0)
      out.notes.push_back(tag + "no failures before tau1, so phi is identified only jointly with lambda");
    else if (b == 0)
      out.notes.push_back(tag + "no failures after tau1, so phi has no interior maximum");
    else if (!(s.w2 > 0.0))
      out.notes.push_back(tag + "no exposure after tau1");
    else
      out.phi_hat[j] = b * s.w1 / (a * s.w2);
  }
  return out;
}

MleResult fit_mle(const RawDataset& data) { return fit_mle(suff_stats(data)); }

double log_likelihood(const SuffStats& s, const Theta& theta) {
  if (theta.J() != s.counts.J()) throw DomainError("log_likelihood: dimension mismatch");
  double ll = 0.0;
  for (int j = 0; j < theta.J(); ++j) {
    const double lam = theta.lambda()[j];
    const double phi = s.elevated ? theta.phi()[j] : 1.0;
    const int dj = s.counts.cause_total(j);
    const int d2 = s.elevated ? s.counts.after(j) : 0;
    if (dj > 0) {
      if (!(lam > 0.0)) return -kInf;
      ll += dj * std::log(lam);
    }
    if (d2 > 0) ll += d2 * std::log(phi);
    ll -= lam * (s.w1 + phi * s.w2);
  }
  return ll;
}

double reliability_curve(const Theta& theta, double tau1, double t, std::optional<int> component) {
  if (!(t >= 0.0)) throw DomainError("reliability_curve: t must be >= 0");
  if (component && (*component < 1 || *component > theta.J()))
    throw DomainError("reliability_curve: component out of range");
  double h = 0.0;
  for (int j = 0; j < theta.J(); ++j) {
    if (component && *component != j + 1) continue;
    const double lam = theta.lambda()[j];
    h += t <= tau1 ? lam * t : lam * (tau1 + theta.phi()[j] * (t - tau1));
  }
  return std::exp(-h);
}

double reliability_curve(const MleResult& fit, double tau1, double t, std::optional<int> component) {
  const int J = static_cast<int>(fit.lambda_hat.size());
  if (component && (*component < 1 || *component > J))
    throw DomainError("reliability_curve: component out of range");
  if (!(t >= 0.0)) throw DomainError("reliability_curve: t must be >= 0");
  double h = 0.0;
  for (int j = 0; j < J; ++j) {
    if (component && *component != j + 1) continue;
    const double lam = fit.lambda_hat[j];
    if (t <= tau1 || lam == 0.0) {
      h += lam * t;
      continue;
    }
    if (!fit.phi_hat[j])
      throw DomainError("reliability_curve: phi of cause " + std::to_string(j + 1) +
                        " is undefined");
    h += lam * (tau1 + *fit.phi_hat[j] * (t - tau1));
  }
  return std::exp(-h);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32),
                    0x61616273u};
  return std::mt19937_64(seq);
}

Theta draw_theta(const PriorSpec& priors, std::mt19937_64& rng) {
  std::vector<double> lam(priors.J()), phi(priors.J());
  for (int j = 0; j < priors.J(); ++j) {
    std::gamma_distribution<double> g(priors[j].alpha, 1.0 / priors[j].beta);
    std::uniform_real_distribution<double> u(1.0, priors[j].l);
    lam[j] = g(rng);
    phi[j] = u(rng);
  }
  return Theta(std::move(lam), std::move(phi));
}

Simulation simulate_dataset(const Theta& theta, const Plan& plan, std::mt19937_64& rng) {
  if (plan.is_none()) throw DomainError("simulate_dataset: plan has no test");
  const int n = plan.n, J = theta.J();
  const double tau1 = plan.tau1;
  std::exponential_distribution<double> unit(1.0);
  // latent unit-rate cumulative hazards, one per (unit, cause)
  std::vector<double> e(static_cast<std::size_t>(n) * J);
  for (double& x : e) x = unit(rng);

  auto latent = [&](int i, int j, bool elevated) {
    const double lam = theta.lambda()[j];
    const double x = e[static_cast<std::size_t>(i) * J + j];
    if (!(lam > 0.0)) return kInf;
    if (!elevated || x <= lam * tau1) return x / lam;
    // cumulative exposure: the residual beyond tau1 runs at rate lambda phi
    return tau1 + (x - lam * tau1) / (lam * theta.phi()[j]);
  };
  auto unit_failure = [&](int i, bool elevated, int& cause) {
    double best = kInf;
    cause = 0;
    for (int j = 0; j < J; ++j) {
      const double t = latent(i, j, elevated);
      if (t < best) {
        best = t;
        cause = j + 1;
      }
    }
    return best;
  };
  // failures before tau1 do not depend on the stress path
  int d1 = 0;
  for (int i = 0; i < n; ++i) {
    int c;
    if (unit_failure(i, false, c) <= tau1) ++d1;
  }
  const bool elevated = d1 < plan.m;
  std::vector<FailureRecord> all;
  all.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int c;
    const double t = unit_failure(i, elevated, c);
    if (std::isfinite(t)) all.push_back({t, c});
  }
  if (static_cast<int>(all.size()) < plan.r)
    throw DomainError("simulate_dataset: fewer than r units can fail (zero hazards)");
  std::sort(all.begin(), all.end(),
            [](const FailureRecord& a, const FailureRecord& b) { return a.time < b.time; });
  all.resize(static_cast<std::size_t>(plan.r));

  Simulation sim{RawDataset{}, SuffStats(0.0, 0.0, FailureCounts({0}, {0}), false), all.back().time};
  RawDataset& d = sim.data;
  d.n = n;
  d.tau1 = tau1;
  d.regime = Regime::type2;
  d.r = plan.r;
  d.J = J;
  d.records = std::move(all);
  if (sim.t_r > tau1) d.stress_changed = elevated;
  sim.stats = suff_stats(d, plan);
  return sim;
}

Simulation simulate_dataset(const Theta& theta, const Plan& plan, std::uint64_t seed) {
  std::mt19937_64 rng = substream(seed, 0);
  return simulate_dataset(theta, plan, rng);
}

McEstimate mc_bayes_risk(const Plan& plan, const PriorSpec& priors, const LossPoly& loss,
                         const CostModel& costs, int reps, std::uint64_t seed, int threads) {
  check_compatible(priors, loss);
  if (reps < 1000) throw DomainError("mc_bayes_risk: needs reps >= 1000");
  if (plan.is_none()) {
    return {no_sampling_risk(priors, loss, costs).risk, 0.0, reps};
  }
  std::vector<double> values(static_cast<std::size_t>(reps));
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (values.size() + kChunk - 1) / kChunk;
  detail::parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t hi = std::min(values.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i) {
      std::mt19937_64 rng = substream(seed, i);
      const Theta theta = draw_theta(priors, rng);
      const Simulation sim = simulate_dataset(theta, plan, rng);
      const PosteriorKernel kernel(priors, sim.stats.counts, sim.stats.elevated);
      const double phi = kernel.expected_loss(sim.stats.w1, sim.stats.w2, loss);
      const Action a = phi <= costs.rejection() ? Action::accept : Action::reject;
      values[i] = realized_loss(sim.stats, a, theta, plan, costs, loss, sim.t_r);
    }
  });
  // fixed-order reduction
  long double sum = 0.0L, sq = 0.0L;
  for (double v : values) sum += v;
  const long double mean = sum / reps;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double var = static_cast<double>(sq / (reps - 1));
  return {static_cast<double>(mean), std::sqrt(var / reps), reps};
}

}  // namespace aabsp
