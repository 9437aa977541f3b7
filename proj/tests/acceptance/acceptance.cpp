// SPDX-License-Identifier: Apache-2.0
// Acceptance driver: one verdict line per criterion, preceded by indented
// detail lines.  Exit status is the number of criteria that did not pass.
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "aabsp/datalab.hpp"
#include "aabsp/optimizer.hpp"
#include "aabsp_cli/data_io.hpp"
#include "fixtures.hpp"

using namespace aabsp;

namespace {

constexpr double kRiskTol = 0.02;
constexpr double kTauTol = 0.02;
constexpr double kRrsTol = 0.05;
constexpr int kMcReps = 200000;

int g_failed = 0;

void info(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  std::printf("    ");
  std::vprintf(fmt, ap);
  std::printf("\n");
  std::fflush(stdout);
  va_end(ap);
}

void verdict(int k, bool pass, const std::string& title, double seconds) {
  std::printf("[%d] %s  %s  (%.0fs)\n", k, pass ? "PASS" : "FAIL", title.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string plan_str(const Plan& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%d,%d,%d,%.4f)", p.n, p.r, p.m, p.tau1);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Analytic value within 3 standard errors of the Monte Carlo oracle.
bool mc_agrees(const Plan& plan, const PriorSpec& pr, const LossPoly& loss, const CostModel& costs,
               double analytic, std::uint64_t seed) {
  const auto mc = mc_bayes_risk(plan, pr, loss, costs, kMcReps, seed);
  const bool ok = std::abs(analytic - mc.estimate) <= 3 * mc.std_error;
  info("mc %s: analytic %.4f, simulated %.4f +- %.4f (%d reps) -> %s", plan_str(plan).c_str(),
       analytic, mc.estimate, mc.std_error, mc.reps, ok ? "agree" : "disagree");
  return ok;
}

void show(const Comparisons& c) {
  info("AABSP %s %.4f | ACBSP %s %.4f | CBSP %s %.4f | RRS1 %.3f RRS2 %.3f",
       plan_str(c.aabsp.plan).c_str(), c.aabsp.eval.total, plan_str(c.acbsp.plan).c_str(),
       c.acbsp.eval.total, plan_str(c.cbsp.plan).c_str(), c.cbsp.eval.total, c.rrs1, c.rrs2);
}

// Mode nesting observed along the way, checked again under criterion 6.
bool g_nesting = true;
void note_nesting(const Comparisons& c) {
  g_nesting = g_nesting && c.aabsp.eval.total <= c.acbsp.eval.total + 1e-12 &&
              c.aabsp.eval.total <= c.cbsp.eval.total + 1e-12;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Row {
    double c_a;
    int n, r, m;
    double tau, risk, cbsp_risk, rrs1, rrs2;
  };
  const Row rows[] = {{0.0, 5, 3, 3, 0.115, 35.964, 36.582, 0.000, 1.718},
                      {0.1, 5, 3, 2, 0.138, 36.252, 36.582, 0.011, 0.893},
                      {0.2, 5, 3, 2, 0.212, 36.477, 36.582, 0.170, 0.289}};
  const auto pr = test::example1_priors();
  const auto loss = test::example1_loss();
  const RiskModel model(pr, loss, 40.0);
  bool all = true;
  for (const Row& row : rows) {
    const auto tr = std::chrono::steady_clock::now();
    const auto costs = test::example1_costs(row.c_a);
    const auto res = compare_modes(model, costs);
    const auto& c = *res.comparisons;
    note_nesting(c);
    info("c_a = %.1f (%.0fs)", row.c_a, since(tr));
    show(c);
    const Plan& p = c.aabsp.plan;
    const bool discrete = p.n == row.n && p.r == row.r && p.m == row.m;
    const bool cbsp = c.cbsp.plan.n == 6 && c.cbsp.plan.r == 3 && near(c.cbsp.eval.total, row.cbsp_risk, kRiskTol);
    const bool direct = discrete && cbsp && near(c.aabsp.eval.total, row.risk, kRiskTol) &&
                        near(p.tau1, row.tau, kTauTol) && near(c.rrs1, row.rrs1, kRrsTol) &&
                        near(c.rrs2, row.rrs2, kRrsTol);
    bool ok = direct;
    if (direct) {
      info("matches the reference row");
    } else {
      // Fallback: our analytic values must be confirmed by simulation.  The
      // reference plan is evaluated too; a lower risk found here means the
      // reference optimum is not optimal under the model.
      const Plan reference(row.n, row.r, row.m, row.tau);
      const double ref_risk = model.evaluate(reference, costs).total;
      info("reference row missed; reference plan %s evaluates to %.4f (listed %.3f), ours %.4f",
           plan_str(reference).c_str(), ref_risk, row.risk, c.aabsp.eval.total);
      ok = discrete && cbsp && c.aabsp.eval.total <= ref_risk + 1e-9 &&
           mc_agrees(p, pr, loss, costs, c.aabsp.eval.total, 101) &&
           mc_agrees(reference, pr, loss, costs, ref_risk, 102);
      info("fallback clause (simulation agreement, discrepancy documented in README): %s",
           ok ? "met" : "not met");
    }
    all = all && ok;
  }
  verdict(1, all, "Example 1 optimal designs for c_a in {0, 0.1, 0.2}", since(t0));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pr = test::example2_priors();
  const auto loss = test::example2_loss();
  const RiskModel model(pr, loss, 80.0);
  SearchConfig cfg;
  cfg.fixed_tau1 = 5.0;
  auto matches = [](const Comparisons& c) {
    const Plan& p = c.aabsp.plan;
    return p.n == 7 && p.r == 5 && p.m == 3 && near(c.aabsp.eval.total, 77.126, kRiskTol) &&
           near(c.acbsp.eval.total, 77.283, kRiskTol) && near(c.cbsp.eval.total, 77.236, kRiskTol) &&
           near(c.rrs1, 0.204, kRrsTol) && near(c.rrs2, 0.142, kRrsTol);
  };

  const CostModel stated(0.5, 0.3, 0.3, 0.05, 80.0);
  auto t = std::chrono::steady_clock::now();
  const auto printed = compare_modes(model, stated, cfg);
  note_nesting(*printed.comparisons);
  info("stated costs C_s=0.5 v_s=0.3 C_t=0.3 C_a=0.05 (%.0fs)", since(t));
  show(*printed.comparisons);
  bool ok = matches(*printed.comparisons);
  if (ok) {
    info("matches the reference table");
  } else {
    const auto& best = printed.comparisons->aabsp;
    info("reference table missed under the stated costs; reference plan (7,5,3,5) evaluates to %.4f",
         model.evaluate(Plan(7, 5, 3, 5.0), stated).total);
    const bool mc = mc_agrees(best.plan, pr, loss, stated, best.eval.total, 201);
    // The listed plans reproduce the listed risks under a rescaled cost
    // vector; see README (Known discrepancies).
    const CostModel scaled = test::example2_costs();
    const double aab = model.evaluate(Plan(7, 5, 3, 5.0), scaled).total;
    const double acb = model.evaluate(Plan(6, 5, 5, 5.0), scaled).total;
    const double cb = model.evaluate(Plan(7, 5, 0, 0.0), scaled).total;
    const double rrs1 = relative_risk_saving(aab, acb), rrs2 = relative_risk_saving(aab, cb);
    info("rescaled costs C_s=0.3 v_s=0.1 C_t=0.1 C_a=0.05: (7,5,3) %.4f, (6,5,5) %.4f, (7,5,0) %.4f, "
         "RRS1 %.3f RRS2 %.3f", aab, acb, cb, rrs1, rrs2);
    const bool listed = near(aab, 77.126, kRiskTol) && near(acb, 77.283, kRiskTol) &&
                        near(cb, 77.236, kRiskTol) && near(rrs1, 0.204, kRrsTol) &&
                        near(rrs2, 0.142, kRrsTol);
    info("rescaled costs reproduce the listed plan risks: %s", listed ? "yes" : "no");
    const Plan larger(8, 6, 3, 5.0);
    const double larger_risk = model.evaluate(larger, scaled).total;
    info("under the rescaled costs %s evaluates to %.4f (listed optimum 77.126)",
         plan_str(larger).c_str(), larger_risk);
    const bool ref_mc = mc_agrees(Plan(7, 5, 3, 5.0), pr, loss, scaled, aab, 202) &&
                        mc_agrees(larger, pr, loss, scaled, larger_risk, 203);
    ok = mc && listed && ref_mc;
    info("fallback clause (simulation agreement, discrepancy documented in README): %s",
         ok ? "met" : "not met");
  }
  verdict(2, ok, "Example 2 fixed tau1 = 5 design and mode comparison", since(t0));
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pr = test::example2_priors();
  const auto loss = test::example2_loss();
  SearchConfig cfg;
  cfg.fixed_tau1 = 5.0;
  bool ok = true;
  for (double C_r : {70.0, 90.0}) {
    const auto costs = CostModel(0.5, 0.3, 0.3, 0.05, C_r);
    const auto ns = no_sampling_risk(pr, loss, costs);
    const auto res = optimize_plan(pr, loss, costs, cfg);
    info("C_r = %.0f: optimum %s risk %.6f, no-sampling action %s", C_r,
         plan_str(res.best_plan).c_str(), res.best_eval.total,
         ns.action == Action::accept ? "accept" : "reject");
    if (C_r == 70.0)
      ok = ok && res.best_plan.is_none() && res.best_eval.total == 70.0 && ns.action == Action::reject;
    else
      ok = ok && res.best_plan.is_none() && near(res.best_eval.total, 80.469, 0.005) &&
           ns.action == Action::accept;
  }
  verdict(3, ok, "No-sampling boundary cases C_r = 70 and 90", since(t0));
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  RawDataset d;
  d.n = 35;
  d.tau1 = 5.0;
  d.regime = Regime::type1;
  d.tau2 = 6.0;
  d.J = 2;
  d.stress_changed = true;
  d.records = cli::read_failures(std::string(AABSP_SOURCE_DIR) + "/data/solar_device.csv");
  const auto fit = fit_mle(d);
  info("w1 %.3f w2 %.3f; lambda (%.5f, %.5f); phi (%.4f, %.4f)", fit.stats.w1, fit.stats.w2,
       fit.lambda_hat[0], fit.lambda_hat[1], fit.phi_hat[0].value_or(NAN),
       fit.phi_hat[1].value_or(NAN));
  const bool ok = near(fit.lambda_hat[0], 0.0222, 5e-4) && near(fit.lambda_hat[1], 0.0960, 5e-4) &&
                  fit.phi_hat[0] && fit.phi_hat[1] && near(*fit.phi_hat[0], 55.10, 0.005 * 55.10) &&
                  near(*fit.phi_hat[1], 6.358, 0.005 * 6.358);
  verdict(4, ok, "MLE on the solar-device data", since(t0));
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  bool ok = true;
  for (int k = 0; k < 5; ++k) {
    const auto tc = std::chrono::steady_clock::now();
    const int J = 1 + k % 2;
    const auto cfg = test::random_config(rng, J);
    std::uniform_int_distribution<int> un(1, 6);
    const int n = un(rng);
    const int r = std::uniform_int_distribution<int>(1, n)(rng);
    const int m = std::uniform_int_distribution<int>(0, r)(rng);
    const double tau = std::uniform_real_distribution<double>(0.05, 2.0)(rng) / cfg.priors.total_mean_rate();
    const Plan plan(n, r, m, tau);
    const double analytic = bayes_risk(plan, cfg.priors, cfg.loss, cfg.costs).total;
    const bool agree = mc_agrees(plan, cfg.priors, cfg.loss, cfg.costs, analytic, 300 + k);
    const double secs = since(tc);
    info("config %d (J = %d): %.0fs", k + 1, J, secs);
    ok = ok && agree && secs < 300;
  }
  verdict(5, ok, "Analytic Bayes risk against simulation, 5 random configurations", since(t0));
}

// ---- criterion 6 pieces ----

bool monotonicity_grid() {
  std::mt19937_64 rng(23);
  for (int cfg = 0; cfg < 6; ++cfg) {
    const int J = 1 + cfg % 2;
    const auto rc = test::random_config(rng, J);
    std::uniform_int_distribution<int> ud(0, 3);
    std::vector<int> d1, d2;
    for (int j = 0; j < J; ++j) d1.push_back(ud(rng)), d2.push_back(ud(rng));
    const FailureCounts d(d1, d2);
    for (bool el : {false, true}) {
      const PosteriorKernel kern(rc.priors, d, el);
      double g[20][20];
      for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 20; ++k) g[i][k] = kern.expected_loss(0.05 + 0.4 * i, 0.05 + 0.4 * k, rc.loss);
      for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 20; ++k)
          if ((i + 1 < 20 && !(g[i + 1][k] < g[i][k])) || (k + 1 < 20 && !(g[i][k + 1] < g[i][k])))
            return false;
    }
  }
  return true;
}

bool region_equivalence() {
  std::mt19937_64 rng(29);
  for (int cfg = 0; cfg < 5; ++cfg) {
    const auto rc = test::random_config(rng, 2);
    const double C_r = rc.costs.rejection();
    std::uniform_int_distribution<int> ud(0, 3);
    for (int rep = 0; rep < 4; ++rep) {
      const FailureCounts d({ud(rng), ud(rng)}, {ud(rng), ud(rng)});
      const double c = threshold_c_unclipped(d, rc.priors, rc.loss, C_r);
      const double span = std::isfinite(c) && c > 0 ? 2 * c : 10.0;
      for (bool el : {false, true}) {
        const PosteriorKernel kern(rc.priors, d, el);
        for (int i = 0; i < 12; ++i)
          for (int k = 0; k < 12; ++k) {
            const double w1 = span * (i + 0.37) / 12, w2 = span * (k + 0.61) / 12;
            if (std::abs(kern.expected_loss(w1, w2, rc.loss) - C_r) < 1e-7 * C_r) continue;
            const bool accept =
                bayes_decision(SuffStats(w1, w2, d, el), rc.priors, rc.loss, C_r) == Action::accept;
            const bool reject_form = w1 < c && w2 < threshold_c1(w1, kern, rc.loss, C_r, c);
            if (accept == reject_form) return false;
          }
      }
    }
  }
  return true;
}

double h1_dual_path_worst() {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uw(0.0, 40.0), ua(0.3, 5.0), ub(0.2, 50.0), ul(1.2, 120.0);
  std::uniform_int_distribution<int> ud(0, 5);
  double worst = 0;
  for (int it = 0; it < 300; ++it) {
    const int J = 1 + it % 3;
    std::vector<CausePrior> c;
    std::vector<int> d1, d2;
    for (int j = 0; j < J; ++j) {
      c.push_back({ua(rng), ub(rng), ul(rng)});
      d1.push_back(ud(rng));
      d2.push_back(ud(rng));
    }
    const PriorSpec pr(c);
    const SuffStats s(uw(rng) + 0.01, uw(rng) + 0.01, FailureCounts(d1, d2), it % 4 != 0);
    for (const auto& p : {ExponentVector::zero(J), ExponentVector::unit(J, 0),
                          ExponentVector::pair(J, 0, J - 1)}) {
      const double rel = std::abs(std::expm1(log_h1(s, pr, p) - std::log(h1_by_quadrature(s, pr, p))));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

double no_change_tau_spread() {
  const auto pr = test::example1_priors();
  const auto loss = test::example1_loss();
  const auto costs = test::example1_costs(0.1);
  const RiskModel model(pr, loss, 40.0);
  double worst = 0;
  for (int n : {3, 5})
    for (int r = 1; r <= n; ++r) {
      const double base = model.evaluate(Plan(n, r, 0, 0.0), costs).total;
      for (double tau : {0.0, 0.5, 1.0, 5.0}) {
        const double v = costs.stress() * expected_stress_count_all_m(n, r, tau, pr)[0] +
                         costs.time() * expected_duration_all_m(n, r, tau, pr)[0] +
                         model.decision_loss_all_m(n, r, tau)[0] + n * (costs.sampling() - costs.salvage()) +
                         r * costs.salvage();
        worst = std::max(worst, std::abs(v - base));
      }
    }
  return worst;
}

// Probability mass of one (d, w1-bin, w2-bin) cell under the analytic density.
double cell_mass(const FailureCounts& d, const Theta& th, const Plan& p, double a1, double b1,
                 double a2, double b2) {
  numerics::QuadSettings s;
  s.rel_tol = 1e-9;
  s.abs_tol = 1e-13;
  s.max_subdivisions = 400;
  const double n_tau = p.n * p.tau1;
  const auto w2_integral = [&](double w1) {
    auto f = [&](double w2) { return joint_density(w1, w2, d, th, p).value; };
    if (std::isinf(b2)) return numerics::integrate_semi_infinite(f, a2, s);
    return numerics::integrate_1d(f, {a2, b2}, s);
  };
  if (d.d1() == 0) return (a1 <= n_tau && n_tau < b1) ? w2_integral(n_tau) : 0.0;
  if (d.d1() == d.total()) {
    const double hi = std::min(b1, n_tau);
    if (a2 > 0.0 || !(hi > a1)) return 0.0;
    return numerics::integrate_1d([&](double w1) { return joint_density(w1, 0.0, d, th, p).value; },
                                  {a1, hi}, s);
  }
  const double lo = std::max(a1, (p.n - d.d1()) * p.tau1), hi = std::min(b1, n_tau);
  if (!(hi > lo)) return 0.0;
  return numerics::integrate_1d(w2_integral, {lo, hi}, s);
}

struct ChiSquare {
  double total_mass, stat, p_value;
  int cells;
};

ChiSquare joint_density_chi_square() {
  const Theta th({0.35, 0.5}, {2.0, 4.0});
  const Plan plan(4, 3, 2, 0.6);
  const int reps = 100000;
  const double n_tau = plan.n * plan.tau1;
  const std::vector<double> e1 = {0.0, 0.5 * n_tau, 0.8 * n_tau, n_tau + 1e-9};
  const std::vector<double> e2 = {0.0, 1e-300, 0.4, 1.2, INFINITY};
  auto bin = [](const std::vector<double>& e, double x) {
    for (std::size_t k = 0; k + 1 < e.size(); ++k)
      if (x >= e[k] && x < e[k + 1]) return static_cast<int>(k);
    return static_cast<int>(e.size()) - 2;
  };
  auto key_of = [](const FailureCounts& d, int a, int b) {
    std::vector<int> key = d.before();
    key.insert(key.end(), d.after().begin(), d.after().end());
    key.push_back(a);
    key.push_back(b);
    return key;
  };
  std::map<std::vector<int>, int> observed;
  for (int i = 0; i < reps; ++i) {
    auto rng = substream(5, static_cast<std::uint64_t>(i));
    const auto s = simulate_dataset(th, plan, rng).stats;
    ++observed[key_of(s.counts, bin(e1, s.w1), bin(e2, s.w2))];
  }
  ChiSquare out{0, 0, 0, 0};
  double pooled_e = 0;
  int pooled_o = 0;
  for (const auto& d : enumerate_counts(plan.r, 2))
    for (int a = 0; a + 1 < static_cast<int>(e1.size()); ++a)
      for (int b = 0; b + 1 < static_cast<int>(e2.size()); ++b) {
        const double mass = cell_mass(d, th, plan, e1[a], e1[a + 1], e2[b], e2[b + 1]);
        out.total_mass += mass;
        const auto it = observed.find(key_of(d, a, b));
        const int o = it == observed.end() ? 0 : it->second;
        const double e = mass * reps;
        if (e < 5) {
          pooled_e += e;
          pooled_o += o;
          continue;
        }
        out.stat += (o - e) * (o - e) / e;
        ++out.cells;
      }
  if (pooled_e > 0) {
    out.stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
    ++out.cells;
  }
  const boost::math::chi_squared_distribution<double> dist(out.cells - 1);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.stat));
  return out;
}

bool determinism() {
  const PriorSpec pr({{2.0, 1.5, 6.0}, {1.6, 2.5, 4.0}});
  const LossPoly loss(1.0, {4.0, 2.0}, {6.0, 1.0, 3.0});
  const CostModel costs(0.3, 0.15, 0.8, 0.1, 0.9 * expected_acceptance_loss(pr, loss));
  const RiskModel model(pr, loss, costs.rejection());
  SearchConfig a, b;
  a.n_max_override = b.n_max_override = 5;
  a.threads = 1;
  b.threads = 4;
  const auto ra = compare_modes(model, costs, a), rb = compare_modes(model, costs, b);
  note_nesting(*ra.comparisons);
  bool ok = ra.best_plan == rb.best_plan && ra.best_eval.total == rb.best_eval.total &&
            ra.comparisons->rrs1 == rb.comparisons->rrs1 && ra.comparisons->rrs2 == rb.comparisons->rrs2 &&
            ra.per_n_trace.size() == rb.per_n_trace.size();
  for (std::size_t i = 0; ok && i < ra.per_n_trace.size(); ++i)
    ok = ra.per_n_trace[i].risk == rb.per_n_trace[i].risk && ra.per_n_trace[i].tau1 == rb.per_n_trace[i].tau1;
  const Plan plan(5, 3, 2, 0.3);
  const auto ma = mc_bayes_risk(plan, pr, loss, costs, 20000, 8, 1);
  const auto mb = mc_bayes_risk(plan, pr, loss, costs, 20000, 8, 4);
  ok = ok && ma.estimate == mb.estimate && ma.std_error == mb.std_error;
  const Theta th({0.3, 0.4}, {2.0, 3.0});
  for (std::uint64_t seed = 0; ok && seed < 20; ++seed) {
    const auto s1 = simulate_dataset(th, plan, seed), s2 = simulate_dataset(th, plan, seed);
    ok = s1.t_r == s2.t_r && s1.stats.w1 == s2.stats.w1 && s1.stats.w2 == s2.stats.w2;
  }
  return ok;
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const bool thm1 = monotonicity_grid();
  info("posterior loss decreasing in w1 and w2 on 20x20 grids: %s", thm1 ? "holds" : "violated");
  const bool region = region_equivalence();
  info("decision region equals threshold form: %s", region ? "holds" : "violated");
  const double h1 = h1_dual_path_worst();
  info("h1 incomplete-beta vs quadrature, worst relative gap %.2e (limit 1e-8)", h1);
  const double spread = no_change_tau_spread();
  info("m = 0 risk spread over tau1 in {0, 0.5, 1, 5}: %.2e (limit 1e-6)", spread);
  const bool det = determinism();
  info("optimizer and simulator identical across thread counts: %s", det ? "yes" : "no");
  info("mode nesting R_AABSP <= min(R_ACBSP, R_CBSP) in every comparison run: %s",
       g_nesting ? "holds" : "violated");
  const auto chi = joint_density_chi_square();
  info("joint density: total mass %.9f, chi-square %.2f on %d cells, p = %.3f", chi.total_mass,
       chi.stat, chi.cells, chi.p_value);
  const bool ok = thm1 && region && h1 <= 1e-8 && spread <= 1e-6 && det && g_nesting &&
                  near(chi.total_mass, 1.0, 1e-6) && chi.p_value > 0.01;
  verdict(6, ok, "Property suites", since(t0));
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const PriorSpec pr({{2.21, 100.0, 109.202}, {9.59, 100.0, 11.716}});
  const LossPoly loss = test::example2_loss();
  const CostModel costs(0.6, 0.3, 0.3, 0.1, 80.0);
  const RiskModel model(pr, loss, 80.0);
  const double hi = default_tau1_bracket_hi(pr);
  const int points = 100;
  std::vector<std::vector<double>> trace(4, std::vector<double>(points));
  for (int i = 0; i < points; ++i) {
    const double tau = hi * i / (points - 1);
    const auto st = expected_stress_count_all_m(4, 3, tau, pr);
    const auto du = expected_duration_all_m(4, 3, tau, pr);
    const auto r1v = model.decision_loss_all_m(4, 3, tau);
    for (int m = 0; m <= 3; ++m)
      trace[m][i] = 4 * (costs.sampling() - costs.salvage()) + 3 * costs.salvage() +
                    costs.stress() * st[m] + costs.time() * du[m] + r1v[m];
  }
  bool ok = true;
  for (int m = 0; m <= 3; ++m) {
    const auto& v = trace[m];
    std::vector<int> minima;
    for (int i = 1; i + 1 < points; ++i)
      if (v[i] < v[i - 1] && v[i] < v[i + 1]) minima.push_back(i);
    const double lo = *std::min_element(v.begin(), v.end()), top = *std::max_element(v.begin(), v.end());
    if (m == 0) {
      info("m = 0: spread %.2e over tau1 in [0, %.2f]", top - lo, hi);
      ok = ok && top - lo <= 1e-9;
    } else {
      info("m = %d: %zu interior local minima; minimum %.4f at tau1 = %.3f", m, minima.size(),
           minima.empty() ? lo : v[minima[0]], minima.empty() ? 0.0 : hi * minima[0] / (points - 1));
      ok = ok && minima.size() == 1;
    }
  }
  verdict(7, ok, "Risk against tau1 for plans (4,3,m): single interior minimum, flat m = 0", since(t0));
}

}  // namespace

int main() {
  std::printf("acceptance: tolerances risk %.2f, tau1 %.2f, RRS %.2f pp, Monte Carlo %d reps at 3 SE\n",
              kRiskTol, kTauTol, kRrsTol, kMcReps);
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  std::printf("acceptance: %d of 7 criteria passed\n", 7 - g_failed);
  return g_failed;
}
