// SPDX-License-Identifier: Apache-2.0
#include "aabsp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "aabsp/numerics.hpp"
#include "parallel.hpp"

namespace aabsp {

const char* to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::aabsp: return "aabsp";
    case SearchMode::cbsp: return "cbsp";
    case SearchMode::acbsp: return "acbsp";
  }
  return "?";
}

void SearchConfig::validate() const {
  if (grid_points < 3) throw ConfigError("must be at least 3", "search.grid_points");
  if (!(tau_tol > 0.0)) throw ConfigError("must be positive", "search.tau_tol");
  if (n_max_override && *n_max_override < 0) throw ConfigError("must be >= 0", "search.n_max");
  if (tau1_bracket_hi && !(*tau1_bracket_hi > 0.0 && std::isfinite(*tau1_bracket_hi)))
    throw ConfigError("must be positive and finite", "search.tau1_hi");
  if (fixed_tau1 && !(*fixed_tau1 >= 0.0 && std::isfinite(*fixed_tau1)))
    throw ConfigError("must be nonnegative and finite", "search.fixed_tau1");
  if (threads < 0) throw ConfigError("must be >= 0", "search.threads");
}

double default_tau1_bracket_hi(const PriorSpec& priors) {
  double s = 0.0;
  for (int j = 0; j < priors.J(); ++j) s += priors.mean_rate(j);
  return 5.0 * priors.J() / s;
}

double relative_risk_saving(double risk, double reference) {
  if (!(reference > 0.0)) return 0.0;
  return 100.0 * (reference - risk) / reference;
}

namespace {

struct Candidate {
  Plan plan;
  PlanEvaluation eval;
  bool at_edge = false;
  bool valid = false;
};

PlanEvaluation assemble(const Plan& plan, const CostModel& costs, double stress, double duration,
                        double r1) {
  PlanEvaluation ev;
  ev.sampling_cost = plan.n * (costs.sampling() - costs.salvage()) + plan.r * costs.salvage();
  ev.stress_cost = costs.stress() > 0.0 ? costs.stress() * stress : 0.0;
  ev.time_cost = costs.time() > 0.0 ? costs.time() * duration : 0.0;
  ev.decision_loss = r1;
  ev.total = ev.sampling_cost + ev.stress_cost + ev.time_cost + ev.decision_loss;
  return ev;
}

// m-independent parts evaluated once per tau1, then combined for each m.
struct AllM {
  std::vector<double> r1, stress, duration;
};

AllM all_m(int n, int r, double tau1, const RiskModel& model) {
  return {model.decision_loss_all_m(n, r, tau1),
          expected_stress_count_all_m(n, r, tau1, model.priors()),
          expected_duration_all_m(n, r, tau1, model.priors())};
}

bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  return a.valid && a.eval.total < b.eval.total;
}

void check_costs(const RiskModel& model, const CostModel& costs) {
  if (!(costs.sampling() > costs.salvage()))
    throw ConfigError("sampling cost C_s must exceed salvage value v_s", "costs.C_s");
  if (costs.rejection() != model.rejection_cost())
    throw DomainError("cost model and risk model disagree on C_r");
}

class Search {
 public:
  Search(const RiskModel& model, const CostModel& costs, const SearchConfig& cfg)
      : model_(model), costs_(costs), cfg_(cfg) {
    hi_ = cfg.tau1_bracket_hi ? *cfg.tau1_bracket_hi : default_tau1_bracket_hi(model.priors());
  }

  double bracket_hi() const { return hi_; }

  // Best (m, tau1) for fixed (n, r) within the mode's admissible m.
  Candidate best_for(int n, int r) const {
    const int m_lo = cfg_.mode == SearchMode::acbsp ? r : 0;
    const int m_hi = cfg_.mode == SearchMode::cbsp ? 0 : r;
    Candidate best;
    if (m_lo == 0) {
      const Plan p(n, r, 0, 0.0);
      best = {p, model_.evaluate(p, costs_), false, true};
    }
    if (m_hi == 0) return best;

    if (cfg_.fixed_tau1) {
      const double t = *cfg_.fixed_tau1;
      const AllM v = all_m(n, r, t, model_);
      for (int m = std::max(m_lo, 1); m <= m_hi; ++m) {
        const Plan p(n, r, m, t);
        Candidate c{p, assemble(p, costs_, v.stress[m], v.duration[m], v.r1[m]), false, true};
        if (better(c, best)) best = c;
      }
      return best;
    }

    const std::vector<double> xs = numerics::scan_grid({0.0, hi_}, cfg_.grid_points);
    const int first = std::max(m_lo, 1);
    std::vector<std::vector<double>> fs(static_cast<std::size_t>(m_hi + 1),
                                        std::vector<double>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const AllM v = all_m(n, r, xs[i], model_);
      for (int m = first; m <= m_hi; ++m) {
        const Plan p(n, r, m, xs[i]);
        fs[m][i] = assemble(p, costs_, v.stress[m], v.duration[m], v.r1[m]).total;
      }
    }
    for (int m = first; m <= m_hi; ++m) {
      auto f = [&](double t) { return model_.evaluate(Plan(n, r, m, t), costs_).total; };
      const numerics::ScalarMin sm = numerics::refine_grid_minimum(f, xs, fs[m], cfg_.tau_tol);
      const Plan p(n, r, m, sm.argmin);
      Candidate c{p, model_.evaluate(p, costs_), sm.argmin >= hi_ - cfg_.tau_tol, true};
      if (better(c, best)) best = c;
    }
    return best;
  }

  // Lower bound on the risk of any admissible plan with this (n, r).
  double lower_bound(int n, int r) const {
    double duration;
    if (cfg_.mode == SearchMode::cbsp)
      duration = expected_duration(Plan(n, r, 0, 0.0), model_.priors());
    else if (cfg_.fixed_tau1)
      duration = expected_duration(Plan(n, r, r, *cfg_.fixed_tau1), model_.priors());
    else
      duration = accelerated_duration_bound(n, r, model_.priors());
    const double time = costs_.time() > 0.0 ? costs_.time() * duration : 0.0;
    return n * (costs_.sampling() - costs_.salvage()) + r * costs_.salvage() + time +
           informed(r);
  }

 private:
  double informed(int r) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = informed_.find(r);
    if (it != informed_.end()) return it->second;
    // a small allowance keeps the bound below R1 despite quadrature error
    const double v = informed_loss_bound(model_.priors(), model_.loss(), model_.rejection_cost(), r) -
                     1e-7 * model_.rejection_cost();
    informed_.emplace(r, v);
    return v;
  }

  const RiskModel& model_;
  const CostModel& costs_;
  const SearchConfig& cfg_;
  double hi_;
  mutable std::mutex mu_;
  mutable std::map<int, double> informed_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

TauResult optimize_tau1(int n, int r, int m, const RiskModel& model, const CostModel& costs,
                        const SearchConfig& config) {
  config.validate();
  if (!(0 <= m && m <= r && r <= n && r >= 1))
    throw DomainError("optimize_tau1: need 0 <= m <= r <= n, r >= 1");
  TauResult out;
  if (m == 0) {
    out.eval = model.evaluate(Plan(n, r, 0, 0.0), costs);
    return out;
  }
  if (config.fixed_tau1) {
    out.tau1 = *config.fixed_tau1;
    out.eval = model.evaluate(Plan(n, r, m, out.tau1), costs);
    return out;
  }
  const double hi =
      config.tau1_bracket_hi ? *config.tau1_bracket_hi : default_tau1_bracket_hi(model.priors());
  auto f = [&](double t) { return model.evaluate(Plan(n, r, m, t), costs).total; };
  const numerics::ScalarMin sm =
      numerics::minimize_scalar_unimodal(f, {0.0, hi}, config.tau_tol, config.grid_points);
  out.tau1 = sm.argmin;
  out.eval = model.evaluate(Plan(n, r, m, sm.argmin), costs);
  out.at_bracket_edge = sm.argmin >= hi - config.tau_tol;
  return out;
}

TauResult optimize_tau1(int n, int r, int m, const PriorSpec& priors, const LossPoly& loss,
                        const CostModel& costs, const SearchConfig& config) {
  const RiskModel model(priors, loss, costs.rejection());
  return optimize_tau1(n, r, m, model, costs, config);
}

OptResult optimize_plan(const RiskModel& model, const CostModel& costs,
                        const SearchConfig& config) {
  config.validate();
  check_costs(model, costs);
  const Search search(model, costs, config);

  OptResult out;
  const NoSamplingRisk ns = no_sampling_risk(model.priors(), model.loss(), costs);
  Candidate best{Plan::none(), {}, false, true};
  best.eval.decision_loss = ns.risk;
  best.eval.total = ns.risk;

  const int bound = n_upper_bound(model.priors(), model.loss(), costs);
  int cap = bound;
  if (config.n_max_override)
    cap = std::min(cap, *config.n_max_override);
  else if (!config.full_bound)
    cap = std::min(cap, 30);

  const double margin = costs.sampling() - costs.salvage();
  // every plan with n units costs at least n margin + v_s + E[min(h, C_r)]
  const double floor_rest =
      costs.salvage() +
      expected_min_loss(model.priors(), model.loss(), model.rejection_cost()) -
      1e-7 * model.rejection_cost();

  bool pruned_out = false;
  int n = 1;
  for (; n <= cap; ++n) {
    if (n * margin + floor_rest >= best.eval.total) {
      pruned_out = true;
      break;
    }
    // candidates for this n are judged against the incumbent at its start,
    // so the outcome does not depend on the evaluation schedule
    const double incumbent = best.eval.total;
    std::vector<int> rs;
    for (int r = 1; r <= n; ++r)
      if (search.lower_bound(n, r) < incumbent) rs.push_back(r);
    std::vector<Candidate> found(rs.size());
    detail::parallel_for(rs.size(), config.threads,
                         [&](std::size_t i) { found[i] = search.best_for(n, rs[i]); });
    Candidate best_n;
    for (const Candidate& c : found)
      if (better(c, best_n)) best_n = c;
    out.n_searched = n;
    if (!best_n.valid) continue;
    out.per_n_trace.push_back(
        {n, best_n.plan.r, best_n.plan.m, best_n.plan.tau1, best_n.eval.total});
    if (better(best_n, best)) best = best_n;
  }
  if (!pruned_out && n * margin + floor_rest >= best.eval.total) pruned_out = true;
  if (!pruned_out && cap < bound)
    out.warnings.push_back("search stopped at the n cap " + std::to_string(cap) +
                           " before the pruning bound closed; the theoretical bound is " +
                           std::to_string(bound));
  if (best.at_edge)
    out.warnings.push_back("optimal tau1 lies at the search bracket edge " +
                           fmt(search.bracket_hi()) + "; consider a larger bracket");
  out.best_plan = best.plan;
  out.best_eval = best.eval;
  return out;
}

OptResult optimize_plan(const PriorSpec& priors, const LossPoly& loss, const CostModel& costs,
                        const SearchConfig& config) {
  const RiskModel model(priors, loss, costs.rejection());
  return optimize_plan(model, costs, config);
}

OptResult compare_modes(const RiskModel& model, const CostModel& costs,
                        const SearchConfig& config) {
  SearchConfig c = config;
  c.mode = SearchMode::aabsp;
  OptResult out = optimize_plan(model, costs, c);
  c.mode = SearchMode::acbsp;
  const OptResult a = optimize_plan(model, costs, c);
  c.mode = SearchMode::cbsp;
  const OptResult b = optimize_plan(model, costs, c);
  Comparisons cmp;
  cmp.aabsp = {out.best_plan, out.best_eval};
  cmp.acbsp = {a.best_plan, a.best_eval};
  cmp.cbsp = {b.best_plan, b.best_eval};
  cmp.rrs1 = relative_risk_saving(out.best_eval.total, a.best_eval.total);
  cmp.rrs2 = relative_risk_saving(out.best_eval.total, b.best_eval.total);
  for (const auto& w : a.warnings) out.warnings.push_back("acbsp: " + w);
  for (const auto& w : b.warnings) out.warnings.push_back("cbsp: " + w);
  out.comparisons = cmp;
  return out;
}

OptResult compare_modes(const PriorSpec& priors, const LossPoly& loss, const CostModel& costs,
                        const SearchConfig& config) {
  const RiskModel model(priors, loss, costs.rejection());
  return compare_modes(model, costs, config);
}

}  // namespace aabsp
