// SPDX-License-Identifier: Apache-2.0
#include "aabsp_cli/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aabsp/datalab.hpp"
#include "aabsp/decision.hpp"
#include "aabsp/error.hpp"
#include "aabsp/optimizer.hpp"
#include "aabsp/risk.hpp"
#include "aabsp_cli/config.hpp"
#include "aabsp_cli/data_io.hpp"
#include "aabsp_cli/report.hpp"

namespace aabsp::cli {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad(int width, const std::string& text) {
  return std::string(text.size() < static_cast<std::size_t>(width) ? width - text.size() : 0, ' ') +
         text;
}

// Plan flags shared by evaluate, decide and mc-risk; each overrides [plan].
struct PlanFlags {
  std::optional<int> n, r, m;
  std::optional<double> tau1;

  void add(CLI::App& cmd) {
    cmd.add_option("--n", n, "units on test");
    cmd.add_option("--r", r, "failures that stop the test");
    cmd.add_option("--m", m, "raise the stress at tau1 iff fewer than m failures by then");
    cmd.add_option("--tau1", tau1, "time of the possible stress change");
  }

  Plan resolve(const RunConfig& cfg) const {
    if (n && *n == 0) return Plan::none();
    if (!cfg.plan && !(n && r)) throw ConfigError("give --n and --r or a [plan] section", "plan");
    const Plan base = cfg.plan.value_or(Plan{});
    if (!n && base.is_none()) return Plan::none();
    return Plan(n.value_or(base.n), r.value_or(base.r), m.value_or(base.m),
                tau1.value_or(base.tau1));
  }
};

struct Common {
  std::string config;
  bool json = false;

  RunConfig load() const {
    if (config.empty()) return {};
    return load_config(config);
  }
};

void add_common(CLI::App& cmd, Common& c, bool config_required) {
  auto* opt = cmd.add_option("--config", c.config, "configuration file");
  if (config_required) opt->required();
  cmd.add_flag("--json", c.json, "machine-readable output");
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

// ---- optimize ---------------------------------------------------------------

struct OptimizeArgs {
  Common common;
  std::string mode;
  std::optional<double> fixed_tau;
  bool compare = false;
  std::optional<int> n_max;
  bool full_bound = false;
  std::optional<int> threads;
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = a.common.load();
  SearchConfig sc = cfg.search;
  if (!a.mode.empty()) sc.mode = parse_mode(a.mode);
  if (a.fixed_tau) sc.fixed_tau1 = *a.fixed_tau;
  if (a.n_max) sc.n_max_override = *a.n_max;
  if (a.full_bound) sc.full_bound = true;
  if (a.threads) sc.threads = *a.threads;
  sc.validate();
  const CostModel& costs = cfg.require_costs();
  RiskModel model(cfg.require_priors(), cfg.require_loss(), costs.rejection());
  const OptResult res = a.compare ? compare_modes(model, costs, sc) : optimize_plan(model, costs, sc);
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";
  if (a.common.json)
    write_json(out, to_json(res));
  else
    print_opt_result(out, res);
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  Common common;
  PlanFlags plan;
  std::string result;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = a.common.load();
  std::optional<OptResult> stored;
  Plan plan;
  if (!a.result.empty()) {
    std::ifstream in(a.result);
    if (!in) throw ValidationError("cannot open result file '" + a.result + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("result file is not JSON: ") + e.what());
    }
    stored = opt_result_from_json(doc);
    plan = stored->best_plan;
  } else {
    plan = a.plan.resolve(cfg);
  }
  const CostModel& costs = cfg.require_costs();
  RiskModel model(cfg.require_priors(), cfg.require_loss(), costs.rejection());
  const PlanEvaluation eval = model.evaluate(plan, costs);
  if (stored && std::abs(eval.total - stored->best_eval.total) >
                    1e-6 * std::max(1.0, std::abs(stored->best_eval.total)))
    err << "warning: recomputed risk differs from the stored result (" << fmt("%.10g", eval.total)
        << " vs " << fmt("%.10g", stored->best_eval.total) << ")\n";
  if (a.common.json) {
    json j{{"plan", to_json(plan)}, {"eval", to_json(eval)}};
    if (stored) j["stored"] = to_json(*stored);
    write_json(out, j);
  } else {
    print_evaluation(out, plan, eval);
    if (stored) out << "stored risk           " << fmt("%.6f", stored->best_eval.total) << "\n";
  }
  return 0;
}

// ---- decide -----------------------------------------------------------------

struct DecideArgs {
  Common common;
  PlanFlags plan;
  std::string data;
};

int cmd_decide(const DecideArgs& a, std::ostream& out, std::ostream&) {
  RunConfig cfg = a.common.load();
  const PriorSpec& priors = cfg.require_priors();
  const LossPoly& loss = cfg.require_loss();
  const CostModel& costs = cfg.require_costs();
  const Plan plan = a.plan.resolve(cfg);
  if (plan.is_none()) throw ValidationError("decide needs a plan with a test");
  RawDataset data;
  data.n = plan.n;
  data.tau1 = plan.tau1;
  data.regime = Regime::type2;
  data.r = plan.r;
  data.J = priors.J();
  data.records = read_failures(a.data);
  data.stress_changed = cfg.data.stress_changed;
  const SuffStats st = suff_stats(data, plan);
  const double phi = posterior_expected_loss(st, priors, loss);
  const double e = phi - costs.rejection();
  const Action act = bayes_decision(st, priors, loss, costs.rejection());
  const char* verdict = act == Action::accept ? "accept" : "reject";
  if (a.common.json) {
    write_json(out, {{"plan", to_json(plan)},
                     {"stats", to_json(st)},
                     {"phi", phi},
                     {"e", e},
                     {"decision", verdict}});
    return 0;
  }
  out << "plan (n, r, m, tau1)  " << format_plan(plan) << "\n"
      << "w1                    " << fmt("%.6f", st.w1) << "\n"
      << "w2                    " << fmt("%.6f", st.w2) << "\n"
      << "stress changed        " << (st.elevated ? "yes" : "no") << "\n"
      << "cause   d_1j   d_2j\n";
  for (int j = 0; j < st.counts.J(); ++j) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%5d%7d%7d\n", j + 1, st.counts.before(j), st.counts.after(j));
    out << buf;
  }
  out << "posterior loss phi    " << fmt("%.6f", phi) << "\n"
      << "e = phi - C_r         " << fmt("%.6f", e) << "\n"
      << "decision              " << verdict << "\n";
  return 0;
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
  Common common;
  std::string data;
  std::optional<int> n, r;
  std::optional<double> tau1, tau2;
  std::optional<bool> stress_changed;
  std::vector<double> t_grid;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream&) {
  RunConfig cfg = a.common.load();
  RawDataset data;
  data.records = read_failures(a.data);
  const DataMeta& meta = cfg.data;
  const auto n = a.n ? a.n : meta.n;
  const auto tau1 = a.tau1 ? a.tau1 : meta.tau1;
  if (!n) throw ConfigError("give --n or data.n", "data.n");
  if (!tau1) throw ConfigError("give --tau1 or data.tau1", "data.tau1");
  data.n = *n;
  data.tau1 = *tau1;
  const auto tau2 = a.tau2 ? a.tau2 : meta.tau2;
  const auto r = a.r ? a.r : meta.r;
  Regime regime = meta.regime.value_or(tau2 && !r ? Regime::type1 : Regime::type2);
  if (a.tau2) regime = Regime::type1;
  if (a.r) regime = Regime::type2;
  if (a.r && a.tau2) throw ConfigError("give either --r or --tau2", "data");
  data.regime = regime;
  if (regime == Regime::type1) {
    if (!tau2) throw ConfigError("type-I data needs --tau2 or data.tau2", "data.tau2");
    data.tau2 = *tau2;
  } else {
    data.r = r.value_or(static_cast<int>(data.records.size()));
  }
  data.stress_changed = a.stress_changed ? a.stress_changed : meta.stress_changed;
  int J = cfg.priors ? cfg.priors->J() : 1;
  for (const auto& rec : data.records) J = std::max(J, rec.cause);
  data.J = J;
  if (regime == Regime::type2 && !data.stress_changed) {
    // Without a plan, a type-II record with failures after tau1 reveals
    // whether the stress was raised only through the flag.
    for (const auto& rec : data.records)
      if (rec.time > data.tau1)
        throw ConfigError("type-II data with failures after tau1 needs --stress-changed",
                          "data.stress_changed");
  }
  const MleResult fit = fit_mle(data);
  if (a.common.json) {
    json j = to_json(fit);
    json curve = json::array();
    for (double t : a.t_grid) {
      json row{{"t", t}, {"unit", reliability_curve(fit, data.tau1, t)}};
      json comp = json::array();
      for (int c = 1; c <= J; ++c) comp.push_back(reliability_curve(fit, data.tau1, t, c));
      row["components"] = comp;
      curve.push_back(row);
    }
    j["reliability"] = curve;
    write_json(out, j);
    return 0;
  }
  out << "w1 " << fmt("%.6f", fit.stats.w1) << "   w2 " << fmt("%.6f", fit.stats.w2)
      << "   stress changed " << (fit.stats.elevated ? "yes" : "no") << "\n"
      << "cause   d_1j   d_2j    lambda_hat        phi_hat\n";
  for (int j = 0; j < J; ++j) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%5d%7d%7d%14.6f", j + 1, fit.stats.counts.before(j),
                  fit.stats.counts.after(j), fit.lambda_hat[j]);
    out << buf;
    if (fit.phi_hat[j])
      out << fmt("%15.6f", *fit.phi_hat[j]) << "\n";
    else
      out << "      undefined\n";
  }
  for (const auto& note : fit.notes) out << "note: " << note << "\n";
  if (!a.t_grid.empty()) {
    out << "\n         t          unit";
    for (int c = 1; c <= J; ++c) out << "   cause " << c << "    ";
    out << "\n";
    for (double t : a.t_grid) {
      out << fmt("%10.4f", t) << fmt("%14.6f", reliability_curve(fit, data.tau1, t));
      for (int c = 1; c <= J; ++c) out << fmt("%14.6f", reliability_curve(fit, data.tau1, t, c));
      out << "\n";
    }
  }
  return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  Common common;
  PlanFlags plan;
  int reps = 7;
  std::uint64_t seed = 1;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  RunConfig cfg = a.common.load();
  const Theta& theta = cfg.require_theta();
  const PriorSpec& priors = cfg.require_priors();
  const LossPoly& loss = cfg.require_loss();
  const CostModel& costs = cfg.require_costs();
  const Plan plan = a.plan.resolve(cfg);
  if (plan.is_none()) throw ValidationError("simulate needs a plan with a test");
  if (a.reps < 1) throw ConfigError("must be >= 1", "reps");
  namespace fs = std::filesystem;
  if (!a.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + a.out_dir + "': " + ec.message());
  }
  const int J = theta.J();
  json rows = json::array();
  std::string table;
  {
    std::string h = "   i";
    for (int k = 1; k <= plan.r; ++k) h += pad(9, "y_" + std::to_string(k));
    for (int j = 1; j <= J; ++j) h += pad(6, "d_1" + std::to_string(j));
    h += "   d_1  change?";
    for (int j = 1; j <= J; ++j) h += pad(6, "d_2" + std::to_string(j));
    h += "        w1        w2         e  a_B\n";
    table = h;
  }
  for (int i = 1; i <= a.reps; ++i) {
    auto rng = substream(a.seed, static_cast<std::uint64_t>(i - 1));
    const Simulation sim = simulate_dataset(theta, plan, rng);
    const double phi = posterior_expected_loss(sim.stats, priors, loss);
    const double e = phi - costs.rejection();
    const int a_b = e < 0.0 ? 1 : 0;
    if (!a.out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "rep_%04d.csv", i);
      const fs::path p = fs::path(a.out_dir) / name;
      std::ofstream f(p);
      if (!f) throw ValidationError("cannot write '" + p.string() + "'");
      write_failures(f, sim.data.records);
      if (!f) throw ValidationError("error writing '" + p.string() + "'");
    }
    const auto& c = sim.stats.counts;
    std::string line = fmt("%4.0f", i);
    for (const auto& rec : sim.data.records) line += fmt("%9.2f", rec.time);
    for (int j = 0; j < J; ++j) line += fmt("%6.0f", c.before(j));
    line += fmt("%6.0f", c.d1());
    line += sim.stats.elevated ? "      Yes" : "       No";
    for (int j = 0; j < J; ++j) line += fmt("%6.0f", c.after(j));
    line += fmt("%10.4f", sim.stats.w1) + fmt("%10.4f", sim.stats.w2) + fmt("%10.3f", e) +
            fmt("%5.0f", a_b) + "\n";
    table += line;
    std::vector<double> times;
    for (const auto& rec : sim.data.records) times.push_back(rec.time);
    std::vector<int> causes;
    for (const auto& rec : sim.data.records) causes.push_back(rec.cause);
    rows.push_back({{"i", i},
                    {"times", times},
                    {"causes", causes},
                    {"stats", to_json(sim.stats)},
                    {"stress_changed", sim.stats.elevated},
                    {"e", e},
                    {"a_B", a_b}});
  }
  if (a.common.json)
    write_json(out, {{"plan", to_json(plan)}, {"seed", a.seed}, {"replications", rows}});
  else
    out << table;
  return 0;
}

// ---- mc-risk ----------------------------------------------------------------

struct McArgs {
  Common common;
  PlanFlags plan;
  int reps = 200000;
  std::uint64_t seed = 1;
  bool analytic = false;
  std::optional<int> threads;
};

int cmd_mc_risk(const McArgs& a, std::ostream& out, std::ostream&) {
  RunConfig cfg = a.common.load();
  const PriorSpec& priors = cfg.require_priors();
  const LossPoly& loss = cfg.require_loss();
  const CostModel& costs = cfg.require_costs();
  const Plan plan = a.plan.resolve(cfg);
  const McEstimate mc =
      mc_bayes_risk(plan, priors, loss, costs, a.reps, a.seed, a.threads.value_or(cfg.search.threads));
  std::optional<double> exact;
  bool agree = true;
  if (a.analytic) {
    exact = bayes_risk(plan, priors, loss, costs).total;
    agree = std::abs(mc.estimate - *exact) <= 3.0 * mc.std_error + 1e-9 * std::abs(*exact);
  }
  if (a.common.json) {
    json j{{"plan", to_json(plan)},
           {"estimate", mc.estimate},
           {"std_error", mc.std_error},
           {"reps", mc.reps},
           {"seed", a.seed}};
    if (exact) {
      j["analytic"] = *exact;
      j["verdict"] = agree ? "PASS" : "FAIL";
    }
    write_json(out, j);
  } else {
    out << "plan (n, r, m, tau1)  " << format_plan(plan) << "\n"
        << "MC estimate           " << fmt("%.6f", mc.estimate) << "\n"
        << "standard error        " << fmt("%.6f", mc.std_error) << "\n"
        << "replications          " << mc.reps << "\n";
    if (exact)
      out << "analytic risk         " << fmt("%.6f", *exact) << "\n"
          << "agreement (3 SE)      " << (agree ? "PASS" : "FAIL") << "\n";
  }
  return agree ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian sampling plans for step-stress life tests with competing risks",
               "aabsp"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  auto* c_opt = app.add_subcommand("optimize", "search the optimal plan");
  add_common(*c_opt, opt.common, true);
  c_opt->add_option("--mode", opt.mode, "aabsp, cbsp or acbsp")
      ->check(CLI::IsMember({"aabsp", "cbsp", "acbsp"}));
  c_opt->add_option("--fixed-tau", opt.fixed_tau, "pin tau1 instead of searching it");
  c_opt->add_flag("--compare", opt.compare, "also report ACBSP, CBSP and the risk savings");
  c_opt->add_option("--n-max", opt.n_max, "largest sample size searched");
  c_opt->add_flag("--full-bound", opt.full_bound, "search up to the theoretical bound on n");
  c_opt->add_option("--threads", opt.threads, "worker threads (0: all cores)");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Bayes risk of one plan");
  add_common(*c_ev, ev.common, true);
  ev.plan.add(*c_ev);
  c_ev->add_option("--result", ev.result, "re-evaluate the best plan of a saved optimize --json");

  DecideArgs de;
  auto* c_de = app.add_subcommand("decide", "accept or reject a lot from test data");
  add_common(*c_de, de.common, true);
  de.plan.add(*c_de);
  c_de->add_option("--data", de.data, "CSV with header time,cause")->required();

  FitArgs fi;
  auto* c_fi = app.add_subcommand("fit", "maximum likelihood estimates from test data");
  add_common(*c_fi, fi.common, false);
  c_fi->add_option("--data", fi.data, "CSV with header time,cause")->required();
  c_fi->add_option("--n", fi.n, "units on test");
  c_fi->add_option("--tau1", fi.tau1, "stress change time");
  c_fi->add_option("--r", fi.r, "type-II: failures that stopped the test");
  c_fi->add_option("--tau2", fi.tau2, "type-I: termination time");
  c_fi->add_option("--stress-changed", fi.stress_changed, "whether the stress was raised at tau1");
  c_fi->add_option("--t", fi.t_grid, "times for the reliability table")->delimiter(',');

  SimulateArgs si;
  auto* c_si = app.add_subcommand("simulate", "simulate test data and decisions");
  add_common(*c_si, si.common, true);
  si.plan.add(*c_si);
  c_si->add_option("--reps", si.reps, "replications");
  c_si->add_option("--seed", si.seed, "random seed");
  c_si->add_option("--out", si.out_dir, "directory for per-replication CSV files");

  McArgs mc;
  auto* c_mc = app.add_subcommand("mc-risk", "Monte Carlo Bayes risk of one plan");
  add_common(*c_mc, mc.common, true);
  mc.plan.add(*c_mc);
  c_mc->add_option("--reps", mc.reps, "replications (at least 1000)");
  c_mc->add_option("--seed", mc.seed, "random seed");
  c_mc->add_flag("--analytic", mc.analytic, "compare with the analytic risk at 3 standard errors");
  c_mc->add_option("--threads", mc.threads, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (c_opt->parsed()) return cmd_optimize(opt, out, err);
    if (c_ev->parsed()) return cmd_evaluate(ev, out, err);
    if (c_de->parsed()) return cmd_decide(de, out, err);
    if (c_fi->parsed()) return cmd_fit(fi, out, err);
    if (c_si->parsed()) return cmd_simulate(si, out, err);
    if (c_mc->parsed()) return cmd_mc_risk(mc, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace aabsp::cli
