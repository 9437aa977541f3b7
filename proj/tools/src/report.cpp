// SPDX-License-Identifier: Apache-2.0
#include "aabsp_cli/report.hpp"

#include <cstdio>
#include <ostream>
#include <string>

#include "aabsp/error.hpp"

namespace aabsp::cli {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

json mode_json(const ModeResult& m) { return {{"plan", to_json(m.plan)}, {"eval", to_json(m.eval)}}; }

ModeResult mode_from_json(const json& j) {
  return {plan_from_json(j.at("plan")), evaluation_from_json(j.at("eval"))};
}

}  // namespace

json to_json(const Plan& p) { return {{"n", p.n}, {"r", p.r}, {"m", p.m}, {"tau1", p.tau1}}; }

json to_json(const PlanEvaluation& e) {
  return {{"sampling_cost", e.sampling_cost},
          {"stress_cost", e.stress_cost},
          {"time_cost", e.time_cost},
          {"decision_loss", e.decision_loss},
          {"total", e.total}};
}

json to_json(const OptResult& r) {
  json trace = json::array();
  for (const auto& t : r.per_n_trace)
    trace.push_back({{"n", t.n}, {"r", t.r}, {"m", t.m}, {"tau1", t.tau1}, {"risk", t.risk}});
  json out{{"best_plan", to_json(r.best_plan)},
           {"best_eval", to_json(r.best_eval)},
           {"per_n_trace", trace},
           {"warnings", r.warnings},
           {"n_searched", r.n_searched}};
  if (r.comparisons) {
    const Comparisons& c = *r.comparisons;
    out["comparisons"] = {{"aabsp", mode_json(c.aabsp)},
                          {"acbsp", mode_json(c.acbsp)},
                          {"cbsp", mode_json(c.cbsp)},
                          {"rrs1", c.rrs1},
                          {"rrs2", c.rrs2}};
  } else {
    out["comparisons"] = nullptr;
  }
  return out;
}

json to_json(const SuffStats& s) {
  return {{"w1", s.w1},
          {"w2", s.w2},
          {"d1", s.counts.before()},
          {"d2", s.counts.after()},
          {"elevated", s.elevated}};
}

json to_json(const MleResult& f) {
  json phi = json::array();
  for (const auto& p : f.phi_hat) phi.push_back(p ? json(*p) : json(nullptr));
  return {{"lambda_hat", f.lambda_hat}, {"phi_hat", phi}, {"notes", f.notes}, {"stats", to_json(f.stats)}};
}

Plan plan_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  if (n == 0) return Plan::none();
  return Plan(n, j.at("r").get<int>(), j.at("m").get<int>(), j.at("tau1").get<double>());
}

PlanEvaluation evaluation_from_json(const json& j) {
  PlanEvaluation e;
  e.sampling_cost = j.at("sampling_cost").get<double>();
  e.stress_cost = j.at("stress_cost").get<double>();
  e.time_cost = j.at("time_cost").get<double>();
  e.decision_loss = j.at("decision_loss").get<double>();
  e.total = j.at("total").get<double>();
  return e;
}

OptResult opt_result_from_json(const json& j) {
  try {
    OptResult r;
    r.best_plan = plan_from_json(j.at("best_plan"));
    r.best_eval = evaluation_from_json(j.at("best_eval"));
    for (const auto& t : j.at("per_n_trace"))
      r.per_n_trace.push_back({t.at("n").get<int>(), t.at("r").get<int>(), t.at("m").get<int>(),
                               t.at("tau1").get<double>(), t.at("risk").get<double>()});
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.n_searched = j.at("n_searched").get<int>();
    const json& c = j.at("comparisons");
    if (!c.is_null()) {
      Comparisons cmp;
      cmp.aabsp = mode_from_json(c.at("aabsp"));
      cmp.acbsp = mode_from_json(c.at("acbsp"));
      cmp.cbsp = mode_from_json(c.at("cbsp"));
      cmp.rrs1 = c.at("rrs1").get<double>();
      cmp.rrs2 = c.at("rrs2").get<double>();
      r.comparisons = cmp;
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed result document: ") + e.what());
  }
}

std::string format_plan(const Plan& p) {
  if (p.is_none()) return "(0, 0, 0, 0)";
  return "(" + std::to_string(p.n) + ", " + std::to_string(p.r) + ", " + std::to_string(p.m) +
         ", " + fmt("%.4f", p.tau1) + ")";
}

void print_evaluation(std::ostream& out, const Plan& plan, const PlanEvaluation& e) {
  out << "plan (n, r, m, tau1)  " << format_plan(plan) << "\n"
      << "  sampling cost       " << fmt("%.6f", e.sampling_cost) << "\n"
      << "  stress cost         " << fmt("%.6f", e.stress_cost) << "\n"
      << "  time cost           " << fmt("%.6f", e.time_cost) << "\n"
      << "  decision loss       " << fmt("%.6f", e.decision_loss) << "\n"
      << "  Bayes risk          " << fmt("%.6f", e.total) << "\n";
}

void print_opt_result(std::ostream& out, const OptResult& r) {
  out << "optimal plan\n";
  print_evaluation(out, r.best_plan, r.best_eval);
  out << "n searched            " << r.n_searched << "\n";
  if (!r.per_n_trace.empty()) {
    out << "\nbest per n\n    n    r    m        tau1          risk\n";
    for (const auto& t : r.per_n_trace) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%5d%5d%5d%12.4f%14.6f\n", t.n, t.r, t.m, t.tau1, t.risk);
      out << buf;
    }
  }
  if (r.comparisons) {
    out << "\n";
    print_comparisons(out, *r.comparisons);
  }
}

void print_comparisons(std::ostream& out, const Comparisons& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-7s%-26s%12s\n", "mode", "plan", "risk");
  out << buf;
  const auto row = [&](const char* name, const ModeResult& m) {
    std::snprintf(buf, sizeof buf, "%-7s%-26s%12.4f\n", name, format_plan(m.plan).c_str(),
                  m.eval.total);
    out << buf;
  };
  row("AABSP", c.aabsp);
  row("ACBSP", c.acbsp);
  row("CBSP", c.cbsp);
  std::snprintf(buf, sizeof buf, "RRS1 %.3f %%   RRS2 %.3f %%\n", c.rrs1, c.rrs2);
  out << buf;
}

}  // namespace aabsp::cli
