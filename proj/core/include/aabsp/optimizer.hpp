// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aabsp/model.hpp"
#include "aabsp/risk.hpp"

namespace aabsp {

// AABSP searches every m in 0..r, CBSP forces m = 0 (never raise the
// stress), ACBSP forces m = r (raise it whenever the test is still running).
enum class SearchMode { aabsp, cbsp, acbsp };

const char* to_string(SearchMode mode);

struct SearchConfig {
  std::optional<int> n_max_override;
  bool full_bound = false;                // search up to n_upper_bound instead of min(bound, 30)
  std::optional<double> tau1_bracket_hi;  // default 5 J / sum_j(alpha_j / beta_j)
  int grid_points = 25;
  double tau_tol = 1e-3;
  SearchMode mode = SearchMode::aabsp;
  std::optional<double> fixed_tau1;       // pin tau1 instead of searching it
  int threads = 0;                        // 0: hardware concurrency

  void validate() const;
};

double default_tau1_bracket_hi(const PriorSpec& priors);

struct TauResult {
  double tau1 = 0.0;
  PlanEvaluation eval;
  bool at_bracket_edge = false;
};

struct TraceRow {
  int n;
  int r;
  int m;
  double tau1;
  double risk;
};

struct ModeResult {
  Plan plan;
  PlanEvaluation eval;
};

struct Comparisons {
  ModeResult aabsp;
  ModeResult acbsp;
  ModeResult cbsp;
  double rrs1 = 0.0;  // percent saving of AABSP against ACBSP
  double rrs2 = 0.0;  // percent saving of AABSP against CBSP
};

struct OptResult {
  Plan best_plan;
  PlanEvaluation best_eval;
  std::vector<TraceRow> per_n_trace;  // best candidate found for each searched n
  std::optional<Comparisons> comparisons;
  std::vector<std::string> warnings;
  int n_searched = 0;
};

// Minimizes the Bayes risk of (n, r, m, .) over tau1 on [0, bracket_hi]:
// grid scan then golden-section refinement.  m = 0 returns tau1 = 0 without
// searching; a fixed_tau1 in the config is evaluated directly.
TauResult optimize_tau1(int n, int r, int m, const RiskModel& model, const CostModel& costs,
                        const SearchConfig& config = {});
TauResult optimize_tau1(int n, int r, int m, const PriorSpec& priors, const LossPoly& loss,
                        const CostModel& costs, const SearchConfig& config = {});

// Exhaustive search over (n, r, m, tau1) with bound-based pruning; compares
// against the no-sampling plan, which is returned when it wins.
OptResult optimize_plan(const RiskModel& model, const CostModel& costs,
                        const SearchConfig& config = {});
OptResult optimize_plan(const PriorSpec& priors, const LossPoly& loss, const CostModel& costs,
                        const SearchConfig& config = {});

// Runs the AABSP, ACBSP and CBSP searches on one shared model and reports
// the AABSP result with relative risk savings.
OptResult compare_modes(const RiskModel& model, const CostModel& costs,
                        const SearchConfig& config = {});
OptResult compare_modes(const PriorSpec& priors, const LossPoly& loss, const CostModel& costs,
                        const SearchConfig& config = {});

// 100 (reference - risk) / reference
double relative_risk_saving(double risk, double reference);

}  // namespace aabsp
