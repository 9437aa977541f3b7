// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "aabsp/decision.hpp"
#include "aabsp/model.hpp"
#include "aabsp/numerics.hpp"

namespace aabsp {

struct PlanEvaluation {
  double sampling_cost = 0.0;  // n (C_s - v_s) + r v_s
  double stress_cost = 0.0;    // C_a E[#units moved to the higher stress]
  double time_cost = 0.0;      // C_t E[test duration]
  double decision_loss = 0.0;  // R1
  double total = 0.0;
};

// Cause shares of a failure before tau1 (p1) and after it (p2).
struct RelativeRisks {
  std::vector<double> p1;
  std::vector<double> p2;
};

RelativeRisks relative_risks(const Theta& theta, bool elevated);

// E[(n - D1) 1{D1 < m}]: prior-averaged number of units put on the higher stress.
double expected_stress_count(const Plan& plan, const PriorSpec& priors);

// E[T^(r)] averaged over the prior; +inf when the prior makes it infinite.
double expected_duration(const Plan& plan, const PriorSpec& priors);

// The same two quantities for m = 0..r at once (entry m), sharing the work.
std::vector<double> expected_stress_count_all_m(int n, int r, double tau1, const PriorSpec& priors);
std::vector<double> expected_duration_all_m(int n, int r, double tau1, const PriorSpec& priors);

// E[T^(r)] if every unit ran at the elevated stress from time 0.  Pathwise
// no plan can finish sooner, so this bounds expected_duration from below.
double accelerated_duration_bound(int n, int r, const PriorSpec& priors);

struct DensityValue {
  double value = 0.0;
  bool w1_degenerate = false;  // point mass at w1 = n tau1 (no failure before tau1)
  bool w2_degenerate = false;  // point mass at w2 = 0 (all failures before tau1)
};

// Conditional density of (W1, W2, D = counts) given theta under the plan.
DensityValue joint_density(double w1, double w2, const FailureCounts& counts, const Theta& theta,
                           const Plan& plan);

// All count tables (before, after) with total r, lexicographic in
// (d_11..d_1J, d_21..d_2J).
std::vector<FailureCounts> enumerate_counts(int r, int J);

// Prior-mixed integral of (C_r - h) over the rejection region for one d.
// Computed by direct nested quadrature (reference path).
double h_of_d(const FailureCounts& counts, const Plan& plan, const PriorSpec& priors,
              const LossPoly& loss, double C_r);

// R1 = E[h] + sum_d H(d), reference path.
double r1_reference(const Plan& plan, const PriorSpec& priors, const LossPoly& loss, double C_r);

// R1 via RiskModel's cached evaluation.
double r1(const Plan& plan, const PriorSpec& priors, const LossPoly& loss, double C_r);

PlanEvaluation bayes_risk(const Plan& plan, const PriorSpec& priors, const LossPoly& loss,
                          const CostModel& costs);

double realized_loss(const SuffStats& stats, Action decision, const Theta& theta, const Plan& plan,
                     const CostModel& costs, const LossPoly& loss, double t_r);

// Caches the plan-independent pieces of R1 for fixed (priors, loss, C_r):
// per count table d the rejection threshold c(d) and the inner integral
//   Phi_d(w1) = int_0^{c1(w1,d)} w2^{d2-1}/Gamma(d2) m_d(w1,w2) (C_r - phi) dw2
// (m_d the prior-predictive kernel) as a Chebyshev interpolant on [0, c(d)].
// With those, R1 reduces to one-dimensional integrals against the exposure
// kernels.  Thread-safe; cached entries are immutable once built.
class RiskModel {
 public:
  RiskModel(PriorSpec priors, LossPoly loss, double C_r);
  ~RiskModel();
  RiskModel(const RiskModel&) = delete;
  RiskModel& operator=(const RiskModel&) = delete;

  const PriorSpec& priors() const { return priors_; }
  const LossPoly& loss() const { return loss_; }
  double rejection_cost() const { return C_r_; }
  double expected_loss() const { return e_h_; }

  double decision_loss(const Plan& plan) const;

  // R1 for m = 0..r at once (entry m); shares work across m.
  std::vector<double> decision_loss_all_m(int n, int r, double tau1) const;

  PlanEvaluation evaluate(const Plan& plan, const CostModel& costs) const;

  // Direct (uncached) evaluation of Phi_d, exposed for testing.
  double inner_integral(const FailureCounts& counts, double w1) const;

 private:
  struct CountsEntry;
  struct TotalsEntry;
  struct Level;

  const Level& level(int r) const;
  std::unique_ptr<Level> build_level(int r) const;
  double phi_cached(const CountsEntry& e, double w1) const;

  // per-d1 contributions for a given (n, r, tau1):
  //   elevated[d1]   = C(n,d1) sum_{d: d1} K'(d) int g1 Phi_d
  //   unelevated[d1] = C(n,d1) sum_{d+} multinom int gU_{d1} F0
  struct Pieces {
    double base = 0.0;  // sum_{d+} multinom int u^{r-1}/Gamma(r) F0
    std::vector<double> elevated;
    std::vector<double> unelevated;
  };
  Pieces pieces(int n, int r, double tau1, int m_max) const;

  PriorSpec priors_;
  LossPoly loss_;
  double C_r_;
  double e_h_;
  mutable std::mutex mutex_;
  struct LevelSlot;
  mutable std::map<int, std::unique_ptr<LevelSlot>> levels_;
};

}  // namespace aabsp
