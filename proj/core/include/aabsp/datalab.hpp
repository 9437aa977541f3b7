// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aabsp/decision.hpp"
#include "aabsp/model.hpp"
#include "aabsp/risk.hpp"

namespace aabsp {

struct FailureRecord {
  double time;
  int cause;  // 1..J
};

// TYPE2 stops at the r-th failure; TYPE1 stops at a fixed time tau2 (only
// used to ingest externally terminated data for fitting).
enum class Regime { type2, type1 };

struct RawDataset {
  int n = 0;
  double tau1 = 0.0;
  Regime regime = Regime::type2;
  int r = 0;          // TYPE2
  double tau2 = 0.0;  // TYPE1
  int J = 1;
  std::vector<FailureRecord> records;
  std::optional<bool> stress_changed;

  // Throws ValidationError naming the violated invariant.
  void validate() const;
};

// Reduction of a TYPE2 dataset under the plan that produced it (delta from
// the plan's rule), or of a TYPE1 dataset (delta from stress_changed,
// default raised).
SuffStats suff_stats(const RawDataset& data, const Plan& plan);
// Plan-free reduction: delta taken from stress_changed (required for TYPE2
// data with failures after tau1).
SuffStats suff_stats(const RawDataset& data);

struct MleResult {
  std::vector<double> lambda_hat;
  std::vector<std::optional<double>> phi_hat;
  std::vector<std::string> notes;  // why a phi_hat is undefined
  SuffStats stats;
};

MleResult fit_mle(const RawDataset& data);
MleResult fit_mle(const SuffStats& stats);

// Log of the reduced likelihood prod_j lambda_j^{d+j} phi_j^{delta d2j}
// exp(-lambda_j (w1 + phi_j^delta w2)).
double log_likelihood(const SuffStats& stats, const Theta& theta);

// Survival under the cumulative exposure model; component = nullopt gives
// the unit (all causes), otherwise the 1-based cause index.
double reliability_curve(const Theta& theta, double tau1, double t,
                         std::optional<int> component = std::nullopt);
double reliability_curve(const MleResult& fit, double tau1, double t,
                         std::optional<int> component = std::nullopt);

struct Simulation {
  RawDataset data;
  SuffStats stats;
  double t_r;  // time of the r-th failure (test end)
};

Simulation simulate_dataset(const Theta& theta, const Plan& plan, std::uint64_t seed);
Simulation simulate_dataset(const Theta& theta, const Plan& plan, std::mt19937_64& rng);

// Generator for replication `rep` of a run seeded with `seed`; independent
// of how replications are scheduled.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t rep);

Theta draw_theta(const PriorSpec& priors, std::mt19937_64& rng);

struct McEstimate {
  double estimate;
  double std_error;
  int reps;
};

McEstimate mc_bayes_risk(const Plan& plan, const PriorSpec& priors, const LossPoly& loss,
                         const CostModel& costs, int reps, std::uint64_t seed, int threads = 0);

}  // namespace aabsp
