// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aabsp/error.hpp"

namespace aabsp {

// Gamma(alpha, rate beta) prior on a baseline rate and Uniform(1, l) prior on
// the matching acceleration factor.
struct CausePrior {
  double alpha;
  double beta;
  double l;
};

class PriorSpec {
 public:
  explicit PriorSpec(std::vector<CausePrior> causes);

  int J() const { return static_cast<int>(causes_.size()); }
  const CausePrior& operator[](int j) const { return causes_[static_cast<std::size_t>(j)]; }
  const std::vector<CausePrior>& causes() const { return causes_; }

  double mean_rate(int j) const { return causes_[j].alpha / causes_[j].beta; }
  double total_mean_rate() const;

 private:
  std::vector<CausePrior> causes_;
};

// Costs in a common currency: per-unit sampling C_s, per-survivor salvage v_s,
// per-time C_t, per-unit elevated-stress C_a, lot rejection C_r.
// C_s > v_s is checked by the operations that need it (search bound,
// optimizer), not here, so that risk evaluation accepts any salvage value.
class CostModel {
 public:
  CostModel(double sampling, double salvage, double time, double stress, double rejection);

  double sampling() const { return C_s_; }
  double salvage() const { return v_s_; }
  double time() const { return C_t_; }
  double stress() const { return C_a_; }
  double rejection() const { return C_r_; }

  CostModel with_stress(double C_a) const;
  CostModel with_rejection(double C_r) const;

 private:
  double C_s_, v_s_, C_t_, C_a_, C_r_;
};

// h(lambda) = a_0 + sum_j a_j lambda_j + sum_{i<=j} a_ij lambda_i lambda_j
class LossPoly {
 public:
  // `upper` lists a_ij for i <= j row by row: a_11, a_12, ..., a_1J, a_22, ...
  LossPoly(double a0, std::vector<double> linear, std::vector<double> upper);

  int J() const { return static_cast<int>(linear_.size()); }
  double a0() const { return a0_; }
  double linear(int j) const { return linear_[static_cast<std::size_t>(j)]; }
  double quad(int i, int j) const;  // symmetric access, a_ij for i <= j
  bool is_constant() const;

  double operator()(std::span<const double> lambda) const;

 private:
  double a0_;
  std::vector<double> linear_;
  std::vector<double> quad_;  // dense J*J, upper triangle used
};

struct Plan {
  int n = 0;
  int r = 0;
  int m = 0;
  double tau1 = 0.0;

  Plan() = default;
  Plan(int n, int r, int m, double tau1);

  static Plan none() { return {}; }
  bool is_none() const { return n == 0; }
};

bool operator==(const Plan& a, const Plan& b);

// Rates lambda_j >= 0 and acceleration factors phi_j >= 1.  The boundary
// values are admitted so that degenerate cases (no acceleration, zero
// hazard) can be expressed.
class Theta {
 public:
  Theta(std::vector<double> lambda, std::vector<double> phi);

  int J() const { return static_cast<int>(lambda_.size()); }
  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& phi() const { return phi_; }

 private:
  std::vector<double> lambda_;
  std::vector<double> phi_;
};

void check_compatible(const PriorSpec& priors, const LossPoly& loss);

double expected_acceptance_loss(const PriorSpec& priors, const LossPoly& loss);

enum class Action { accept, reject };

struct NoSamplingRisk {
  double risk;
  Action action;
};

NoSamplingRisk no_sampling_risk(const PriorSpec& priors, const LossPoly& loss,
                                const CostModel& costs);

int n_upper_bound(const PriorSpec& priors, const LossPoly& loss, const CostModel& costs);

// E[min{h(lambda), C_r}] under the prior: the decision loss attainable with
// perfect knowledge of lambda, hence a lower bound on any plan's R1.
double expected_min_loss(const PriorSpec& priors, const LossPoly& loss, double C_r);

// Decision loss E[min{E[h | S], C_r}] of an experiment that observes the first
// r events of each cause's own Poisson process (S_j ~ Gamma(r, lambda_j)).
// Any test stopping at the r-th failure is a garbling of it (the acceleration
// factors are independent of lambda), so this bounds R1 from below for every
// plan with that r.  Nonincreasing in r, never below expected_min_loss.
double informed_loss_bound(const PriorSpec& priors, const LossPoly& loss, double C_r, int r);

}  // namespace aabsp
