// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "aabsp/model.hpp"

namespace aabsp::test {

inline PriorSpec example1_priors() { return PriorSpec({{2.5, 1.5, 10.0}, {2.2, 2.0, 10.0}}); }
inline LossPoly example1_loss() { return LossPoly(2.0, {3.0, 3.0}, {4.0, 4.0, 4.0}); }
inline CostModel example1_costs(double C_a) { return CostModel(0.5, 0.25, 5.0, C_a, 40.0); }

inline PriorSpec example2_priors() {
  return PriorSpec({{3.05, 137.35, 109.072}, {13.0, 135.44, 11.718}});
}
inline LossPoly example2_loss() { return LossPoly(6.0, {200.0, 200.0}, {4000.0, 4000.0, 4000.0}); }
// The cost scale that reproduces the reference fixed-tau1 comparison.
inline CostModel example2_costs() { return CostModel(0.3, 0.1, 0.1, 0.05, 80.0); }

// Random valid configuration with moderate magnitudes.
struct RandomConfig {
  PriorSpec priors;
  LossPoly loss;
  CostModel costs;
};

inline RandomConfig random_config(std::mt19937_64& rng, int J) {
  std::uniform_real_distribution<double> ua(1.2, 4.0), ub(0.8, 3.0), ul(1.5, 12.0), uc(0.5, 4.0);
  std::vector<CausePrior> c;
  for (int j = 0; j < J; ++j) c.push_back({ua(rng), ub(rng), ul(rng)});
  std::vector<double> lin, quad;
  for (int j = 0; j < J; ++j) lin.push_back(uc(rng));
  for (int i = 0; i < J * (J + 1) / 2; ++i) quad.push_back(uc(rng));
  PriorSpec pr(c);
  LossPoly loss(uc(rng), lin, quad);
  // C_r near the prior expected loss keeps both actions in play
  std::uniform_real_distribution<double> ur(0.7, 1.1);
  const double cr = ur(rng) * expected_acceptance_loss(pr, loss);
  std::uniform_real_distribution<double> us(0.1, 0.6), ut(0.0, 2.0);
  const double cs = us(rng);
  return {pr, loss, CostModel(cs, 0.5 * cs, ut(rng), 0.5 * ut(rng), cr)};
}

}  // namespace aabsp::test
