// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "aabsp/decision.hpp"
#include "fixtures.hpp"

using namespace aabsp;

namespace {

// Independent oracle for H1: Boost Gauss-Kronrod on the defining phi-integral,
// one factor per cause, in log space.
double log_h1_oracle(const SuffStats& s, const PriorSpec& pr, const ExponentVector& p) {
  double total = 0.0;
  const int dlt = s.elevated ? 1 : 0;
  for (int j = 0; j < pr.J(); ++j) {
    const double a = pr[j].alpha + s.counts.cause_total(j) + p[j];
    const int d2 = dlt * s.counts.after(j);
    const double base = s.w1 + pr[j].beta;
    // scale out the phi = 1 value to keep the integrand O(1)
    const double ref = -a * std::log(base + s.w2);
    auto f = [&](double phi) {
      const double ph = dlt ? phi : 1.0;
      return std::exp(d2 * std::log(ph) - a * std::log(base + ph * s.w2) - ref);
    };
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 1.0, pr[j].l, 25, 1e-14);
    total += std::lgamma(a) + ref + std::log(I);
  }
  return total;
}

FailureCounts counts(std::vector<int> d1, std::vector<int> d2) { return {d1, d2}; }

double phi_at(double w1, double w2, const FailureCounts& d, bool el, const PriorSpec& pr,
              const LossPoly& loss) {
  return posterior_expected_loss(SuffStats(w1, w2, d, el), pr, loss);
}

}  // namespace

TEST(H1, UnelevatedClosedForm) {
  const auto pr = test::example1_priors();
  const auto d = counts({1, 2}, {1, 1});
  const SuffStats s(10.0, 3.0, d, false);
  double ref = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double a = pr[j].alpha + d.cause_total(j);
    ref += std::lgamma(a) + std::log(pr[j].l - 1) - a * std::log(10.0 + 3.0 + pr[j].beta);
  }
  const auto zero = ExponentVector::zero(2);
  EXPECT_NEAR(log_h1(s, pr, zero), ref, 1e-12 * std::abs(ref));
  EXPECT_NEAR(std::log(h1_by_quadrature(s, pr, zero)), ref, 1e-9 * std::abs(ref));
}

TEST(H1, ZeroPostChangeExposureMatchesUnelevated) {
  const auto pr = test::example1_priors();
  const auto d = counts({2, 1}, {0, 0});
  for (int j = 0; j < 2; ++j) {
    const auto p = ExponentVector::unit(2, j);
    EXPECT_NEAR(log_h1(SuffStats(4.0, 0.0, d, true), pr, p), log_h1(SuffStats(4.0, 0.0, d, false), pr, p),
                1e-12);
  }
}

TEST(H1, ElevatedDualPathReference) {
  const auto pr = test::example1_priors();
  const SuffStats s(10.0, 3.0, counts({1, 2}, {1, 1}), true);
  std::vector<ExponentVector> ps{ExponentVector::zero(2), ExponentVector::unit(2, 0),
                                 ExponentVector::unit(2, 1), ExponentVector::pair(2, 0, 0),
                                 ExponentVector::pair(2, 0, 1), ExponentVector::pair(2, 1, 1)};
  for (const auto& p : ps) {
    const double a = h1(s, pr, p), q = h1_by_quadrature(s, pr, p);
    EXPECT_NEAR(a / q, 1.0, 1e-8);
    EXPECT_NEAR(log_h1(s, pr, p), log_h1_oracle(s, pr, p), 1e-9 * std::abs(log_h1_oracle(s, pr, p)));
  }
}

TEST(H1, ElevatedDualPathRandom) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uw(0.0, 40.0), ua(0.3, 5.0), ub(0.2, 50.0), ul(1.2, 120.0);
  std::uniform_int_distribution<int> ud(0, 5);
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
    const SuffStats s(uw(rng) + 0.01, uw(rng) + 0.01, FailureCounts(d1, d2), true);
    std::vector<ExponentVector> ps{ExponentVector::zero(J), ExponentVector::unit(J, 0),
                                   ExponentVector::pair(J, 0, J - 1)};
    for (const auto& p : ps) {
      const double lh = log_h1(s, pr, p);
      const double lq = std::log(h1_by_quadrature(s, pr, p));
      EXPECT_NEAR(std::exp(lh - lq), 1.0, 1e-8) << "iteration " << it;
      EXPECT_NEAR(std::exp(lh - log_h1_oracle(s, pr, p)), 1.0, 1e-8) << "iteration " << it;
    }
  }
}

TEST(PosteriorLoss, ConstantLossAndLargeExposure) {
  const auto pr = test::example1_priors();
  const LossPoly flat(7.5, {0.0, 0.0}, {0.0, 0.0, 0.0});
  const SuffStats s(3.0, 1.0, counts({1, 0}, {2, 1}), true);
  EXPECT_DOUBLE_EQ(posterior_expected_loss(s, pr, flat), 7.5);
  const auto loss = test::example1_loss();
  const double far = posterior_expected_loss(SuffStats(1e8, 1.0, counts({1, 0}, {2, 1}), true), pr, loss);
  EXPECT_NEAR(far, loss.a0(), 1e-5);
}

TEST(PosteriorLoss, MatchesRatioOfH1) {
  const auto pr = test::example1_priors();
  const auto loss = test::example1_loss();
  const SuffStats s(2.4, 0.7, counts({1, 0}, {1, 1}), true);
  const double h0 = h1_by_quadrature(s, pr, ExponentVector::zero(2));
  double ref = loss.a0();
  for (int j = 0; j < 2; ++j)
    ref += loss.linear(j) * h1_by_quadrature(s, pr, ExponentVector::unit(2, j)) / h0;
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      ref += loss.quad(i, j) * h1_by_quadrature(s, pr, ExponentVector::pair(2, i, j)) / h0;
  EXPECT_NEAR(posterior_expected_loss(s, pr, loss), ref, 1e-8 * ref);
}

TEST(BayesDecision, BoundaryAccepts) {
  const auto pr = test::example1_priors();
  const LossPoly flat(40.0, {0.0, 0.0}, {0.0, 0.0, 0.0});
  const SuffStats s(3.0, 1.0, counts({1, 0}, {2, 1}), true);
  EXPECT_EQ(bayes_decision(s, pr, flat, 40.0), Action::accept);
  EXPECT_EQ(bayes_decision(s, pr, flat, 39.999), Action::reject);
}

TEST(Thresholds, ConstantLossBelowRejectionCost) {
  const auto pr = test::example1_priors();
  const LossPoly flat(5.0, {0.0, 0.0}, {0.0, 0.0, 0.0});
  EXPECT_EQ(threshold_c(counts({1, 1}, {0, 1}), pr, flat, 40.0, 5, 0.2), 0.0);
}

TEST(Thresholds, ClipsAtTotalPreChangeExposure) {
  const auto pr = test::example1_priors();
  const auto loss = test::example1_loss();
  const auto d = counts({0, 0}, {2, 1});
  const double c = threshold_c_unclipped(d, pr, loss, 40.0);
  ASSERT_GT(c, 5 * 0.138);
  EXPECT_EQ(threshold_c(d, pr, loss, 40.0, 5, 0.138), 5 * 0.138);
}

TEST(Thresholds, RootAgreesWithGridScan) {
  const auto pr = test::example1_priors();
  const auto loss = test::example1_loss();
  const auto d = counts({0, 0}, {2, 1});
  const double c = threshold_c_unclipped(d, pr, loss, 40.0);
  // sign scan of phi(w1, 0, d) - C_r over [0, 2c] at 1e5 points
  const int N = 100000;
  double cross = -1;
  double prev = expected_loss_at_zero_w2(d, pr, loss, 0.0) - 40.0;
  for (int i = 1; i <= N; ++i) {
    const double w = 2 * c * i / N;
    const double v = expected_loss_at_zero_w2(d, pr, loss, w) - 40.0;
    if (prev > 0 && v <= 0) {
      cross = w;
      break;
    }
    prev = v;
  }
  EXPECT_NEAR(c, cross, 2 * c / N);

  // c1 at w1 = c / 2, elevated path
  const double w1 = c / 2;
  const double c1 = threshold_c1(w1, d, true, pr, loss, 40.0);
  EXPECT_GT(c1, 0.0);
  double hi = 1.0;
  while (phi_at(w1, hi, d, true, pr, loss) > 40.0) hi *= 2;
  double cross2 = -1;
  for (int i = 1; i <= N; ++i) {
    const double w2 = hi * i / N;
    if (phi_at(w1, w2, d, true, pr, loss) <= 40.0) {
      cross2 = w2;
      break;
    }
  }
  EXPECT_NEAR(c1, cross2, hi / N);
  EXPECT_NEAR(threshold_c1(c, d, true, pr, loss, 40.0), 0.0, 1e-12);
}

TEST(Thresholds, C1NonincreasingInW1) {
  const auto pr = test::example1_priors();
  const auto loss = test::example1_loss();
  const auto d = counts({1, 0}, {1, 1});
  const double c = threshold_c_unclipped(d, pr, loss, 40.0);
  ASSERT_TRUE(std::isfinite(c));
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40; ++i) {
    const double v = threshold_c1(c * i / 40, d, true, pr, loss, 40.0);
    EXPECT_LE(v, prev + 1e-9);
    prev = v;
  }
}

TEST(PosteriorLoss, DecreasesInExposure) {
  std::mt19937_64 rng(23);
  for (int cfg = 0; cfg < 6; ++cfg) {
    const int J = 1 + cfg % 2;
    const auto rc = test::random_config(rng, J);
    std::uniform_int_distribution<int> ud(0, 3);
    std::vector<int> d1, d2;
    for (int j = 0; j < J; ++j) d1.push_back(ud(rng)), d2.push_back(ud(rng));
    const FailureCounts d(d1, d2);
    for (bool el : {false, true}) {
      std::vector<std::vector<double>> g(20, std::vector<double>(20));
      for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 20; ++k)
          g[i][k] = phi_at(0.05 + 0.4 * i, 0.05 + 0.4 * k, d, el, rc.priors, rc.loss);
      for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 20; ++k) {
          if (i + 1 < 20) EXPECT_LT(g[i + 1][k], g[i][k]) << "w1 direction, config " << cfg;
          if (k + 1 < 20) EXPECT_LT(g[i][k + 1], g[i][k]) << "w2 direction, config " << cfg;
        }
    }
  }
}

TEST(DecisionRegion, ThresholdFormEquivalence) {
  std::mt19937_64 rng(29);
  int checked = 0;
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
            const double phi = kern.expected_loss(w1, w2, rc.loss);
            if (std::abs(phi - C_r) < 1e-7 * C_r) continue;  // boundary
            const bool accept = bayes_decision(SuffStats(w1, w2, d, el), rc.priors, rc.loss, C_r) ==
                                Action::accept;
            const bool reject_form =
                w1 < c && w2 < threshold_c1(w1, kern, rc.loss, C_r, c);
            EXPECT_EQ(accept, !reject_form) << "w1=" << w1 << " w2=" << w2;
            ++checked;
          }
      }
    }
  }
  EXPECT_GT(checked, 4000);
}

TEST(DecisionRegion, AcceptanceIsUpwardClosed) {
  const auto pr = test::example1_priors();
  const auto loss = test::example1_loss();
  const FailureCounts d({1, 1}, {0, 1});
  for (bool el : {false, true})
    for (int i = 0; i < 15; ++i)
      for (int k = 0; k < 15; ++k) {
        const double w1 = 0.2 * i, w2 = 0.2 * k;
        if (bayes_decision(SuffStats(w1, w2, d, el), pr, loss, 40.0) != Action::accept) continue;
        EXPECT_EQ(bayes_decision(SuffStats(w1 + 0.2, w2, d, el), pr, loss, 40.0), Action::accept);
        EXPECT_EQ(bayes_decision(SuffStats(w1, w2 + 0.2, d, el), pr, loss, 40.0), Action::accept);
      }
}
