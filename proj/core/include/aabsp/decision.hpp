// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "aabsp/model.hpp"

namespace aabsp {

// Failure counts by phase (before / after tau1) and cause.
class FailureCounts {
 public:
  FailureCounts(std::vector<int> before, std::vector<int> after);

  int J() const { return static_cast<int>(before_.size()); }
  int before(int j) const { return before_[static_cast<std::size_t>(j)]; }
  int after(int j) const { return after_[static_cast<std::size_t>(j)]; }
  int cause_total(int j) const { return before(j) + after(j); }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  int total() const { return d1_ + d2_; }
  const std::vector<int>& before() const { return before_; }
  const std::vector<int>& after() const { return after_; }

 private:
  std::vector<int> before_;
  std::vector<int> after_;
  int d1_ = 0;
  int d2_ = 0;
};

bool operator==(const FailureCounts& a, const FailureCounts& b);

struct SuffStats {
  double w1;
  double w2;
  FailureCounts counts;
  bool elevated;  // stress raised at tau1

  SuffStats(double w1, double w2, FailureCounts counts, bool elevated);
};

// Exponents p selecting which posterior moment H1 computes.
class ExponentVector {
 public:
  explicit ExponentVector(std::vector<int> p);
  static ExponentVector zero(int J);
  static ExponentVector unit(int J, int j);
  static ExponentVector pair(int J, int i, int j);

  int J() const { return static_cast<int>(p_.size()); }
  int operator[](int j) const { return p_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<int> p_;
};

// Posterior quantities for fixed counts and stress path, as functions of
// the exposures (w1, w2).  Everything is carried in logs.
class PosteriorKernel {
 public:
  PosteriorKernel(const PriorSpec& priors, const FailureCounts& counts, bool elevated);

  int J() const { return static_cast<int>(cause_.size()); }
  bool elevated() const { return elevated_; }

  // log of prod_j int_1^{l_j} phi^{delta d2j} Gamma(s_j + p_j)
  //   / (w1 + phi^delta w2 + beta_j)^{s_j + p_j} dphi
  double log_h1(double w1, double w2, const ExponentVector& p) const;
  // Same integral by direct quadrature over phi (reference path).
  double log_h1_quadrature(double w1, double w2, const ExponentVector& p) const;

  // Posterior first and second moments of each lambda_j and log H1(0).
  struct Moments {
    std::vector<double> m1;
    std::vector<double> m2;
    double log_h0 = 0.0;
  };
  Moments moments(double w1, double w2) const;

  double expected_loss(double w1, double w2, const LossPoly& loss) const;
  double expected_loss(const Moments& mo, const LossPoly& loss) const;

  // log of the prior-predictive kernel: the likelihood kernel of (w1, w2, d)
  // integrated against the prior, without combinatorial/exposure factors.
  double log_marginal(double w1, double w2) const;
  double log_marginal(const Moments& mo) const { return mo.log_h0 + prior_log_const_; }

 private:
  struct Cause {
    double s;      // alpha_j + d_{+j}
    int d1;
    int d2;        // post-tau1 count entering the phi power (0 when not elevated)
    double alpha;
    double beta;
    double l;
  };
  // log G_j(k) for k = 0, 1, 2
  void log_g(const Cause& c, double w1, double w2, double out[3]) const;
  double log_g_one(const Cause& c, double w1, double w2, int k) const;
  double log_g_quadrature(const Cause& c, double w1, double w2, int k) const;

  std::vector<Cause> cause_;
  bool elevated_;
  double prior_log_const_;
};

double h1(const SuffStats& stats, const PriorSpec& priors, const ExponentVector& p);
double log_h1(const SuffStats& stats, const PriorSpec& priors, const ExponentVector& p);
double h1_by_quadrature(const SuffStats& stats, const PriorSpec& priors, const ExponentVector& p);

double posterior_expected_loss(const SuffStats& stats, const PriorSpec& priors,
                               const LossPoly& loss);

Action bayes_decision(const SuffStats& stats, const PriorSpec& priors, const LossPoly& loss,
                      double C_r);

// phi(w1, 0, d): independent of the stress path.
double expected_loss_at_zero_w2(const FailureCounts& counts, const PriorSpec& priors,
                                const LossPoly& loss, double w1);

// c(d): the w1 where phi(w1, 0, d) = C_r.  0 if phi(0, 0, d) <= C_r, +inf
// when phi never drops to C_r (a_0 >= C_r).
double threshold_c_unclipped(const FailureCounts& counts, const PriorSpec& priors,
                             const LossPoly& loss, double C_r);

// c'(d) = min{c(d), n tau1}
double threshold_c(const FailureCounts& counts, const PriorSpec& priors, const LossPoly& loss,
                   double C_r, int n, double tau1);

// c1(w1, d): the w2 where phi(w1, w2, d) = C_r; 0 when w1 >= c(d).
double threshold_c1(double w1, const FailureCounts& counts, bool elevated,
                    const PriorSpec& priors, const LossPoly& loss, double C_r);

// Variant reusing a kernel and a known c(d).
double threshold_c1(double w1, const PosteriorKernel& kernel, const LossPoly& loss, double C_r,
                    double c);

}  // namespace aabsp
