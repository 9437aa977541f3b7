// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exposure (total-time-on-test) kernels of the step-stress test.  Each is the
// density of the exposure statistic with the rate-dependent factors
// lambda^d exp(-lambda w) stripped off, so that the full conditional density
// is kernel * (rate factors).  They depend only on n, tau1 and counts.

namespace aabsp::exposure {

// Density of the sum of k independent Uniform(0,1) variables.
double irwin_hall_density(int k, double x);

// E[S^p] for S ~ Irwin-Hall(k).
long double irwin_hall_moment(int k, int p);

// Kernel of W1 given D1 = d1 >= 1 failures before tau1 (test continues):
// sum_i (-1)^i C(d1,i) (w1 - (n-d1+i) tau1)_+^{d1-1} / Gamma(d1).
double pre_change_kernel(double w1, int n, int d1, double tau1);

// Kernel of U = W1 + W2 when D1 = d1 < r and no stress change:
// sum_i (-1)^i C(d1,i) (u - (n-d1+i) tau1)_+^{r-1} / Gamma(r).
double total_exposure_kernel(double u, int n, int d1, int r, double tau1);

// Kernel of W1 when all r failures precede tau1 (w2 = 0):
// sum_{k=r}^n C(n,k) sum_j (-1)^j C(k,j) (w1 - (n-k+j) tau1)_+^{r-1} / Gamma(r).
double censored_kernel(double w1, int n, int r, double tau1);

// Kernel of U over the paths that never raise the stress when the rule
// raises it iff D1 < m:  u^{r-1}/Gamma(r) - sum_{d1<m} C(n,d1) total_exposure_kernel.
double unelevated_kernel(double u, int n, int r, int m, double tau1);

}  // namespace aabsp::exposure
