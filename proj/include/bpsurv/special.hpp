#pragma once

namespace bpsurv {

double log_binom(int n, int k);
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation with
// absolute tolerance 1e-12.
double reg_inc_beta(double x, double a, double b);

// Regularized upper incomplete gamma Q(a, x).
double reg_inc_gamma_q(double a, double x);

// Upper tail of the chi-squared distribution with df degrees of freedom.
double chisq_sf(double x, int df);

double norm_cdf(double z);
double norm_quantile(double prob);

}  // namespace bpsurv
