#pragma once

namespace casefit {

// Regularized lower incomplete gamma P(a, x): series expansion for
// x < a + 1, continued fraction otherwise.
double lower_regularized_gamma(double a, double x);

// Regularized incomplete beta I_x(a, b) via the modified Lentz continued
// fraction with the usual symmetry switch.
double regularized_incomplete_beta(double a, double b, double x);

double chi2_pdf(int k, double x);
double chi2_cdf(int k, double x);
// Inverse of chi2_cdf in x; bracketed bisection followed by Newton polish.
double chi2_quantile(int k, double p);

double f_pdf(int d1, int d2, double x);
double f_cdf(int d1, int d2, double x);
double f_quantile(int d1, int d2, double p);

// Standard normal quantile (rational approximation, full double accuracy).
double inverse_normal_cdf(double p);

}  // namespace casefit
