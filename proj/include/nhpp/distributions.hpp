#pragma once

namespace nhpp {

/// Largest sample size for which the Kolmogorov-Smirnov null cdf is
/// evaluated exactly; beyond it the Stephens-corrected asymptotic tail
/// takes over.
inline constexpr int ks_exact_max_n = 140;

/// P(D_n < d) under the null, for the one-sample KS statistic with sample
/// size n. Exact (Durbin matrix power) for n <= ks_exact_max_n, asymptotic
/// Kolmogorov cdf at d*(sqrt(n) + 0.12 + 0.11/sqrt(n)) otherwise.
double ks_cdf(int n, double d);

/// Upper-alpha critical value T(n, alpha): smallest d with P(D_n < d) >= 1 - alpha.
double ks_critical(int n, double alpha);

/// P(D_n > d) under the null, same exact/asymptotic regime as ks_cdf.
double ks_p_value(int n, double d);

/// Limiting Kolmogorov cdf P(K <= x) = 1 - 2 sum_j (-1)^{j-1} exp(-2 j^2 x^2).
double kolmogorov_cdf(double x);

/// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Upper-alpha quantile of chi-squared with `dof` degrees of freedom,
/// located by bisection on P(dof/2, x/2).
double chi2_quantile(int dof, double alpha);

/// P(X > x) for X ~ chi-squared with `dof` degrees of freedom.
double chi2_p_value(int dof, double x);

}  // namespace nhpp
