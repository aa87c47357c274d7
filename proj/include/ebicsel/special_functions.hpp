#pragma once

namespace ebicsel::special {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse of the standard normal CDF for p in (0, 1).
double normal_quantile(double p);

/**
 * Natural log of the regularized upper incomplete gamma function
 * Q(a, x) = Γ(a, x) / Γ(a), for a > 0 and x >= 0.
 *
 * Works in log space so that deep tails (x in the thousands) do not
 * underflow. Uses the power series of P(a, x) below x = a + 1 and the
 * Lentz continued fraction for Γ(a, x) above it.
 */
double log_gamma_q(double a, double x);

/// Q(a, x) itself; underflows to 0 for extreme tails.
double gamma_q(double a, double x);

} // namespace ebicsel::special
