#pragma once

namespace tvspec::special {

/// ln B(a, b) = lnGamma(a) + lnGamma(b) - lnGamma(a + b).
double log_beta_function(double a, double b);

/// Beta(a, b) density at x in [0, 1]; 0 outside.
double beta_density(double x, double a, double b);

/// Regularized incomplete beta I_x(a, b), i.e. the Beta(a, b) CDF.
/// Continued fraction (modified Lentz) with the usual symmetry switch.
double regularized_incomplete_beta(double x, double a, double b);

/// P(lo < X <= hi) for X ~ Beta(a, b). Uses the upper-tail form when both
/// endpoints sit deep in the right tail so the difference does not cancel.
double beta_interval_mass(double a, double b, double lo, double hi);

}  // namespace tvspec::special
