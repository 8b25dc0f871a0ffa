#pragma once

namespace dyadic {

/// log B(a, b).
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) by modified Lentz evaluation of the
/// continued fraction, switching to 1 - I_{1-x}(b, a) when x > (a+1)/(a+b+2).
double incomplete_beta(double a, double b, double x);

/// Beta(a, b) density.
double beta_density(double a, double b, double x);

/// Inverse of incomplete_beta in x: Newton steps kept inside a shrinking
/// bisection bracket, run until the step is at rounding level (error far
/// below 1e-12).
double beta_quantile(double a, double b, double z);

}  // namespace dyadic
