#pragma once

#include <span>

namespace selinf {

/// Scaled complementary error function exp(x^2) * erfc(x).
double erfcx(double x);

/// log P(Z > z) for standard normal Z; finite for any finite z.
double log_normal_sf(double z);

/// log P(Z <= z) for standard normal Z.
double log_normal_cdf(double z);

/// Standard normal CDF.
double normal_cdf(double z);

/// Inverse standard normal CDF (Wichura's AS241), p in (0, 1).
double normal_quantile(double p);

/// log(1 - exp(t)) for t <= 0, stable near both ends.
double log1mexp(double t);

/// log(exp(a) + exp(b)); -inf inputs allowed.
double logaddexp(double a, double b);
double logsumexp(std::span<const double> v);

/// log P(alpha <= Z <= beta) for standard normal Z, alpha <= beta, endpoints
/// may be infinite. Stable in both tails and across the origin.
double gauss_interval_logmass(double alpha, double beta);

}  // namespace selinf
