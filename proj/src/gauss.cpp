#include "selinf/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace selinf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kSqrtPi = 1.7724538509055160272981674833411452;
constexpr double kLogHalf = -0.6931471805599453094172321214581766;
}  // namespace

double erfcx(double x) {
  if (x < 0.0) {
    // erfcx(x) = 2 exp(x^2) - erfcx(-x); overflow to +inf is the right answer
    // once x < -26.6.
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x <= 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series 1/(x sqrt(pi)) * (1 - 1/(2x^2) + 3/(2x^2)^2 - ...);
  // truncation error is far below double precision for x > 25.
  const double ix2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 10; ++k) {
    term *= -(2.0 * k - 1.0) * ix2;
    sum += term;
  }
  return sum / (x * kSqrtPi);
}

double log_normal_sf(double z) {
  if (z == kInf) return -kInf;
  if (z == -kInf) return 0.0;
  if (z >= 0.0) {
    const double w = z * kInvSqrt2;
    return kLogHalf - w * w + std::log(erfcx(w));
  }
  // P(Z > z) = 1 - P(Z > -z) with P(Z > -z) <= 1/2.
  return std::log1p(-0.5 * std::erfc(-z * kInvSqrt2));
}

double log_normal_cdf(double z) { return log_normal_sf(-z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log1mexp(double t) {
  // Assumes t <= 0. Split at -ln2 per the usual log1mexp recipe.
  if (t >= 0.0) return t == 0.0 ? -kInf : std::numeric_limits<double>::quiet_NaN();
  if (t > -0.6931471805599453) return std::log(-std::expm1(t));
  return std::log1p(-std::exp(t));
}

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double logsumexp(std::span<const double> v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double gauss_interval_logmass(double alpha, double beta) {
  if (!(alpha <= beta)) return std::numeric_limits<double>::quiet_NaN();
  if (alpha == beta) return -kInf;
  if (alpha >= 0.0) {
    const double la = log_normal_sf(alpha);
    const double lb = log_normal_sf(beta);
    return la + log1mexp(lb - la);
  }
  if (beta <= 0.0) return gauss_interval_logmass(-beta, -alpha);
  // Interval straddles the origin: sum of two half masses, no cancellation.
  const double m = 0.5 * (std::erf(beta * kInvSqrt2) + std::erf(-alpha * kInvSqrt2));
  return std::log(m);
}

double normal_quantile(double p) {
  // Wichura's algorithm AS241, PPND16: double-precision rational
  // approximations on three regimes of |p - 1/2|.
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw std::domain_error("normal_quantile: p outside [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

}  // namespace selinf
