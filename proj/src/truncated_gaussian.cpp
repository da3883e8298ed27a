#include "selinf/truncated_gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "selinf/errors.hpp"
#include "selinf/gauss.hpp"

namespace selinf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TruncationRegion::TruncationRegion(std::vector<Interval> intervals,
                                   double v0_slack)
    : intervals_(std::move(intervals)), v0_slack_(v0_slack) {
  for (const Interval& iv : intervals_) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi))
      throw ValidationError("truncation interval endpoint is NaN");
    if (!(iv.lo < iv.hi))
      throw ValidationError("truncation interval is empty or inverted");
  }
  for (std::size_t k = 1; k < intervals_.size(); ++k) {
    if (!(intervals_[k - 1].hi < intervals_[k].lo))
      throw ValidationError("truncation intervals overlap or are unsorted");
  }
}

TruncationRegion TruncationRegion::whole_line() {
  return TruncationRegion({{-kInf, kInf}});
}

TruncationRegion TruncationRegion::empty_region() { return TruncationRegion(); }

bool TruncationRegion::contains(double x, double tol) const {
  for (const Interval& iv : intervals_)
    if (x >= iv.lo - tol && x <= iv.hi + tol) return true;
  return false;
}

TruncationRegion merge_regions(const std::vector<TruncationRegion>& regions,
                               double merge_tol) {
  std::vector<Interval> all;
  double v0 = kInf;
  for (const TruncationRegion& r : regions) {
    if (r.empty()) continue;
    v0 = std::min(v0, r.v0_slack());
    all.insert(all.end(), r.intervals().begin(), r.intervals().end());
  }
  if (all.empty()) return TruncationRegion::empty_region();
  std::sort(all.begin(), all.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  merged.push_back(all.front());
  for (std::size_t k = 1; k < all.size(); ++k) {
    Interval& last = merged.back();
    if (all[k].lo <= last.hi + merge_tol) {
      last.hi = std::max(last.hi, all[k].hi);
    } else {
      merged.push_back(all[k]);
    }
  }
  return TruncationRegion(std::move(merged), v0);
}

namespace {

struct SplitMass {
  double log_below;  // log mass of region intersected with (-inf, x]
  double log_above;  // log mass of region intersected with [x, inf)
};

SplitMass split_log_mass(double x, double mu, double sigma,
                         const TruncationRegion& region) {
  std::vector<double> below, above;
  for (const Interval& iv : region.intervals()) {
    const double alpha = (iv.lo - mu) / sigma;
    const double beta = (iv.hi - mu) / sigma;
    if (iv.hi <= x) {
      below.push_back(gauss_interval_logmass(alpha, beta));
    } else if (iv.lo >= x) {
      above.push_back(gauss_interval_logmass(alpha, beta));
    } else {
      const double xi = (x - mu) / sigma;
      below.push_back(gauss_interval_logmass(alpha, xi));
      above.push_back(gauss_interval_logmass(xi, beta));
    }
  }
  return {logsumexp(below), logsumexp(above)};
}

void check_inputs(double x, double sigma2, const TruncationRegion& region) {
  if (region.empty())
    throw DegenerateRegionError("truncation region is empty");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw ValidationError("sigma2 must be positive and finite");
  if (std::isnan(x)) throw ValidationError("x is NaN");
}

}  // namespace

double region_log_mass(double mu, double sigma2,
                       const TruncationRegion& region) {
  check_inputs(0.0, sigma2, region);
  const double sigma = std::sqrt(sigma2);
  std::vector<double> parts;
  parts.reserve(region.intervals().size());
  for (const Interval& iv : region.intervals())
    parts.push_back(
        gauss_interval_logmass((iv.lo - mu) / sigma, (iv.hi - mu) / sigma));
  return logsumexp(parts);
}

double tn_cdf(double x, double mu, double sigma2,
              const TruncationRegion& region) {
  check_inputs(x, sigma2, region);
  if (!std::isfinite(x)) return x > 0 ? 1.0 : 0.0;
  if (x <= region.lower()) return 0.0;
  if (x >= region.upper()) return 1.0;
  const double sigma = std::sqrt(sigma2);
  const SplitMass m = split_log_mass(x, mu, sigma, region);
  if (std::isnan(m.log_below) || std::isnan(m.log_above) ||
      (m.log_below == -kInf && m.log_above == -kInf))
    throw DegenerateRegionError("truncation region mass is numerically zero");
  if (m.log_below == -kInf) return 0.0;
  if (m.log_above == -kInf) return 1.0;
  // F = B / (B + A) evaluated from logs; exact complement of the A side.
  const double total = logaddexp(m.log_below, m.log_above);
  return std::exp(m.log_below - total);
}

PivotPair tn_pivot(double x, double mu0, double sigma2,
                   const TruncationRegion& region) {
  const double left = tn_cdf(x, mu0, sigma2, region);
  return {left, 2.0 * std::min(left, 1.0 - left)};
}

namespace {

/// Solve tn_cdf(x; mu) = target for mu; the pivot is strictly decreasing in
/// mu (monotone likelihood ratio of the truncated family).
double solve_pivot(double x, double sigma2, const TruncationRegion& region,
                   double target) {
  const double sigma = std::sqrt(sigma2);
  auto pivot = [&](double mu) { return tn_cdf(x, mu, sigma2, region); };

  double width = 10.0 * sigma;
  const double max_width = 640.0 * sigma;
  double lo = x - width;  // pivot(lo) should be >= target
  while (pivot(lo) < target) {
    width *= 2.0;
    if (width > max_width)
      throw NumericalError(
          "interval bound not bracketed: pivot at mu = x - 640 sd is " +
          std::to_string(pivot(x - max_width)) + ", target " +
          std::to_string(target));
    lo = x - width;
  }
  width = 10.0 * sigma;
  double hi = x + width;  // pivot(hi) should be <= target
  while (pivot(hi) > target) {
    width *= 2.0;
    if (width > max_width)
      throw NumericalError(
          "interval bound not bracketed: pivot at mu = x + 640 sd is " +
          std::to_string(pivot(x + max_width)) + ", target " +
          std::to_string(target));
    hi = x + width;
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = pivot(mid);
    if (std::abs(f - target) <= 1e-8) return mid;
    if (f > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double achieved = pivot(mid);
  if (std::abs(achieved - target) <= 1e-8) return mid;
  throw NumericalError("pivot inversion stalled at residual " +
                       std::to_string(std::abs(achieved - target)));
}

}  // namespace

std::pair<double, double> tn_interval_bounds(double x, double sigma2_eta,
                                             const TruncationRegion& region,
                                             double alpha) {
  check_inputs(x, sigma2_eta, region);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)");
  if (!region.contains(x))
    throw ValidationError("x must lie inside the truncation region");
  const double L = solve_pivot(x, sigma2_eta, region, 1.0 - alpha / 2.0);
  const double U = solve_pivot(x, sigma2_eta, region, alpha / 2.0);
  if (!(L < U))
    throw NumericalError("interval bounds out of order (L = " +
                         std::to_string(L) + ", U = " + std::to_string(U) + ")");
  return {L, U};
}

}  // namespace selinf
