#pragma once

#include <limits>
#include <vector>

namespace selinf {

struct Interval {
  double lo;
  double hi;
};

/// Ordered union of disjoint closed intervals on the real line (endpoints may
/// be infinite), plus the slack of the direction-orthogonal constraints
/// carried through for validation.
class TruncationRegion {
 public:
  TruncationRegion() = default;
  explicit TruncationRegion(
      std::vector<Interval> intervals,
      double v0_slack = std::numeric_limits<double>::infinity());

  static TruncationRegion whole_line();
  /// Marker for a sign pattern whose polyhedron misses the line through y.
  static TruncationRegion empty_region();

  bool empty() const { return intervals_.empty(); }
  const std::vector<Interval>& intervals() const { return intervals_; }
  double v0_slack() const { return v0_slack_; }
  double lower() const { return intervals_.front().lo; }
  double upper() const { return intervals_.back().hi; }

  bool contains(double x, double tol = 0.0) const;

 private:
  std::vector<Interval> intervals_;
  double v0_slack_ = std::numeric_limits<double>::infinity();
};

/// Merge intervals from several regions, dropping empties and joining
/// intervals that overlap or sit within merge_tol of one another. The result
/// carries the minimum v0 slack.
TruncationRegion merge_regions(const std::vector<TruncationRegion>& regions,
                               double merge_tol = 1e-12);

/// log P(Z in region) for Z ~ N(mu, sigma2); computed entirely in log space.
double region_log_mass(double mu, double sigma2, const TruncationRegion& region);

/// P(Z <= x | Z in region) for Z ~ N(mu, sigma2). x below the region maps to
/// 0, above to 1. Throws DegenerateRegionError if the region mass vanishes
/// even in log space.
double tn_cdf(double x, double mu, double sigma2, const TruncationRegion& region);

struct PivotPair {
  double left;       // P(Z <= x | region) under mu0
  double two_sided;  // 2 min(left, 1 - left)
};

PivotPair tn_pivot(double x, double mu0, double sigma2,
                   const TruncationRegion& region);

/// Equal-tailed (1 - alpha) bounds: L solves tn_cdf(x; L) = 1 - alpha/2 and
/// U solves tn_cdf(x; U) = alpha/2, by monotone bisection (the pivot is
/// strictly decreasing in mu). Initial bracket x +- 10 sd, doubled up to
/// x +- 640 sd; throws NumericalError with the achieved pivot range if the
/// target is still not bracketed.
std::pair<double, double> tn_interval_bounds(double x, double sigma2_eta,
                                             const TruncationRegion& region,
                                             double alpha);

}  // namespace selinf
