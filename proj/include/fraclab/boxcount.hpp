#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/ifs.hpp"

namespace fraclab {

struct CountEntry {
  int m = 0;                // mesh exponent, cell side 2^-m
  double delta = 0.0;       // 2^-m
  std::uint64_t count = 0;  // occupied half-open cells
};

struct CountCurve {
  std::vector<CountEntry> entries;  // ascending m
  Vec origin;                       // mesh anchor
  std::string source;
  bool truncated = false;  // a resource budget cut the curve short
};

// Number of distinct half-open cells prod_j [a_j, a_j + 2^-m) of the
// origin-anchored mesh containing at least one cloud point.  Cell indices are
// floor((x_j - origin_j) * 2^m); boundary points resolve by the floor
// convention, bit-exact.  Supports dimensions 1..3.  `threads` 0 means the
// runtime default; the result is identical for every thread count.
std::uint64_t count_boxes(const PointCloud& cloud, int m, const Vec& origin,
                          unsigned threads = 0);
std::uint64_t count_boxes(const PointCloud& cloud, int m, unsigned threads = 0);

// One entry per m on the SAME cloud; mesh-refinement monotonicity holds.
CountCurve count_curve(const PointCloud& cloud, int m_lo, int m_hi,
                       unsigned threads = 0);

// Per-scale regeneration: for each m the orbital set is re-enumerated at
// delta = 2^-m (resolution always matches the mesh) and cells are inserted
// on the fly; no cloud is materialised.  A budget hit truncates the curve
// and sets the flag.
CountCurve count_curve(const IfsSystem& sys, int m_lo, int m_hi,
                       const EnumBudget& budget = {});
CountCurve count_curve(const DiagAffineSystem& sys, int m_lo, int m_hi,
                       const EnumBudget& budget = {});

struct DimensionEstimate {
  double slope = 0.0;  // estimated box dimension
  double intercept = 0.0;
  int m_lo = 0;
  int m_hi = 0;
  double residual_max = 0.0;
};

// Least-squares slope of log2 N against m over entries with m in
// [m_lo, m_hi]; needs at least 3 entries in the window.
DimensionEstimate estimate_dimension(const CountCurve& curve, int m_lo, int m_hi);
// Default window drops the two coarsest and one finest entry when at least
// three entries remain; otherwise uses the whole curve.
DimensionEstimate estimate_dimension(const CountCurve& curve);

struct RateFit {
  double c_rate = 0.0;   // fitted constant of (log2N(m)/m - dim)*m
  double max_dev = 0.0;  // max deviation from the constant
};

// Model log2 N(m) = dim*m + O(1): the per-entry values log2N(m) - dim*m are
// fitted to a constant (their mean).  Needs at least 5 entries.
RateFit fit_rate(const CountCurve& curve, double dim_limit);

struct MinkowskiCheck {
  std::uint64_t count_x = 0;
  std::uint64_t count_y = 0;
  std::uint64_t count_sum = 0;  // N of {x + y}
  std::uint64_t bound = 0;      // 2^d * count_x * count_y
  bool ok = false;              // count_sum <= bound
};

// Counts X, Y, and the sumset X+Y at mesh 2^-m and checks
// N(X+Y) <= 2^d N(X) N(Y).
MinkowskiCheck minkowski_sum_check(const PointCloud& x, const PointCloud& y, int m,
                                   const Vec& origin);
MinkowskiCheck minkowski_sum_check(const PointCloud& x, const PointCloud& y, int m);

// Header m,delta,count,log2count; one row per scale.
std::string to_csv(const CountCurve& curve);
void write_csv(const CountCurve& curve, const std::string& path);

// 1024x1024 viewport mapped from the cloud bounding box; occupied cells of
// the 2^-m mesh drawn as rects (axes 0 and 1 for higher dimensions).  The
// first line inside the svg is a version comment.
std::string render_svg(const PointCloud& cloud, int m);
void write_svg(const PointCloud& cloud, int m, const std::string& path);

}  // namespace fraclab
