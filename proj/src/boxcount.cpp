#include "fraclab/boxcount.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "fraclab/detail/flat_set.hpp"
#include "fraclab/detail/orbital_enum.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/runtime.hpp"
#include "fraclab/version.hpp"

namespace fraclab {

namespace {

constexpr std::uint64_t kField = (1ULL << 30) - 1;

// Mesh index packed into a 30-bit field with a half-range offset; indices
// must stay within +-2^29.
inline std::uint64_t cell_field(double coord, double origin, double scale) {
  double q = std::floor((coord - origin) * scale);
  if (!(q >= -536870912.0 && q < 536870912.0))
    throw DomainError("count_boxes: mesh index outside packable range");
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(q) +
                                    (std::int64_t{1} << 29)) &
         kField;
}

inline void cell_keys(const double* p, std::size_t d, const double* origin,
                      double scale, std::uint64_t& lo, std::uint64_t& hi) {
  lo = cell_field(p[0], origin[0], scale);
  hi = 0;
  if (d >= 2) lo |= cell_field(p[1], origin[1], scale) << 30;
  if (d == 3) hi = cell_field(p[2], origin[2], scale);
}

// Occupied-cell accumulator for one mesh.  Remembers the most recent key so
// runs of samples falling into the same cell skip the hash probe.
class CellSet {
 public:
  CellSet(std::size_t d, Vec origin, int m)
      : d_(d), origin_(std::move(origin)), scale_(std::exp2(m)) {
    if (d_ < 1 || d_ > 3) throw DomainError("count_boxes: supports dimensions 1..3");
    if (origin_.size() != d_) throw DomainError("count_boxes: origin dimension mismatch");
  }

  void insert(const double* p) {
    std::uint64_t lo, hi;
    cell_keys(p, d_, origin_.data(), scale_, lo, hi);
    if (have_last_ && lo == last_lo_ && hi == last_hi_) return;
    last_lo_ = lo;
    last_hi_ = hi;
    have_last_ = true;
    if (d_ <= 2)
      set64_.insert(lo);
    else
      set128_.insert(lo, hi);
  }

  // Inserts every cell an axis-aligned segment covers, one insert per cell
  // instead of a sampled walk.  Returns false when the segment varies in
  // more than one coordinate; the caller falls back to sampling.
  bool insert_axis_segment(const double* a, const double* b) {
    std::size_t axis = d_;
    for (std::size_t j = 0; j < d_; ++j) {
      if (a[j] != b[j]) {
        if (axis != d_) return false;
        axis = j;
      }
    }
    if (axis == d_) {
      insert(a);
      return true;
    }
    const double vlo = std::min(a[axis], b[axis]);
    const double vhi = std::max(a[axis], b[axis]);
    const std::uint64_t f0 = cell_field(vlo, origin_[axis], scale_);
    const std::uint64_t f1 = cell_field(vhi, origin_[axis], scale_);
    std::uint64_t lo, hi;
    cell_keys(a, d_, origin_.data(), scale_, lo, hi);
    if (axis < 2) {
      const int shift = axis == 0 ? 0 : 30;
      const std::uint64_t base = lo & ~(kField << shift);
      if (d_ <= 2)
        for (std::uint64_t f = f0; f <= f1; ++f) set64_.insert(base | (f << shift));
      else
        for (std::uint64_t f = f0; f <= f1; ++f) set128_.insert(base | (f << shift), hi);
    } else {
      for (std::uint64_t f = f0; f <= f1; ++f) set128_.insert(lo, f);
    }
    return true;
  }

  std::uint64_t size() const { return d_ <= 2 ? set64_.size() : set128_.size(); }

 private:
  std::size_t d_;
  Vec origin_;
  double scale_;
  detail::FlatSet64 set64_;
  detail::FlatSet128 set128_;
  std::uint64_t last_lo_ = 0, last_hi_ = 0;
  bool have_last_ = false;
};

Vec zero_origin(std::size_t d) { return Vec(d, 0.0); }

}  // namespace

std::uint64_t count_boxes(const PointCloud& cloud, int m, const Vec& origin,
                          unsigned threads) {
  if (cloud.size() == 0) throw DomainError("count_boxes: empty cloud");
  const std::size_t d = cloud.dim();
  if (d < 1 || d > 3) throw DomainError("count_boxes: supports dimensions 1..3");
  if (origin.size() != d) throw DomainError("count_boxes: origin dimension mismatch");
  const double scale = std::exp2(m);
  const std::size_t n = cloud.size();

  unsigned t = thread_budget(threads);
  if (t > n / 65536 + 1) t = static_cast<unsigned>(n / 65536 + 1);

  if (t <= 1) {
    CellSet cells(d, origin, m);
    for (std::size_t i = 0; i < n; ++i) cells.insert(cloud.pt(i));
    return cells.size();
  }

  // Shard the points; each worker collects local keys, then the union is
  // taken on one thread.  The union is order-independent, so the count does
  // not depend on the shard layout.
  std::vector<detail::FlatSet128> local(t);
  std::vector<std::exception_ptr> errs(t);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        std::size_t lob = n * w / t, hib = n * (w + 1) / t;
        for (std::size_t i = lob; i < hib; ++i) {
          std::uint64_t lo, hi;
          cell_keys(cloud.pt(i), d, origin.data(), scale, lo, hi);
          local[w].insert(lo, hi);
        }
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  detail::FlatSet128 all(local[0].size() * 2 + 64);
  for (auto& l : local)
    l.for_each([&](std::uint64_t lo, std::uint64_t hi) { all.insert(lo, hi); });
  return all.size();
}

std::uint64_t count_boxes(const PointCloud& cloud, int m, unsigned threads) {
  return count_boxes(cloud, m, zero_origin(cloud.dim()), threads);
}

CountCurve count_curve(const PointCloud& cloud, int m_lo, int m_hi, unsigned threads) {
  if (m_lo > m_hi) throw DomainError("count_curve: empty mesh range");
  CountCurve curve;
  curve.origin = zero_origin(cloud.dim());
  curve.source = "cloud:" + cloud.source;
  for (int m = m_lo; m <= m_hi; ++m)
    curve.entries.push_back({m, std::exp2(-m), count_boxes(cloud, m, threads)});
  return curve;
}

CountCurve count_curve(const IfsSystem& sys, int m_lo, int m_hi,
                       const EnumBudget& budget) {
  if (m_lo > m_hi) throw DomainError("count_curve: empty mesh range");
  if (!sys.condensation()) throw DomainError("count_curve: system has no condensation set");
  CountCurve curve;
  curve.origin = zero_origin(sys.dim());
  curve.source = "system:" + (sys.name().empty() ? std::string("custom") : sys.name());

  std::vector<Vec> fixed;
  for (const Similarity& map : sys.maps()) fixed.push_back(map.fixed_point());

  for (int m = m_lo; m <= m_hi; ++m) {
    const double delta = std::exp2(-m);
    try {
      detail::OrbitalParams p = detail::make_orbital_params(sys, delta, budget);
      CellSet cells(sys.dim(), curve.origin, m);
      auto sink = [&](const double* pt) {
        cells.insert(pt);
        return true;
      };
      auto seg_sink = [&](const double* a, const double* b) {
        return cells.insert_axis_segment(a, b) ? detail::SegHandled::handled
                                               : detail::SegHandled::sample;
      };
      bool complete = detail::enumerate_orbital(sys, *sys.condensation(), p, sink, seg_sink);
      if (complete) complete = detail::enumerate_orbital_points(sys, fixed, p, sink);
      if (!complete) {
        curve.truncated = true;
        break;
      }
      curve.entries.push_back({m, delta, cells.size()});
    } catch (const ResourceError&) {
      curve.truncated = true;
      break;
    }
  }
  return curve;
}

CountCurve count_curve(const DiagAffineSystem& sys, int m_lo, int m_hi,
                       const EnumBudget& budget) {
  if (m_lo > m_hi) throw DomainError("count_curve: empty mesh range");
  CountCurve curve;
  curve.origin = zero_origin(sys.dim());
  curve.source = "affine:" + sys.name();
  for (int m = m_lo; m <= m_hi; ++m) {
    const double delta = std::exp2(-m);
    try {
      PointCloud cloud = attractor_cloud(sys, delta, budget);
      if (cloud.truncated) {
        curve.truncated = true;
        break;
      }
      curve.entries.push_back({m, delta, count_boxes(cloud, m, curve.origin, 1)});
    } catch (const ResourceError&) {
      curve.truncated = true;
      break;
    }
  }
  return curve;
}

DimensionEstimate estimate_dimension(const CountCurve& curve, int m_lo, int m_hi) {
  std::vector<double> xs, ys;
  for (const CountEntry& e : curve.entries) {
    if (e.m < m_lo || e.m > m_hi) continue;
    if (e.count == 0) throw DomainError("estimate_dimension: zero count");
    xs.push_back(static_cast<double>(e.m));
    ys.push_back(std::log2(static_cast<double>(e.count)));
  }
  if (xs.size() < 3)
    throw DomainError("estimate_dimension: window needs at least 3 entries");
  const std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  DimensionEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  est.m_lo = m_lo;
  est.m_hi = m_hi;
  for (std::size_t i = 0; i < n; ++i)
    est.residual_max =
        std::max(est.residual_max, std::abs(ys[i] - (est.intercept + est.slope * xs[i])));
  return est;
}

DimensionEstimate estimate_dimension(const CountCurve& curve) {
  const std::size_t n = curve.entries.size();
  if (n >= 6)
    return estimate_dimension(curve, curve.entries[2].m, curve.entries[n - 2].m);
  if (n == 0) throw DomainError("estimate_dimension: empty curve");
  return estimate_dimension(curve, curve.entries.front().m, curve.entries.back().m);
}

RateFit fit_rate(const CountCurve& curve, double dim_limit) {
  if (curve.entries.size() < 5) throw DomainError("fit_rate: needs at least 5 entries");
  std::vector<double> vals;
  for (const CountEntry& e : curve.entries)
    vals.push_back(std::log2(static_cast<double>(e.count)) -
                   dim_limit * static_cast<double>(e.m));
  RateFit fit;
  for (double v : vals) fit.c_rate += v;
  fit.c_rate /= static_cast<double>(vals.size());
  for (double v : vals) fit.max_dev = std::max(fit.max_dev, std::abs(v - fit.c_rate));
  return fit;
}

MinkowskiCheck minkowski_sum_check(const PointCloud& x, const PointCloud& y, int m,
                                   const Vec& origin) {
  if (x.dim() != y.dim()) throw DomainError("minkowski_sum_check: dimension mismatch");
  if (x.size() == 0 || y.size() == 0) throw DomainError("minkowski_sum_check: empty cloud");
  const std::size_t d = x.dim();
  if (x.size() * y.size() > 200'000'000ULL)
    throw ResourceError("minkowski_sum_check: pair count too large");

  MinkowskiCheck chk;
  chk.count_x = count_boxes(x, m, origin, 1);
  chk.count_y = count_boxes(y, m, origin, 1);

  CellSet cells(d, origin, m);
  double p[3];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double* a = x.pt(i);
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double* b = y.pt(j);
      for (std::size_t k = 0; k < d; ++k) p[k] = a[k] + b[k];
      cells.insert(p);
    }
  }
  chk.count_sum = cells.size();
  unsigned __int128 bound =
      (static_cast<unsigned __int128>(1) << d) * chk.count_x * chk.count_y;
  chk.bound = bound > ~0ULL ? ~0ULL : static_cast<std::uint64_t>(bound);
  chk.ok = static_cast<unsigned __int128>(chk.count_sum) <= bound;
  return chk;
}

MinkowskiCheck minkowski_sum_check(const PointCloud& x, const PointCloud& y, int m) {
  return minkowski_sum_check(x, y, m, zero_origin(x.dim()));
}

std::string to_csv(const CountCurve& curve) {
  std::string out = "m,delta,count,log2count\n";
  char buf[128];
  for (const CountEntry& e : curve.entries) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%llu,%.6f\n", e.m, e.delta,
                  static_cast<unsigned long long>(e.count),
                  std::log2(static_cast<double>(e.count)));
    out += buf;
  }
  return out;
}

void write_csv(const CountCurve& curve, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("write_csv: cannot open " + path);
  f << to_csv(curve);
}

std::string render_svg(const PointCloud& cloud, int m) {
  if (cloud.size() == 0) throw DomainError("render_svg: empty cloud");
  const std::size_t d = cloud.dim();
  const double delta = std::exp2(-m);

  double minx = cloud.pt(0)[0], maxx = minx;
  double miny = d >= 2 ? cloud.pt(0)[1] : 0.0, maxy = miny;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* p = cloud.pt(i);
    minx = std::min(minx, p[0]);
    maxx = std::max(maxx, p[0]);
    if (d >= 2) {
      miny = std::min(miny, p[1]);
      maxy = std::max(maxy, p[1]);
    }
  }

  // Occupied projected cells, mesh anchored at the bounding-box corner.
  const double scale = std::exp2(m);
  detail::FlatSet64 seen;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* p = cloud.pt(i);
    std::uint64_t k = cell_field(p[0], minx, scale);
    if (d >= 2) k |= cell_field(p[1], miny, scale) << 30;
    seen.insert(k);
  }
  if (seen.size() > 2'000'000)
    throw ResourceError("render_svg: too many cells; use a coarser mesh");

  std::vector<std::uint64_t> keys;
  keys.reserve(seen.size());
  seen.for_each([&](std::uint64_t k) { keys.push_back(k); });
  std::sort(keys.begin(), keys.end());

  const double span = std::max({maxx - minx, maxy - miny, delta});
  const double px = 1024.0 / span;     // pixels per unit
  const double cell_px = delta * px;   // pixels per mesh cell

  std::string out;
  out.reserve(keys.size() * 64 + 512);
  out +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1024\" height=\"1024\" "
      "viewBox=\"0 0 1024 1024\">\n";
  out += "<!-- fraclab ";
  out += kVersion;
  out += " -->\n<rect width=\"1024\" height=\"1024\" fill=\"#ffffff\"/>\n";
  char buf[160];
  const std::int64_t off = std::int64_t{1} << 29;
  for (std::uint64_t k : keys) {
    std::int64_t ix = static_cast<std::int64_t>(k & kField) - off;
    std::int64_t iy = d >= 2 ? static_cast<std::int64_t>((k >> 30) & kField) - off : 0;
    double xpx = static_cast<double>(ix) * cell_px;
    double ypx = 1024.0 - (static_cast<double>(iy) + 1.0) * cell_px;
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                  "fill=\"#204e79\"/>\n",
                  xpx, ypx, cell_px, cell_px);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const PointCloud& cloud, int m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("write_svg: cannot open " + path);
  f << render_svg(cloud, m);
}

}  // namespace fraclab
