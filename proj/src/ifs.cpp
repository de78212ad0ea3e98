#include "fraclab/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "fraclab/algebraic.hpp"
#include "fraclab/detail/orbital_enum.hpp"
#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

// Gaussian elimination with partial pivoting; dimensions here are tiny.
Vec solve_linear(Mat a, Vec b) {
  const std::size_t d = a.dim();
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (std::abs(a(p, c)) < 1e-300) throw DomainError("solve_linear: singular system");
    if (p != c) {
      for (std::size_t j = 0; j < d; ++j) std::swap(a(p, j), a(c, j));
      std::swap(b[p], b[c]);
    }
    for (std::size_t r = c + 1; r < d; ++r) {
      double f = a(r, c) / a(c, c);
      b[r] -= f * b[c];
      for (std::size_t j = c; j < d; ++j) a(r, j) -= f * a(c, j);
    }
  }
  Vec x(d, 0.0);
  for (std::size_t c = d; c-- > 0;) {
    double acc = b[c];
    for (std::size_t j = c + 1; j < d; ++j) acc -= a(c, j) * x[j];
    x[c] = acc / a(c, c);
  }
  return x;
}

}  // namespace

std::string word_to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (std::uint8_t l : w) {
    if (l < 10)
      s.push_back(static_cast<char>('0' + l));
    else
      s.push_back(static_cast<char>('a' + (l - 10)));
  }
  return s.empty() ? "-" : s;
}

Vec Similarity::fixed_point() const {
  const std::size_t d = dim();
  if (scale >= 1.0) throw DomainError("fixed_point: map is not a strict contraction");
  Mat a(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - scale * rot(i, j);
  return solve_linear(a, trans);
}

Similarity compose(const Similarity& a, const Similarity& b) {
  if (a.dim() != b.dim()) throw DomainError("compose: dimension mismatch");
  Similarity r;
  r.scale = a.scale * b.scale;
  r.rot = a.rot * b.rot;
  r.trans = a.scale * a.rot.apply(b.trans) + a.trans;
  return r;
}

Similarity compose(const IfsSystem& sys, const Word& w) {
  Similarity acc = Similarity::identity(sys.dim());
  for (std::uint8_t letter : w) {
    if (letter >= sys.maps().size()) throw DomainError("compose: letter out of range");
    acc = compose(acc, sys.maps()[letter]);
  }
  return acc;
}

CondensationSet CondensationSet::point(Vec p) {
  return CondensationSet{Kind::point, {std::move(p)}};
}

CondensationSet CondensationSet::segment(Vec a, Vec b) {
  return CondensationSet{Kind::segment, {std::move(a), std::move(b)}};
}

CondensationSet CondensationSet::polyline(std::vector<Vec> pts) {
  if (pts.empty()) throw DomainError("polyline: needs at least one point");
  return CondensationSet{Kind::polyline, std::move(pts)};
}

CondensationSet CondensationSet::point_cloud(std::vector<Vec> pts) {
  if (pts.empty()) throw DomainError("point_cloud: needs at least one point");
  return CondensationSet{Kind::point_cloud, std::move(pts)};
}

std::vector<Vec> CondensationSet::discretize(double spacing) const {
  if (!(spacing > 0.0)) throw DomainError("discretize: spacing must be positive");
  switch (kind) {
    case Kind::point:
    case Kind::point_cloud:
      return pts;
    case Kind::segment:
    case Kind::polyline: {
      std::vector<Vec> out;
      out.push_back(pts.front());
      for (std::size_t e = 0; e + 1 < pts.size(); ++e) {
        const Vec& a = pts[e];
        const Vec& b = pts[e + 1];
        double len = norm2(b - a);
        int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int s = 1; s <= steps; ++s) {
          double t = static_cast<double>(s) / steps;
          Vec p(a.size());
          for (std::size_t j = 0; j < a.size(); ++j) p[j] = a[j] + t * (b[j] - a[j]);
          out.push_back(std::move(p));
        }
      }
      return out;
    }
  }
  return pts;
}

double CondensationSet::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, norm2(pts[i] - pts[j]));
  return best;
}

IfsSystem::IfsSystem(std::vector<Similarity> maps, std::optional<CondensationSet> condensation,
                     std::string name)
    : maps_(std::move(maps)), condensation_(std::move(condensation)), name_(std::move(name)) {
  if (maps_.empty()) throw DomainError("IfsSystem: needs at least one map");
  dim_ = maps_[0].dim();
  if (dim_ == 0) throw DomainError("IfsSystem: dimension must be positive");
  max_scale_ = 0.0;
  for (const Similarity& m : maps_) {
    if (m.dim() != dim_ || m.rot.dim() != dim_)
      throw DomainError("IfsSystem: map dimension mismatch");
    if (!(m.scale > 0.0 && m.scale < 1.0))
      throw DomainError("IfsSystem: map scales must lie in (0,1)");
    if (orthogonality_defect(m.rot) > 1e-12)
      throw DomainError("IfsSystem: rotation block is not orthogonal");
    max_scale_ = std::max(max_scale_, m.scale);
  }
  if (condensation_) {
    if (condensation_->pts.empty())
      throw DomainError("IfsSystem: condensation set has no points");
    for (const Vec& p : condensation_->pts)
      if (p.size() != dim_) throw DomainError("IfsSystem: condensation dimension mismatch");
  }

  // Invariant ball: centered at the mean of the fixed points, radius chosen
  // so S_i(B) stays inside B and the condensation set is contained.
  Vec z(dim_, 0.0);
  for (const Similarity& m : maps_) z = z + m.fixed_point();
  for (double& v : z) v /= static_cast<double>(maps_.size());
  double radius = 0.0;
  for (const Similarity& m : maps_) {
    double drift = norm2(m.apply(z) - z);
    radius = std::max(radius, drift / (1.0 - m.scale));
  }
  if (condensation_)
    for (const Vec& p : condensation_->pts) radius = std::max(radius, norm2(p - z));
  bound_center_ = std::move(z);
  bound_radius_ = std::max(radius, 1e-12);
}

namespace {

void words_dfs_stopping(const IfsSystem& sys, double r, Word& w, double scale,
                        std::vector<Word>& out, std::uint64_t& visited,
                        const EnumBudget& budget) {
  for (std::uint8_t i = 0; i < sys.maps().size(); ++i) {
    if (++visited > budget.max_words)
      throw ResourceError("stopping_set: word budget exhausted");
    double s = scale * sys.maps()[i].scale;
    w.push_back(i);
    if (s <= r)
      out.push_back(w);
    else
      words_dfs_stopping(sys, r, w, s, out, visited, budget);
    w.pop_back();
  }
}

void words_dfs_level(const IfsSystem& sys, double lo, double hi, Word& w, double scale,
                     std::vector<Word>& out, std::uint64_t& visited,
                     const EnumBudget& budget) {
  for (std::uint8_t i = 0; i < sys.maps().size(); ++i) {
    if (++visited > budget.max_words)
      throw ResourceError("level_set: word budget exhausted");
    double s = scale * sys.maps()[i].scale;
    w.push_back(i);
    if (s > lo && s <= hi) out.push_back(w);
    if (s > lo) words_dfs_level(sys, lo, hi, w, s, out, visited, budget);
    w.pop_back();
  }
}

}  // namespace

std::vector<Word> stopping_set(const IfsSystem& sys, double r, const EnumBudget& budget) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("stopping_set: r must lie in (0,1)");
  std::vector<Word> out;
  Word w;
  std::uint64_t visited = 0;
  words_dfs_stopping(sys, r, w, 1.0, out, visited, budget);
  return out;
}

std::vector<Word> level_set(const IfsSystem& sys, int k, const EnumBudget& budget) {
  if (k < 0) throw DomainError("level_set: k must be nonnegative");
  // Accumulated products sit exactly on the dyadic edges for algebraic ratios
  // like 2^{-1/2}; nudge both edges so roundoff cannot flip membership.
  double hi = std::ldexp(1.0, -k) * (1.0 + 1e-12);
  double lo = std::ldexp(1.0, -k - 1) * (1.0 + 1e-12);
  std::vector<Word> out;
  Word w;
  std::uint64_t visited = 0;
  words_dfs_level(sys, lo, hi, w, 1.0, out, visited, budget);
  return out;
}

namespace {

// Shared emission sink: deduplicates on the delta/4 grid and appends to the
// cloud, honouring the point budget.
struct CloudSink {
  PointCloud* cloud;
  detail::FlatSet128 seen;
  double qinv;
  Vec offset;  // center - 2R, subtracted before quantising
  std::uint64_t max_points;
  bool allow_partial;
  bool hit_budget = false;

  CloudSink(PointCloud* c, const IfsSystem& sys, double grid, const EnumBudget& b)
      : cloud(c), seen(1 << 12), qinv(1.0 / grid), offset(sys.dim()),
        max_points(b.max_cloud_points), allow_partial(b.allow_partial) {
    for (std::size_t j = 0; j < sys.dim(); ++j)
      offset[j] = sys.bound_center()[j] - 2.0 * sys.bound_radius();
  }

  bool operator()(const double* pt) {
    std::uint64_t lo = 0, hi = 0;
    const std::size_t d = offset.size();
    for (std::size_t j = 0; j < d && j < 3; ++j) {
      double qv = (pt[j] - offset[j]) * qinv;
      std::int64_t iv = qv > -2.0e8 && qv < 5.0e8 ? std::llround(qv) : 0;
      std::uint64_t f =
          static_cast<std::uint64_t>(iv + (std::int64_t{1} << 29)) & ((1ULL << 30) - 1);
      if (j < 2)
        lo |= f << (j * 30);
      else
        hi |= f;
    }
    for (std::size_t j = 3; j < d; ++j)
      hi ^= detail::mix64(static_cast<std::uint64_t>(std::llround((pt[j] - offset[j]) * qinv)))
            << 30;
    if (!seen.insert(lo, hi)) return true;
    if (cloud->size() >= max_points) {
      cloud->truncated = true;
      hit_budget = true;
      if (!allow_partial) throw ResourceError("orbital_cloud: point budget exhausted");
      return false;
    }
    cloud->push(pt);
    return true;
  }
};

}  // namespace

PointCloud orbital_cloud(const IfsSystem& sys, double delta, const EnumBudget& budget) {
  if (!sys.condensation()) throw DomainError("orbital_cloud: system has no condensation set");
  detail::OrbitalParams p = detail::make_orbital_params(sys, delta, budget);

  PointCloud cloud(sys.dim());
  cloud.delta = delta;
  cloud.source = "orbital:" + (sys.name().empty() ? std::string("system") : sys.name());

  CloudSink sink(&cloud, sys, p.spacing, budget);
  bool complete = detail::enumerate_orbital(sys, *sys.condensation(), p, sink);

  if (complete && !sink.hit_budget) {
    // Attractor part: the same enumeration seeded at the map fixed points
    // nets F_0 at the same resolution.
    std::vector<Vec> fixed;
    for (const Similarity& m : sys.maps()) fixed.push_back(m.fixed_point());
    complete = detail::enumerate_orbital_points(sys, fixed, p, sink);
  }
  if (!complete) cloud.truncated = true;
  return cloud;
}

namespace {

// Image of the condensation set under one map, sampled at `spacing` in the
// image (edges walked adaptively).  f(pt) returning false aborts.
template <class F>
bool emit_condensation_image(const Similarity& map, const CondensationSet& cond,
                             double spacing, F&& f) {
  const std::size_t d = map.dim();
  const bool pointlike = cond.kind == CondensationSet::Kind::point ||
                         cond.kind == CondensationSet::Kind::point_cloud;
  if (pointlike) {
    for (const Vec& x : cond.pts) {
      Vec y = map.apply(x);
      if (!f(y.data())) return false;
    }
    return true;
  }
  Vec y(d), dv(d);
  for (std::size_t e = 0; e + 1 < cond.pts.size(); ++e) {
    y = map.apply(cond.pts[e]);
    Vec yb = map.apply(cond.pts[e + 1]);
    double len = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dv[j] = yb[j] - y[j];
      len += dv[j] * dv[j];
    }
    len = std::sqrt(len);
    if (len / spacing > 1.0e9)
      throw ResourceError("level_slice: condensation sampling too fine");
    const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (std::size_t j = 0; j < d; ++j) dv[j] /= steps;
    if (!f(y.data())) return false;
    for (int q = 1; q <= steps; ++q) {
      for (std::size_t j = 0; j < d; ++j) y[j] += dv[j];
      if (!f(y.data())) return false;
    }
  }
  return true;
}

}  // namespace

PointCloud level_slice(const IfsSystem& sys, int k, double delta, const EnumBudget& budget) {
  if (!sys.condensation()) throw DomainError("level_slice: system has no condensation set");
  if (!(delta > 0.0)) throw DomainError("level_slice: delta must be positive");
  std::vector<Word> words = level_set(sys, k, budget);

  PointCloud cloud(sys.dim());
  cloud.delta = delta;
  cloud.source = "level_slice";
  CloudSink sink(&cloud, sys, delta / 4.0, budget);
  for (const Word& w : words) {
    Similarity map = compose(sys, w);
    if (!emit_condensation_image(map, *sys.condensation(), delta / 4.0, sink)) return cloud;
  }
  return cloud;
}

DiagAffineSystem::DiagAffineSystem(std::vector<DiagAffineMap> maps, std::string name)
    : maps_(std::move(maps)), name_(std::move(name)) {
  if (maps_.empty()) throw DomainError("DiagAffineSystem: needs at least one map");
  std::size_t d = maps_[0].scale.size();
  for (const DiagAffineMap& m : maps_) {
    if (m.scale.size() != d || m.trans.size() != d)
      throw DomainError("DiagAffineSystem: dimension mismatch");
    for (double s : m.scale)
      if (!(s > 0.0 && s < 1.0))
        throw DomainError("DiagAffineSystem: scales must lie in (0,1)");
  }
  // Fixed point of the first map as center; radius from the drift bound with
  // the largest axis contraction.
  Vec z(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) z[j] = maps_[0].trans[j] / (1.0 - maps_[0].scale[j]);
  double cmax = 0.0;
  for (const DiagAffineMap& m : maps_)
    for (double s : m.scale) cmax = std::max(cmax, s);
  double radius = 0.0;
  for (const DiagAffineMap& m : maps_) {
    Vec img(d);
    for (std::size_t j = 0; j < d; ++j) img[j] = m.scale[j] * z[j] + m.trans[j];
    radius = std::max(radius, norm2(img - z) / (1.0 - cmax));
  }
  bound_center_ = std::move(z);
  bound_radius_ = std::max(radius, 1e-12);
}

PointCloud attractor_cloud(const DiagAffineSystem& sys, double delta,
                           const EnumBudget& budget) {
  if (!(delta > 0.0)) throw DomainError("attractor_cloud: delta must be positive");
  const std::size_t d = sys.dim();
  if (d > 8) throw DomainError("attractor_cloud: dimension too large");
  // Per-axis dedup grid: axis drift contracts by that axis's own worst ratio,
  // so slowly-contracting axes need a finer grid than fast ones.
  Vec cmax(d, 0.0);
  for (const DiagAffineMap& m : sys.maps())
    for (std::size_t j = 0; j < d; ++j) cmax[j] = std::max(cmax[j], m.scale[j]);
  Vec qinv(d);
  for (std::size_t j = 0; j < d; ++j)
    qinv[j] = 1.0 / std::max(delta * (1.0 - cmax[j]) / 4.0, delta * 1e-6);

  PointCloud cloud(d);
  cloud.delta = delta;
  cloud.source = "attractor:" + sys.name();

  // Point-frontier from the per-map fixed points; only the final level is
  // kept, the earlier levels are transient approximations.
  std::vector<double> cur, next;
  for (const DiagAffineMap& m : sys.maps())
    for (std::size_t j = 0; j < d; ++j) cur.push_back(m.trans[j] / (1.0 - m.scale[j]));

  // Per-axis extents contract independently; stop once every axis of the
  // level diameter is below delta/2.
  Vec extent(d, 2.0 * sys.bound_radius());
  std::uint64_t words = 0;
  while (true) {
    bool fine_enough = true;
    for (std::size_t j = 0; j < d; ++j)
      if (extent[j] >= delta / 2.0) fine_enough = false;
    if (fine_enough) break;

    next.clear();
    detail::FlatSet128 seen((cur.size() / d) * sys.maps().size() / 2 + 64);
    for (const DiagAffineMap& m : sys.maps()) {
      for (std::size_t it = 0; it < cur.size() / d; ++it) {
        if (++words > budget.max_words) {
          if (budget.allow_partial) {
            cloud.truncated = true;
            goto done;
          }
          throw ResourceError("attractor_cloud: word budget exhausted");
        }
        std::uint64_t lo = 0, hi = 0;
        double y[8];
        for (std::size_t j = 0; j < d; ++j) {
          y[j] = m.scale[j] * cur[it * d + j] + m.trans[j];
          double qv = (y[j] - sys.bound_center()[j] + 2.0 * sys.bound_radius()) * qinv[j];
          std::int64_t iv = qv > -2.0e8 && qv < 5.0e8 ? std::llround(qv) : 0;
          std::uint64_t f =
              static_cast<std::uint64_t>(iv + (std::int64_t{1} << 29)) & ((1ULL << 30) - 1);
          if (j < 2)
            lo |= f << (j * 30);
          else
            hi ^= detail::mix64(f + j);
        }
        if (!seen.insert(lo, hi)) continue;
        next.insert(next.end(), y, y + d);
        if (next.size() / d > budget.max_frontier) {
          if (budget.allow_partial) {
            cloud.truncated = true;
            goto done;
          }
          throw ResourceError("attractor_cloud: frontier budget exhausted");
        }
      }
    }
    cur.swap(next);
    Vec worst(d, 0.0);
    for (const DiagAffineMap& m : sys.maps())
      for (std::size_t j = 0; j < d; ++j) worst[j] = std::max(worst[j], m.scale[j]);
    for (std::size_t j = 0; j < d; ++j) extent[j] *= worst[j];
  }
done:
  for (std::size_t it = 0; it < cur.size() / d; ++it) {
    if (cloud.size() >= budget.max_cloud_points) {
      cloud.truncated = true;
      if (!budget.allow_partial)
        throw ResourceError("attractor_cloud: point budget exhausted");
      break;
    }
    cloud.push(&cur[it * d]);
  }
  return cloud;
}

// ---- Presets ----------------------------------------------------------------

IfsSystem bernoulli_comb(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("bernoulli_comb: lambda must lie in (0,1)");
  Similarity s0{lambda, Mat::identity(2), Vec{0.0, 0.0}};
  Similarity s1{lambda, Mat::identity(2), Vec{1.0 - lambda, 0.0}};
  CondensationSet c = CondensationSet::segment(Vec{0.0, 0.0}, Vec{0.0, 1.0});
  return IfsSystem({s0, s1}, c, "bernoulli_comb");
}

IfsSystem extended_comb(double lambda, double eps) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("extended_comb: lambda must lie in (0,1)");
  if (!(eps > 0.0 && eps < 1.0 - lambda))
    throw DomainError("extended_comb: epsilon must lie in (0, 1-lambda)");
  Similarity s0{lambda, Mat::identity(2), Vec{0.0, 0.0}};
  Similarity s1{lambda, Mat::identity(2), Vec{1.0 - lambda, 0.0}};
  Similarity s2{eps, Mat::identity(2), Vec{0.0, 1.0 - eps}};
  CondensationSet c = CondensationSet::segment(Vec{0.0, 0.0}, Vec{0.0, 1.0});
  return IfsSystem({s0, s1, s2}, c, "extended_comb");
}

DiagAffineSystem affine_companion(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("affine_companion: lambda must lie in (0,1)");
  DiagAffineMap t0{Vec{lambda, 0.5}, Vec{0.0, 0.0}};
  DiagAffineMap t1{Vec{lambda, 0.5}, Vec{1.0 - lambda, 0.5}};
  return DiagAffineSystem({t0, t1}, "affine_companion");
}

std::vector<Mat> default_rotations() {
  // Rotation by arccos(3/5) about the x-axis and about the z-axis, plus
  // their inverses.
  Mat a(3), b(3);
  a(0, 0) = 1.0;
  a(1, 1) = 0.6;
  a(1, 2) = -0.8;
  a(2, 1) = 0.8;
  a(2, 2) = 0.6;
  b(0, 0) = 0.6;
  b(0, 1) = -0.8;
  b(1, 0) = 0.8;
  b(1, 1) = 0.6;
  b(2, 2) = 1.0;
  return {a, a.transposed(), b, b.transposed()};
}

IfsSystem sphere_system(double c, const std::vector<Mat>& rotations, const Vec& x0) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("sphere_system: c must lie in (0,1)");
  if (rotations.empty()) throw DomainError("sphere_system: needs at least one rotation");
  std::size_t d = rotations[0].dim();
  if (x0.size() != d) throw DomainError("sphere_system: x0 dimension mismatch");
  std::vector<Similarity> maps;
  for (const Mat& g : rotations) {
    if (g.dim() != d) throw DomainError("sphere_system: rotation dimension mismatch");
    if (orthogonality_defect(g) > 1e-12)
      throw DomainError("sphere_system: generator is not orthogonal");
    if (std::abs(determinant(g) - 1.0) > 1e-9)
      throw DomainError("sphere_system: generator must have determinant 1");
    maps.push_back(Similarity{c, g, Vec(d, 0.0)});
  }
  return IfsSystem(std::move(maps), CondensationSet::point(x0), "sphere");
}

IfsSystem sphere_system(double c) {
  return sphere_system(c, default_rotations(), Vec{1.0, 0.0, 0.0});
}

// ---- JSON configuration -----------------------------------------------------

namespace {

using nlohmann::json;

Vec parse_vec(const json& j) {
  if (!j.is_array()) throw DomainError("config: expected an array of numbers");
  Vec v;
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

Mat parse_mat(const json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("config: expected a matrix");
  std::size_t d = j.size();
  Mat m(d);
  for (std::size_t i = 0; i < d; ++i) {
    Vec row = parse_vec(j[i]);
    if (row.size() != d) throw DomainError("config: matrix must be square");
    for (std::size_t k = 0; k < d; ++k) m(i, k) = row[k];
  }
  return m;
}

CondensationSet parse_condensation(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  const json& data = j.at("data");
  std::vector<Vec> pts;
  // "data" is either one flat coordinate vector (point) or a list of points.
  if (!data.empty() && data[0].is_number()) {
    pts.push_back(parse_vec(data));
  } else {
    for (const auto& p : data) pts.push_back(parse_vec(p));
  }
  if (kind == "point") {
    if (pts.size() != 1) throw DomainError("config: point condensation needs one point");
    return CondensationSet::point(pts[0]);
  }
  if (kind == "segment") {
    if (pts.size() != 2) throw DomainError("config: segment condensation needs two points");
    return CondensationSet::segment(pts[0], pts[1]);
  }
  if (kind == "polyline") return CondensationSet::polyline(std::move(pts));
  if (kind == "point_cloud") return CondensationSet::point_cloud(std::move(pts));
  throw DomainError("config: unknown condensation kind '" + kind + "'");
}

Mat parse_rotation(const json& j, std::size_t d) {
  if (j.contains("angle_deg")) {
    if (d != 2) throw DomainError("config: angle_deg rotations need dimension 2");
    double a = j.at("angle_deg").get<double>() * 3.14159265358979323846 / 180.0;
    Mat m(2);
    m(0, 0) = std::cos(a);
    m(0, 1) = -std::sin(a);
    m(1, 0) = std::sin(a);
    m(1, 1) = std::cos(a);
    return m;
  }
  if (j.contains("matrix")) return parse_mat(j.at("matrix"));
  throw DomainError("config: rotation needs angle_deg or matrix");
}

// A generator is a plain matrix or {"axis": [...], "angle_deg"|"angle_rad": a}.
Mat parse_generator(const json& j) {
  if (j.is_array()) return parse_mat(j);
  if (j.contains("axis")) {
    Vec axis = parse_vec(j.at("axis"));
    double angle = 0.0;
    if (j.contains("angle_deg"))
      angle = j.at("angle_deg").get<double>() * 3.14159265358979323846 / 180.0;
    else if (j.contains("angle_rad"))
      angle = j.at("angle_rad").get<double>();
    else
      throw DomainError("config: axis-angle generator needs angle_deg or angle_rad");
    return rotation_about_axis(axis, angle);
  }
  throw DomainError("config: generator must be a matrix or axis-angle object");
}

double lambda_from_preset(const json& p) {
  bool has_plain = p.contains("lambda");
  bool has_poly = p.contains("lambda_poly");
  if (!has_plain && !has_poly)
    throw DomainError("config: preset needs lambda or lambda_poly");
  double lam = 0.0;
  if (has_poly) {
    const json& jp = p.at("lambda_poly");
    IntPolynomial poly;
    if (jp.is_string()) {
      poly = IntPolynomial::parse(jp.get<std::string>());
    } else {
      // Coefficient list, ascending order.
      poly = IntPolynomial(jp.get<std::vector<std::int64_t>>());
    }
    AlgebraicNumber theta = AlgebraicNumber::largest_real_root(poly);
    double th = theta.real_value();
    if (th <= 1.0) throw DomainError("config: polynomial root must exceed 1");
    lam = 1.0 / th;
    if (has_plain && std::abs(lam - p.at("lambda").get<double>()) > 1e-9)
      throw DomainError("config: lambda and lambda_poly disagree");
  } else {
    lam = p.at("lambda").get<double>();
  }
  return lam;
}

IfsSystem system_from_json_impl(const std::string& json_text) {
  json root = json::parse(json_text);
  bool has_preset = root.contains("preset");
  bool has_maps = root.contains("maps");
  // The schema allows either form; giving both is treated as a conflict.
  if (has_preset && has_maps)
    throw DomainError("config: 'preset' conflicts with explicit 'maps'");
  if (!has_preset && !has_maps)
    throw DomainError("config: one of 'preset' or 'maps' is required");

  std::optional<CondensationSet> cond;
  if (root.contains("condensation")) cond = parse_condensation(root.at("condensation"));

  if (has_preset) {
    const json& pj = root.at("preset");
    std::string name = pj.at("name").get<std::string>();
    const json params = pj.value("params", json::object());
    auto with_cond = [&](IfsSystem sys) {
      if (cond) return IfsSystem(sys.maps(), cond, sys.name());
      return sys;
    };
    if (name == "bernoulli_comb") return with_cond(bernoulli_comb(lambda_from_preset(params)));
    if (name == "extended_comb")
      return with_cond(
          extended_comb(lambda_from_preset(params), params.at("epsilon").get<double>()));
    if (name == "sphere") {
      double c = params.at("c").get<double>();
      Vec x0{1.0, 0.0, 0.0};
      if (params.contains("x0")) x0 = parse_vec(params.at("x0"));
      std::vector<Mat> gens;
      if (params.contains("generators")) {
        for (const auto& g : params.at("generators")) gens.push_back(parse_generator(g));
        if (params.value("include_inverses", true)) {
          std::size_t n = gens.size();
          for (std::size_t i = 0; i < n; ++i) gens.push_back(gens[i].transposed());
        }
      } else {
        gens = default_rotations();
      }
      return with_cond(sphere_system(c, gens, x0));
    }
    if (name == "affine_companion")
      throw DomainError(
          "config: affine_companion is a two-scale affine system; it is handled by the "
          "render and boxdim commands directly, not as a similarity system");
    throw DomainError("config: unknown preset '" + name + "'");
  }

  std::vector<Similarity> maps;
  for (const auto& jm : root.at("maps")) {
    double scale = jm.at("scale").get<double>();
    Vec trans = parse_vec(jm.at("translation"));
    Mat rot = jm.contains("rotation") ? parse_rotation(jm.at("rotation"), trans.size())
                                      : Mat::identity(trans.size());
    maps.push_back(Similarity{scale, rot, trans});
  }
  if (root.contains("dimension") &&
      root.at("dimension").get<std::size_t>() != maps.at(0).dim())
    throw DomainError("config: dimension does not match the maps");
  return IfsSystem(std::move(maps), cond, root.value("name", "custom"));
}

}  // namespace

IfsSystem system_from_json_text(const std::string& json_text) {
  // Malformed documents and wrong value types surface as config errors, not
  // as raw parser exceptions.
  try {
    return system_from_json_impl(json_text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
}

}  // namespace fraclab
