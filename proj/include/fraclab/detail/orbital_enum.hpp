#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fraclab/detail/flat_set.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/ifs.hpp"

namespace fraclab::detail {

// Set of 128-bit keys, open addressing.
class FlatSet128 {
 public:
  explicit FlatSet128(std::size_t expected = 64) {
    std::size_t cap = 64;
    while (cap * 7 < (expected + 1) * 10) cap <<= 1;
    lo_.assign(cap, 0);
    hi_.assign(cap, 0);
    used_.assign(cap, 0);
    cap_ = cap;
  }

  bool insert(std::uint64_t lo, std::uint64_t hi) {
    if ((size_ + 1) * 10 >= cap_ * 7) rehash(cap_ * 2);
    std::size_t mask = cap_ - 1;
    std::size_t i = static_cast<std::size_t>(mix64(lo ^ mix64(hi))) & mask;
    while (true) {
      if (!used_[i]) {
        used_[i] = 1;
        lo_[i] = lo;
        hi_[i] = hi;
        ++size_;
        return true;
      }
      if (lo_[i] == lo && hi_[i] == hi) return false;
      i = (i + 1) & mask;
    }
  }

  std::size_t size() const { return size_; }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < cap_; ++i)
      if (used_[i]) f(lo_[i], hi_[i]);
  }

 private:
  void rehash(std::size_t newcap) {
    std::vector<std::uint64_t> olo, ohi;
    std::vector<std::uint8_t> ou;
    olo.swap(lo_);
    ohi.swap(hi_);
    ou.swap(used_);
    lo_.assign(newcap, 0);
    hi_.assign(newcap, 0);
    used_.assign(newcap, 0);
    cap_ = newcap;
    std::size_t mask = cap_ - 1;
    for (std::size_t k = 0; k < olo.size(); ++k) {
      if (!ou[k]) continue;
      std::size_t i = static_cast<std::size_t>(mix64(olo[k] ^ mix64(ohi[k]))) & mask;
      while (used_[i]) i = (i + 1) & mask;
      used_[i] = 1;
      lo_[i] = olo[k];
      hi_[i] = ohi[k];
    }
  }

  std::vector<std::uint64_t> lo_, hi_;
  std::vector<std::uint8_t> used_;
  std::size_t cap_ = 0;
  std::size_t size_ = 0;
};

struct OrbitalParams {
  double delta = 0.0;
  double spacing = 0.0;     // condensation sample spacing, delta/4
  double dedup_grid = 0.0;  // frontier quantisation granularity
  double scale_min = 0.0;   // expand items while scale >= scale_min
  EnumBudget budget;
};

inline OrbitalParams make_orbital_params(const IfsSystem& sys, double delta,
                                         const EnumBudget& budget) {
  if (!(delta > 0.0)) throw DomainError("orbital enumeration: delta must be positive");
  OrbitalParams p;
  p.delta = delta;
  p.spacing = delta / 4.0;
  // Quantisation with a (1 - c_max) factor keeps accumulated merge drift
  // below delta/4: a merge contributes its granularity once and is then
  // contracted by c_max under every further left-composition.
  double slack = 1.0 - sys.max_scale();
  p.dedup_grid = std::max(delta * slack / 4.0, delta * 1e-6);
  double span = 0.0;
  if (sys.condensation()) span = sys.condensation()->diameter();
  span += 2.0 * sys.bound_radius();
  p.scale_min = span > 0.0 ? (delta / 2.0) / span : 1.0;
  p.budget = budget;
  return p;
}

// Segment-channel result codes for enumerate_orbital_maps.
enum class SegHandled { abort = 0, handled = 1, sample = 2 };

// Map-frontier enumeration of all words; children are formed by composing a
// system map on the left, so a merge error is contracted by every later
// composition.  Frontier maps are deduplicated per level: identity-rotation
// items by exact scale bits plus quantised translation, general items by a
// 128-bit fold of the quantised map data.  Every level emits the image of
// the condensation set sampled at spacing p.spacing IN THE IMAGE: segment
// and polyline edges are walked with a step of p.spacing / item-scale in
// condensation coordinates, so deep words emit few points instead of a full
// fixed discretisation.  emit(pt) returning false aborts (emission budgets).
// Each image edge is first offered whole to emit_seg(a, b); a sink that can
// consume it exactly (cell ranges) returns handled, otherwise sample falls
// back to the walk.  Returns true when complete, false if a budget was hit
// with budget.allow_partial set.
template <class Emit, class EmitSeg>
bool enumerate_orbital_maps(const IfsSystem& sys, const CondensationSet& cond,
                            const OrbitalParams& p, Emit&& emit, EmitSeg&& emit_seg) {
  const std::size_t d = sys.dim();
  const std::size_t dd = d * d;
  const std::vector<Similarity>& maps = sys.maps();
  const bool pointlike = cond.kind == CondensationSet::Kind::point ||
                         cond.kind == CondensationSet::Kind::point_cloud;

  struct Frontier {
    std::vector<double> scale;
    std::vector<double> rot;    // dd per item
    std::vector<double> trans;  // d per item
    std::vector<std::uint8_t> ident;
    std::size_t size = 0;
    void clear() {
      scale.clear();
      rot.clear();
      trans.clear();
      ident.clear();
      size = 0;
    }
  };

  std::vector<std::uint8_t> map_ident(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i)
    map_ident[i] = max_entry_dist(maps[i].rot, Mat::identity(d)) == 0.0 ? 1 : 0;

  Frontier cur, next;
  cur.scale.push_back(1.0);
  for (std::size_t i = 0; i < dd; ++i)
    cur.rot.push_back(i % (d + 1) == 0 ? 1.0 : 0.0);
  for (std::size_t i = 0; i < d; ++i) cur.trans.push_back(0.0);
  cur.ident.push_back(1);
  cur.size = 1;

  const double qinv_t = 2.0 / p.dedup_grid;
  const double qinv_m =
      (2.0 * std::max(sys.bound_radius(), 1.0) * static_cast<double>(d)) / p.dedup_grid;
  // The expansion grid is much finer than the mesh, so many surviving items
  // sample the same cells.  Identity-rotation items whose translations agree
  // at the walk's own spacing (delta/4) emit interchangeable sample sets:
  // dropping the copies keeps the cloud delta-dense and cuts the emission
  // count by the grid ratio.  Children are still expanded from every item.
  const double qinv_e = 4.0 / p.delta;
  std::uint64_t words = 0;
  std::vector<double> y(d), yb(d), dv(d);
  std::vector<double> crot(dd);
  std::vector<double> ctr(d);

  while (cur.size > 0) {
    words += cur.size;
    if (words > p.budget.max_words) {
      if (p.budget.allow_partial) return false;
      throw ResourceError("orbital enumeration: word budget exhausted");
    }

    FlatSet128 emitted(cur.size / 2 + 64);
    for (std::size_t it = 0; it < cur.size; ++it) {
      const double s = cur.scale[it];
      const double* t = &cur.trans[it * d];
      const double* M = cur.ident[it] ? nullptr : &cur.rot[it * dd];
      if (M == nullptr && d <= 3) {
        std::uint64_t lo = 0, hi = 0;
        bool ok = true;
        for (std::size_t a = 0; a < d; ++a) {
          double qv = t[a] * qinv_e;
          if (!(std::abs(qv) < 5.0e8)) ok = false;
          std::uint64_t f =
              static_cast<std::uint64_t>(std::llround(qv) + (std::int64_t{1} << 29)) &
              ((1ULL << 30) - 1);
          if (a < 2)
            lo |= f << (a * 30);
          else
            hi |= f;
        }
        if (ok) {
          hi |= (mix64(std::bit_cast<std::uint64_t>(s)) & 0xFFFFFFFFULL) << 30;
          if (!emitted.insert(lo, hi)) continue;
        }
      }
      auto image = [&](const Vec& x, double* out) {
        if (M == nullptr) {
          for (std::size_t j = 0; j < d; ++j) out[j] = s * x[j] + t[j];
        } else {
          for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += M[j * d + k] * x[k];
            out[j] = s * acc + t[j];
          }
        }
      };
      if (pointlike) {
        for (const Vec& x : cond.pts) {
          image(x, y.data());
          if (!emit(y.data())) return false;
        }
      } else {
        for (std::size_t e = 0; e + 1 < cond.pts.size(); ++e) {
          image(cond.pts[e], y.data());
          image(cond.pts[e + 1], yb.data());
          SegHandled h = emit_seg(y.data(), yb.data());
          if (h == SegHandled::abort) return false;
          if (h == SegHandled::handled) continue;
          double len = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            dv[j] = yb[j] - y[j];
            len += dv[j] * dv[j];
          }
          len = std::sqrt(len);
          if (len / p.spacing > 1.0e9)
            throw ResourceError("orbital enumeration: condensation sampling too fine");
          const int steps = std::max(1, static_cast<int>(std::ceil(len / p.spacing)));
          for (std::size_t j = 0; j < d; ++j) dv[j] /= steps;
          if (!emit(y.data())) return false;
          for (int q = 1; q <= steps; ++q) {
            for (std::size_t j = 0; j < d; ++j) y[j] += dv[j];
            if (!emit(y.data())) return false;
          }
        }
      }
    }

    next.clear();
    FlatSet128 seen(cur.size * maps.size() / 2 + 64);
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const Similarity& m = maps[i];
      const double ci = m.scale;
      for (std::size_t it = 0; it < cur.size; ++it) {
        if (cur.scale[it] < p.scale_min) continue;
        const double cs = ci * cur.scale[it];
        const bool cident = map_ident[i] && cur.ident[it];

        const double* ir = &cur.rot[it * dd];
        if (cident) {
          // rotation stays identity; skip the product
        } else if (map_ident[i]) {
          std::copy(ir, ir + dd, crot.begin());
        } else if (cur.ident[it]) {
          for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) crot[a * d + b] = m.rot(a, b);
        } else {
          std::fill(crot.begin(), crot.end(), 0.0);
          for (std::size_t a = 0; a < d; ++a)
            for (std::size_t k = 0; k < d; ++k) {
              double v = m.rot(a, k);
              if (v == 0.0) continue;
              for (std::size_t b = 0; b < d; ++b) crot[a * d + b] += v * ir[k * d + b];
            }
        }
        const double* itr = &cur.trans[it * d];
        for (std::size_t a = 0; a < d; ++a) {
          double acc = 0.0;
          for (std::size_t k = 0; k < d; ++k) acc += m.rot(a, k) * itr[k];
          ctr[a] = ci * acc + m.trans[a];
        }

        std::uint64_t lo = 0, hi = 0;
        if (cident && d <= 3) {
          // Exact key: quantised translation (30 bits per axis) + scale bits.
          bool ok = true;
          for (std::size_t a = 0; a < d; ++a) {
            double qv = ctr[a] * qinv_t;
            if (!(std::abs(qv) < 5.0e8)) ok = false;
            std::uint64_t f =
                static_cast<std::uint64_t>(std::llround(qv) + (std::int64_t{1} << 29)) &
                ((1ULL << 30) - 1);
            if (a < 2)
              lo |= f << (a * 30);
            else
              hi |= f;
          }
          if (!ok) throw DomainError("orbital enumeration: translation outside packable range");
          hi |= (mix64(std::bit_cast<std::uint64_t>(cs)) & 0xFFFFFFFFULL) << 30;
          hi |= 1ULL << 62;  // tag: exact path
        } else {
          std::uint64_t h1 = 0x243f6a8885a308d3ULL, h2 = 0x13198a2e03707344ULL;
          auto fold = [&](std::int64_t v) {
            h1 = mix64(h1 ^ static_cast<std::uint64_t>(v));
            h2 = mix64(h2 + static_cast<std::uint64_t>(v) * 0x9e3779b97f4a7c15ULL);
          };
          fold(static_cast<std::int64_t>(std::bit_cast<std::uint64_t>(cs)));
          if (cident) {
            fold(1);
          } else {
            for (std::size_t a = 0; a < dd; ++a) fold(std::llround(crot[a] * qinv_m));
          }
          for (std::size_t a = 0; a < d; ++a) fold(std::llround(ctr[a] * qinv_t));
          lo = h1;
          hi = h2 & ~(1ULL << 62);
        }
        if (!seen.insert(lo, hi)) continue;

        next.scale.push_back(cs);
        if (cident) {
          for (std::size_t a = 0; a < dd; ++a)
            next.rot.push_back(a % (d + 1) == 0 ? 1.0 : 0.0);
        } else {
          next.rot.insert(next.rot.end(), crot.begin(), crot.end());
        }
        next.trans.insert(next.trans.end(), ctr.begin(), ctr.end());
        next.ident.push_back(static_cast<std::uint8_t>(cident));
        next.size++;
        if (next.size > p.budget.max_frontier) {
          if (p.budget.allow_partial) return false;
          throw ResourceError("orbital enumeration: frontier budget exhausted");
        }
      }
    }
    std::swap(cur, next);
  }
  return true;
}

// Point-frontier enumeration: tracks images of seed points.  Valid for any
// system because left-composition acts directly on points; preferred for
// small seed sets (point condensation, attractor fixed points) where the
// frontier saturates at the geometry's own cell count instead of the word
// count.  Points within the grid merge when their scales share a
// sixteenth-octave bucket; scale_min pruning absorbs the bucket fuzz.
template <class Emit>
bool enumerate_orbital_points(const IfsSystem& sys, const std::vector<Vec>& seeds,
                              const OrbitalParams& p, Emit&& emit) {
  const std::size_t d = sys.dim();
  const std::vector<Similarity>& maps = sys.maps();
  const double R = sys.bound_radius();
  const Vec& ctr = sys.bound_center();

  std::vector<double> cur_pts, next_pts;
  std::vector<double> cur_sc, next_sc;
  for (const Vec& v : seeds) {
    cur_pts.insert(cur_pts.end(), v.begin(), v.end());
    cur_sc.push_back(1.0);
  }

  const double qinv = 1.0 / p.dedup_grid;
  std::uint64_t words = 0;
  std::vector<double> y(d);

  while (!cur_sc.empty()) {
    words += cur_sc.size();
    if (words > p.budget.max_words) {
      if (p.budget.allow_partial) return false;
      throw ResourceError("orbital enumeration: word budget exhausted");
    }
    for (std::size_t it = 0; it < cur_sc.size(); ++it)
      if (!emit(&cur_pts[it * d])) return false;

    next_pts.clear();
    next_sc.clear();
    FlatSet128 seen(cur_sc.size() * maps.size() / 2 + 64);
    for (const Similarity& m : maps) {
      for (std::size_t it = 0; it < cur_sc.size(); ++it) {
        if (cur_sc[it] < p.scale_min) continue;
        const double* x = &cur_pts[it * d];
        for (std::size_t j = 0; j < d; ++j) {
          double acc = 0.0;
          for (std::size_t k = 0; k < d; ++k) acc += m.rot(j, k) * x[k];
          y[j] = m.scale * acc + m.trans[j];
        }
        const double cs = m.scale * cur_sc[it];

        std::uint64_t lo = 0, hi = 0;
        bool ok = true;
        for (std::size_t j = 0; j < d && j < 3; ++j) {
          double qv = (y[j] - ctr[j] + 2.0 * R) * qinv;
          if (!(qv > -2.0e8 && qv < 5.0e8)) ok = false;
          std::int64_t iv = ok ? std::llround(qv) : 0;
          std::uint64_t f =
              static_cast<std::uint64_t>(iv + (std::int64_t{1} << 29)) & ((1ULL << 30) - 1);
          if (j < 2)
            lo |= f << (j * 30);
          else
            hi |= f;
        }
        if (!ok)
          throw DomainError("orbital enumeration: coordinates outside packable range");
        hi |= static_cast<std::uint64_t>(
                  (std::llround(std::log2(std::max(cs, 1e-300)) * 16.0) + (1 << 15)) &
                  0xFFFF)
              << 32;
        if (d > 3) {
          std::uint64_t h = 0;
          for (std::size_t j = 3; j < d; ++j)
            h = mix64(h ^ static_cast<std::uint64_t>(
                              std::llround((y[j] - ctr[j] + 2.0 * R) * qinv)));
          hi ^= h << 48;
        }
        if (!seen.insert(lo, hi)) continue;

        next_pts.insert(next_pts.end(), y.begin(), y.end());
        next_sc.push_back(cs);
        if (next_sc.size() > p.budget.max_frontier) {
          if (p.budget.allow_partial) return false;
          throw ResourceError("orbital enumeration: frontier budget exhausted");
        }
      }
    }
    cur_pts.swap(next_pts);
    cur_sc.swap(next_sc);
  }
  return true;
}

template <class Emit>
bool enumerate_orbital_maps(const IfsSystem& sys, const CondensationSet& cond,
                            const OrbitalParams& p, Emit&& emit) {
  auto sample_all = [](const double*, const double*) { return SegHandled::sample; };
  return enumerate_orbital_maps(sys, cond, p, emit, sample_all);
}

template <class Emit, class EmitSeg>
bool enumerate_orbital(const IfsSystem& sys, const CondensationSet& cond,
                       const OrbitalParams& p, Emit&& emit, EmitSeg&& emit_seg) {
  const bool pointlike = cond.kind == CondensationSet::Kind::point ||
                         cond.kind == CondensationSet::Kind::point_cloud;
  if (pointlike && cond.pts.size() <= 16)
    return enumerate_orbital_points(sys, cond.pts, p, emit);
  return enumerate_orbital_maps(sys, cond, p, emit, emit_seg);
}

template <class Emit>
bool enumerate_orbital(const IfsSystem& sys, const CondensationSet& cond,
                       const OrbitalParams& p, Emit&& emit) {
  auto sample_all = [](const double*, const double*) { return SegHandled::sample; };
  return enumerate_orbital(sys, cond, p, emit, sample_all);
}

}  // namespace fraclab::detail
