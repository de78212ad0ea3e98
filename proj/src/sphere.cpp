#include "fraclab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fraclab/detail/orbital_enum.hpp"
#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr double kOrbitMesh = 0x1p-20;  // dedup grid for points on the sphere

void check_unit(const Vec& x) {
  if (x.size() < 2)
    throw DomainError("orbit base point needs ambient dimension >= 2");
  if (std::fabs(norm2(x) - 1.0) > 1e-12)
    throw DomainError("orbit base point must be a unit vector");
}

// 128-bit cell key on the box [-2, 2]^d at cell size 1/qinv; axes beyond the
// third are folded into the high word.  centered rounds to the nearest grid
// point instead of flooring: orbit coordinates sit exactly on values like 0,
// which are cell boundaries under flooring, so equal points split on sign
// noise and the split copies breed.  Counting meshes keep the floor
// convention.
bool cell_key(const double* p, std::size_t d, double qinv, bool centered,
              std::uint64_t& lo, std::uint64_t& hi) {
  constexpr std::uint64_t kField = (std::uint64_t{1} << 30) - 1;
  lo = 0;
  hi = 0;
  for (std::size_t j = 0; j < d; ++j) {
    double q = (p[j] + 2.0) * qinv;
    if (!(q >= 0.0 && q < static_cast<double>(std::uint64_t{1} << 30)))
      throw DomainError("point outside the packing box");
    std::uint64_t f =
        (centered ? static_cast<std::uint64_t>(std::llround(q))
                  : static_cast<std::uint64_t>(q)) &
        kField;
    if (j == 0)
      lo |= f;
    else if (j == 1)
      lo |= f << 30;
    else if (j == 2)
      hi |= f;
    else
      hi = detail::mix64(hi ^ (f * 0x9e3779b97f4a7c15ull));
  }
  return true;
}

std::uint64_t mesh_count(const std::vector<double>& flat, std::size_t d, int m) {
  detail::FlatSet128 cells(flat.size() / (d * 2) + 64);
  double qinv = std::ldexp(1.0, m);
  std::uint64_t lo, hi;
  for (std::size_t i = 0; i < flat.size(); i += d) {
    cell_key(flat.data() + i, d, qinv, false, lo, hi);
    cells.insert(lo, hi);
  }
  return cells.size();
}

// One breadth-first level: images of the frontier under the whole alphabet,
// deduplicated at the orbit mesh.
std::vector<double> expand_level(const std::vector<double>& frontier,
                                 const std::vector<Mat>& alphabet, std::size_t d,
                                 std::uint64_t& words, std::uint64_t max_words) {
  detail::FlatSet128 seen(frontier.size() / d * alphabet.size() + 64);
  std::vector<double> next;
  next.reserve(frontier.size() * alphabet.size());
  std::vector<double> y(d);
  std::uint64_t lo, hi;
  for (std::size_t i = 0; i < frontier.size(); i += d) {
    for (const Mat& g : alphabet) {
      if (++words > max_words)
        throw ResourceError("orbit word budget exhausted");
      for (std::size_t r = 0; r < d; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += g(r, c) * frontier[i + c];
        y[r] = s;
      }
      cell_key(y.data(), d, 1.0 / kOrbitMesh, true, lo, hi);
      if (seen.insert(lo, hi)) next.insert(next.end(), y.begin(), y.end());
    }
  }
  return next;
}

double fit_log_slope(const std::vector<std::uint64_t>& counts, int n_lo, int n_hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int np = 0;
  for (int n = n_lo; n <= n_hi; ++n) {
    double x = n;
    double y = std::log(static_cast<double>(counts[static_cast<std::size_t>(n)]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++np;
  }
  if (np < 2) return 0.0;
  double vxx = sxx - sx * sx / np;
  if (vxx <= 0.0) return 0.0;
  return (sxy - sx * sy / np) / vxx;
}

}  // namespace

std::vector<Mat> RotationSet::alphabet() const {
  std::vector<Mat> out;
  for (const Mat& g : generators) out.push_back(g);
  if (include_inverses) {
    for (const Mat& g : generators) {
      Mat t = g.transposed();
      bool dup = false;
      for (const Mat& h : out)
        if (max_entry_dist(t, h) <= 1e-12) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(t);
    }
  }
  return out;
}

RotationSet make_rotation_set(std::vector<Mat> generators, bool include_inverses) {
  if (generators.empty())
    throw DomainError("rotation set needs at least one generator");
  std::size_t d = generators[0].dim();
  for (const Mat& g : generators) {
    if (g.dim() != d) throw DomainError("generator dimensions disagree");
    if (orthogonality_defect(g) > 1e-12)
      throw DomainError("generator is not orthogonal within 1e-12");
    if (std::fabs(determinant(g) - 1.0) > 1e-12)
      throw DomainError("generator determinant must be 1 within 1e-12");
  }
  return RotationSet{std::move(generators), include_inverses};
}

RotationSet default_rotation_set() {
  // Entries come paired with their inverses; take one rotation per axis and
  // let include_inverses supply the transposes, or the alphabet collapses.
  auto all = default_rotations();
  return make_rotation_set({all[0], all[2]}, true);
}

RotationSet commuting_rotation_set() {
  Mat a(3), b(3);
  a(0, 0) = 3.0 / 5.0;
  a(0, 1) = -4.0 / 5.0;
  a(1, 0) = 4.0 / 5.0;
  a(1, 1) = 3.0 / 5.0;
  a(2, 2) = 1.0;
  b(0, 0) = -7.0 / 25.0;
  b(0, 1) = -24.0 / 25.0;
  b(1, 0) = 24.0 / 25.0;
  b(1, 1) = -7.0 / 25.0;
  b(2, 2) = 1.0;
  return make_rotation_set({a, b}, true);
}

PointCloud orbit(const RotationSet& rot, const Vec& x, int n,
                 std::uint64_t max_words) {
  check_unit(x);
  if (n < 0) throw DomainError("orbit depth must be nonnegative");
  auto alphabet = make_rotation_set(rot.generators, rot.include_inverses).alphabet();
  std::size_t d = x.size();
  if (alphabet[0].dim() != d)
    throw DomainError("generator and base point dimensions disagree");
  std::vector<double> frontier(x.begin(), x.end());
  std::uint64_t words = 0;
  for (int level = 0; level < n; ++level)
    frontier = expand_level(frontier, alphabet, d, words, max_words);
  PointCloud cloud(d);
  for (std::size_t i = 0; i < frontier.size(); i += d)
    cloud.push(frontier.data() + i);
  cloud.delta = kOrbitMesh;
  cloud.source = "orbit:" + std::to_string(n);
  return cloud;
}

OrbitCounts orbit_counts(const RotationSet& rot, const Vec& x, int n_max, int m,
                         std::uint64_t max_words) {
  check_unit(x);
  if (n_max < 1) throw DomainError("orbit depth must be >= 1");
  if (m < 1 || m > 20) throw DomainError("mesh exponent must lie in 1..20");
  auto alphabet = make_rotation_set(rot.generators, rot.include_inverses).alphabet();
  std::size_t d = x.size();
  if (alphabet[0].dim() != d)
    throw DomainError("generator and base point dimensions disagree");
  OrbitCounts out;
  out.m = m;
  std::vector<double> frontier(x.begin(), x.end());
  out.n.push_back(0);
  out.counts.push_back(mesh_count(frontier, d, m));
  double capacity =
      0.25 * std::ldexp(1.0, m * (static_cast<int>(d) - 1));
  out.saturation_onset = n_max;
  std::uint64_t words = 0;
  for (int n = 1; n <= n_max; ++n) {
    frontier = expand_level(frontier, alphabet, d, words, max_words);
    out.n.push_back(n);
    out.counts.push_back(mesh_count(frontier, d, m));
    if (!out.saturated &&
        static_cast<double>(out.counts.back()) >= capacity) {
      out.saturated = true;
      out.saturation_onset = n;
    }
  }
  int hi = out.saturation_onset;
  int lo = std::max(1, hi - 4);
  out.eps_hat = std::exp(fit_log_slope(out.counts, lo, hi)) - 1.0;
  return out;
}

std::string orbit_csv(const OrbitCounts& counts) {
  std::string out = "n,count,log2count\n";
  char buf[96];
  for (std::size_t i = 0; i < counts.n.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%llu,%.6f\n", counts.n[i],
                  static_cast<unsigned long long>(counts.counts[i]),
                  std::log2(static_cast<double>(counts.counts[i])));
    out += buf;
  }
  return out;
}

SgResult sg_attractor(double c, const RotationSet& rot, const Vec& x, int m,
                      const EnumBudget& budget) {
  if (!(c > 0.0 && c < 1.0))
    throw DomainError("contraction c must lie in (0,1)");
  check_unit(x);
  if (m < 5 || m > 12)
    throw DomainError("mesh exponent must lie in 5..12");
  auto alphabet = make_rotation_set(rot.generators, rot.include_inverses).alphabet();
  std::size_t d = x.size();
  if (alphabet[0].dim() != d)
    throw DomainError("generator and base point dimensions disagree");

  double delta = std::ldexp(1.0, -m);
  int needed = static_cast<int>(
      std::ceil(std::log(delta / 2.0) / std::log(c)));
  needed = std::max(needed, 1);
  if (needed > 100000)
    throw ResourceError("contraction too close to 1 for this mesh");

  // Exact breadth-first shells until they grow past the size cap; deeper
  // shells reuse the deepest shell of matching parity (a subset of the true
  // orbit, so cell counts only err low).
  constexpr std::size_t kShellCap = 800'000;
  std::vector<std::vector<double>> shells;
  shells.push_back(std::vector<double>(x.begin(), x.end()));
  std::uint64_t words = 0;
  int depth_cap = std::min(needed, 64);
  while (static_cast<int>(shells.size()) - 1 < depth_cap &&
         shells.back().size() / d * alphabet.size() <= kShellCap) {
    shells.push_back(expand_level(shells.back(), alphabet, d, words,
                                  budget.max_words));
  }
  int B = static_cast<int>(shells.size()) - 1;

  SgResult res;
  res.cloud = PointCloud(d);
  res.depth = B;
  res.shells = needed;
  double qinv = std::ldexp(1.0, m + 1);  // dedup at delta/2
  detail::FlatSet128 seen(1 << 20);
  std::uint64_t lo, hi;
  std::vector<double> y(d);
  auto push_scaled = [&](const std::vector<double>& pts, double f) {
    for (std::size_t i = 0; i < pts.size(); i += d) {
      if (++words > budget.max_words) {
        if (budget.allow_partial) return false;
        throw ResourceError("attractor shell budget exhausted");
      }
      for (std::size_t j = 0; j < d; ++j) y[j] = f * pts[i + j];
      cell_key(y.data(), d, qinv, true, lo, hi);
      if (seen.insert(lo, hi)) {
        if (res.cloud.size() >= budget.max_cloud_points) {
          if (budget.allow_partial) return false;
          throw ResourceError("attractor cloud budget exhausted");
        }
        res.cloud.push(y.data());
      }
    }
    return true;
  };
  Vec origin(d, 0.0);
  cell_key(origin.data(), d, qinv, true, lo, hi);
  seen.insert(lo, hi);
  res.cloud.push(origin.data());
  double f = 1.0;
  bool complete = true;
  for (int n = 0; n < needed && complete; ++n) {
    int src = n <= B ? n : B - ((n - B) & 1);
    complete = push_scaled(shells[static_cast<std::size_t>(src)], f);
    f *= c;
  }
  res.cloud.truncated = !complete;
  res.cloud.delta = delta;
  res.cloud.source = "sg_attractor";

  res.curve = count_curve(res.cloud, 3, m);
  res.curve.truncated = res.cloud.truncated;
  res.estimate = estimate_dimension(res.curve, 3, m);

  auto oc = orbit_counts(rot, x, 8, 6, budget.max_words);
  res.eps_hat = oc.eps_hat;
  double dd = static_cast<double>(d) - 1.0;
  double lc = std::log(1.0 / c);
  res.alpha_c = dd * lc / (std::log(1.0 + std::max(res.eps_hat, 0.0)) + dd * lc);
  res.target_dim = (1.0 - res.alpha_c) * dd;
  return res;
}

}  // namespace fraclab
