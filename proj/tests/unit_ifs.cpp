#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>

#include "fraclab/boxcount.hpp"
#include "fraclab/ifs.hpp"
#include "fraclab/version.hpp"

using namespace fraclab;

namespace {

Similarity scale_map(double c, Vec t) {
  return Similarity{c, Mat::identity(t.size()), std::move(t)};
}

bool is_prefix(const Word& a, const Word& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

PointCloud random_cloud(std::mt19937_64& rng, std::size_t dim, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointCloud cloud(dim);
  Vec p(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : p) x = u(rng);
    cloud.push(p);
  }
  return cloud;
}

}  // namespace

TEST_CASE("similarity fixed point and composition") {
  Similarity s{0.5, Mat::identity(2), {1.0, 0.0}};
  Vec fp = s.fixed_point();
  CHECK(fp[0] == doctest::Approx(2.0));
  CHECK(fp[1] == doctest::Approx(0.0));

  auto sys = bernoulli_comb(0.5);
  Vec f1 = sys.maps()[1].fixed_point();
  CHECK(f1[0] == doctest::Approx(1.0));
  CHECK(f1[1] == doctest::Approx(0.0));

  Similarity c = compose(sys, Word{1, 1});
  CHECK(c.scale == doctest::Approx(0.25));
  CHECK(c.trans[0] == doctest::Approx(0.75));
  CHECK(c.trans[1] == doctest::Approx(0.0));
}

TEST_CASE("composition is multiplicative on scales") {
  auto sys = bernoulli_comb(0.61);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Word u, v;
    for (int i = 0; i < 4; ++i) u.push_back(static_cast<std::uint8_t>(bit(rng)));
    for (int i = 0; i < 3; ++i) v.push_back(static_cast<std::uint8_t>(bit(rng)));
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    Similarity a = compose(sys, u), b = compose(sys, v), ab = compose(sys, uv);
    CHECK(ab.scale == doctest::Approx(a.scale * b.scale).epsilon(1e-12));
    Vec probe{0.3, 0.4};
    Vec lhs = ab.apply(probe), rhs = a.apply(b.apply(probe));
    CHECK(norm_inf(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("empty word composes to the identity") {
  auto sys = bernoulli_comb(0.5);
  Similarity id = compose(sys, Word{});
  CHECK(id.scale == 1.0);
  Vec probe{0.2, 0.9};
  CHECK(norm_inf(id.apply(probe) - probe) == 0.0);
}

TEST_CASE("word rendering") {
  CHECK(word_to_string(Word{0, 1, 2}) == "012");
  CHECK(word_to_string(Word{}) == "-");
  CHECK(word_to_string(Word{10, 11}) == "ab");
}

TEST_CASE("system invariants are enforced") {
  CHECK_THROWS_AS(IfsSystem({}, std::nullopt), DomainError);
  CHECK_THROWS_AS(IfsSystem({scale_map(1.0, {0.0})}, std::nullopt), DomainError);
  CHECK_THROWS_AS(IfsSystem({scale_map(-0.5, {0.0})}, std::nullopt), DomainError);
  CHECK_THROWS_AS(
      IfsSystem({scale_map(0.5, {0.0}), scale_map(0.5, {0.0, 1.0})}, std::nullopt),
      DomainError);
  Mat skew = Mat::identity(2);
  skew(0, 1) = 0.5;
  CHECK_THROWS_AS(IfsSystem({Similarity{0.5, skew, {0.0, 0.0}}}, std::nullopt),
                  DomainError);
}

TEST_CASE("presets validate their parameters") {
  CHECK_THROWS_AS(bernoulli_comb(0.0), DomainError);
  CHECK_THROWS_AS(bernoulli_comb(1.0), DomainError);
  CHECK_THROWS_AS(extended_comb(0.5, 0.5), DomainError);  // needs eps < 1 - lambda
  CHECK_THROWS_AS(extended_comb(0.5, 0.0), DomainError);
  CHECK(extended_comb(0.5, 0.25).maps().size() == 3);

  auto comb = bernoulli_comb(0.5);
  CHECK(comb.dim() == 2);
  CHECK(comb.maps().size() == 2);
  REQUIRE(comb.condensation().has_value());
  CHECK(comb.condensation()->kind == CondensationSet::Kind::segment);
  CHECK(comb.bound_radius() >= 1.0);
}

TEST_CASE("stopping set is prefix-free and complete") {
  auto sys = bernoulli_comb(0.5);
  auto words = stopping_set(sys, 0.25);
  REQUIRE(words.size() == 4);
  for (const auto& w : words) CHECK(w.size() == 2);

  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < words.size(); ++j)
      if (i != j) CHECK_FALSE(is_prefix(words[i], words[j]));

  // Kac completeness: sum of c_I^s over the cut equals 1 at s = 1.
  double total = 0.0;
  for (const auto& w : words) total += compose(sys, w).scale;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // Uneven ratios force a ragged cut; completeness still holds at s with
  // 0.5^s + 0.3^s = 1.
  IfsSystem two({scale_map(0.5, {0.0}), scale_map(0.3, {0.7})}, std::nullopt);
  auto cut = stopping_set(two, 0.2);
  double s = 0.0;
  {
    double lo = 0.0, hi = 4.0;
    for (int it = 0; it < 200; ++it) {
      s = 0.5 * (lo + hi);
      (std::pow(0.5, s) + std::pow(0.3, s) > 1.0 ? lo : hi) = s;
    }
  }
  double mass = 0.0;
  bool ragged = false;
  std::size_t len0 = cut[0].size();
  for (const auto& w : cut) {
    mass += std::pow(compose(two, w).scale, s);
    if (w.size() != len0) ragged = true;
  }
  CHECK(ragged);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("level sets collect words by scale band") {
  auto sys = bernoulli_comb(0.5);
  CHECK(level_set(sys, 3).size() == 8);

  // lambda = 2^{-1/2}: lengths 2 and 3 both land in (2^-2, 2^-1].
  auto mixed = level_set(bernoulli_comb(std::sqrt(0.5)), 1);
  CHECK(mixed.size() == 12);
}

TEST_CASE("word budget aborts enumeration") {
  EnumBudget tiny;
  tiny.max_words = 3;
  CHECK_THROWS_AS(stopping_set(bernoulli_comb(0.5), 1.0 / 1024.0, tiny),
                  ResourceError);
}

TEST_CASE("orbital cloud needs a condensation set") {
  IfsSystem bare({scale_map(0.5, {0.0, 0.0}), scale_map(0.5, {0.5, 0.5})},
                 std::nullopt);
  CHECK_THROWS_AS(orbital_cloud(bare, 0.125), DomainError);
}

TEST_CASE("orbital cloud stays inside the bounding ball") {
  auto sys = bernoulli_comb(0.5);
  auto cloud = orbital_cloud(sys, 1.0 / 16.0);
  REQUIRE(cloud.size() > 0);
  CHECK(cloud.dim() == 2);
  CHECK_FALSE(cloud.truncated);
  const Vec& c = sys.bound_center();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Vec p = cloud.point(i);
    CHECK(norm2(p - c) <= sys.bound_radius() + 1e-9);
  }
}

TEST_CASE("condensation discretization respects spacing") {
  auto seg = CondensationSet::segment({0.0, 0.0}, {0.0, 1.0});
  auto pts = seg.discretize(0.25);
  CHECK(pts.size() >= 5);
  CHECK(seg.diameter() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < pts.size(); ++i)
    CHECK(norm2(pts[i] - pts[i - 1]) <= 0.25 + 1e-12);
}

TEST_CASE("box counts on an exact grid") {
  // 2^m + 1 equispaced points in [0,1] occupy 2^m + 1 half-open cells: the
  // right endpoint falls in its own cell under the floor convention.
  PointCloud cloud(1);
  int m = 3;
  for (int k = 0; k <= (1 << m); ++k) {
    Vec p{static_cast<double>(k) / (1 << m)};
    cloud.push(p);
  }
  CHECK(count_boxes(cloud, m, Vec{0.0}) == (1u << m) + 1);
  CHECK(count_boxes(cloud, m) == (1u << m) + 1);

  PointCloud one(2);
  one.push(Vec{0.25, 0.25});
  CHECK(count_boxes(one, 2, Vec{0.0, 0.0}) == 1);
}

TEST_CASE("box counts are thread-count invariant") {
  std::mt19937_64 rng(11);
  auto cloud = random_cloud(rng, 3, 20000);
  auto c1 = count_boxes(cloud, 6, 1);
  CHECK(count_boxes(cloud, 6, 3) == c1);
  CHECK(count_boxes(cloud, 6, 7) == c1);
}

TEST_CASE("refinement inequality on a fixed cloud") {
  std::mt19937_64 rng(13);
  auto cloud = random_cloud(rng, 2, 5000);
  auto curve = count_curve(cloud, 2, 9);
  REQUIRE(curve.entries.size() == 8);
  for (std::size_t i = 1; i < curve.entries.size(); ++i) {
    auto prev = curve.entries[i - 1].count;
    auto next = curve.entries[i].count;
    CHECK(prev <= next);
    CHECK(next <= 4 * prev);  // 2^d with d = 2
  }
}

TEST_CASE("dimension estimate recovers a synthetic slope") {
  CountCurve curve;
  curve.origin = Vec{0.0};
  for (int m = 4; m <= 12; ++m) {
    CountEntry e;
    e.m = m;
    e.delta = std::ldexp(1.0, -m);
    e.count = static_cast<std::uint64_t>(std::llround(std::pow(2.0, 1.5 * m + 3.0)));
    curve.entries.push_back(e);
  }
  // Counts are rounded to integers, so the fit carries ~1e-4 of noise.
  auto est = estimate_dimension(curve, 4, 12);
  CHECK(est.slope == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(est.intercept == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(est.residual_max <= 1e-3);

  auto rate = fit_rate(curve, 1.5);
  CHECK(rate.c_rate == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(rate.max_dev <= 1e-3);

  CountCurve two;
  two.entries.assign(curve.entries.begin(), curve.entries.begin() + 2);
  CHECK_THROWS_AS(estimate_dimension(two, 4, 5), DomainError);
  CHECK_THROWS_AS(fit_rate(two, 1.5), DomainError);
}

TEST_CASE("default estimate window trims the curve ends") {
  CountCurve curve;
  for (int m = 2; m <= 9; ++m) {
    CountEntry e;
    e.m = m;
    e.delta = std::ldexp(1.0, -m);
    e.count = 1u << m;
    curve.entries.push_back(e);
  }
  auto est = estimate_dimension(curve);
  CHECK(est.m_lo == 4);
  CHECK(est.m_hi == 8);
  CHECK(est.slope == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("streaming counts for the dyadic comb") {
  auto sys = bernoulli_comb(0.5);
  auto curve = count_curve(sys, 3, 9);
  REQUIRE(curve.entries.size() == 7);
  CHECK_FALSE(curve.truncated);
  for (std::size_t i = 1; i < curve.entries.size(); ++i) {
    CHECK(curve.entries[i - 1].count < curve.entries[i].count);
    CHECK(curve.entries[i].count <= 4 * curve.entries[i - 1].count);
  }
  // N(m) grows like m 2^m at lambda = 1/2 (columns pile up at every dyadic
  // abscissa), so finite-window slopes overshoot 1 by roughly log2(m)/m.
  auto est = estimate_dimension(curve, 5, 9);
  CHECK(est.slope >= 0.95);
  CHECK(est.slope <= 1.40);
}

TEST_CASE("streaming counts at lambda = 2^{-1/2} approach slope 1.5") {
  auto curve = count_curve(bernoulli_comb(std::sqrt(0.5)), 6, 11);
  REQUIRE(curve.entries.size() == 6);
  CHECK_FALSE(curve.truncated);
  auto est = estimate_dimension(curve, 6, 11);
  CHECK(est.slope == doctest::Approx(1.5).epsilon(0.10));
}

TEST_CASE("affine companion attractor counts") {
  auto aff = affine_companion(0.5);
  CHECK(aff.dim() == 2);
  auto curve = count_curve(aff, 3, 9);
  REQUIRE(curve.entries.size() == 7);
  auto est = estimate_dimension(curve, 5, 9);
  // Both branches halve both coordinates, so the attractor is the diagonal.
  CHECK(est.slope == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("minkowski sum bound holds for small clouds") {
  std::mt19937_64 rng(17);
  auto x = random_cloud(rng, 2, 300);
  auto y = random_cloud(rng, 2, 200);
  auto chk = minkowski_sum_check(x, y, 5);
  CHECK(chk.ok);
  CHECK(chk.count_sum <= chk.bound);
  CHECK(chk.bound == (4ull * chk.count_x * chk.count_y));

  PointCloud empty(2);
  CHECK_THROWS_AS(minkowski_sum_check(empty, y, 5), DomainError);
}

TEST_CASE("csv output carries one row per scale") {
  auto curve = count_curve(bernoulli_comb(0.5), 3, 6);
  auto csv = to_csv(curve);
  CHECK(csv.rfind("m,delta,count,log2count\n", 0) == 0);
  std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == curve.entries.size() + 1);
}

TEST_CASE("svg rendering embeds the version and cells") {
  auto cloud = orbital_cloud(bernoulli_comb(0.5), 1.0 / 32.0);
  auto svg = render_svg(cloud, 5);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<rect") != std::string::npos);
  CHECK(svg.find(kVersion) != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("json config builds presets and raw maps") {
  auto sys = system_from_json_text(R"({
    "preset": {"name": "bernoulli_comb", "params": {"lambda": 0.5}}
  })");
  CHECK(sys.maps().size() == 2);
  CHECK(sys.maps()[0].scale == doctest::Approx(0.5));

  auto poly = system_from_json_text(R"({
    "preset": {"name": "bernoulli_comb", "params": {"lambda_poly": "x^2-2"}}
  })");
  CHECK(poly.maps()[0].scale == doctest::Approx(std::sqrt(0.5)));

  auto raw = system_from_json_text(R"({
    "dimension": 2,
    "maps": [
      {"scale": 0.4, "rotation": {"angle_deg": 90}, "translation": [0.1, 0.0]},
      {"scale": 0.4, "translation": [0.5, 0.5]}
    ],
    "condensation": {"kind": "point", "data": [0.0, 0.0]}
  })");
  CHECK(raw.maps().size() == 2);
  CHECK(raw.maps()[0].rot(0, 1) == doctest::Approx(-1.0));
  REQUIRE(raw.condensation().has_value());
}

TEST_CASE("json config rejects conflicting and malformed input") {
  CHECK_THROWS_AS(system_from_json_text(R"({
    "preset": {"name": "bernoulli_comb", "params": {"lambda": 0.5}},
    "maps": [{"scale": 0.5, "translation": [0.0]}]
  })"),
                  DomainError);
  CHECK_THROWS_AS(system_from_json_text("{nope"), DomainError);
  CHECK_THROWS_AS(system_from_json_text(R"({"maps": "zzz"})"), DomainError);
  CHECK_THROWS_AS(system_from_json_text(R"({})"), DomainError);
}

TEST_CASE("json sphere preset accepts axis-angle generators") {
  auto sys = system_from_json_text(R"({
    "preset": {"name": "sphere", "params": {
      "c": 0.5,
      "generators": [{"axis": [0, 0, 1], "angle_deg": 53.13010235415598}],
      "include_inverses": true
    }}
  })");
  CHECK(sys.dim() == 3);
  // generator plus inverse, each contracted by c
  CHECK(sys.maps().size() == 2);
  CHECK(sys.maps()[0].rot(0, 0) == doctest::Approx(0.6).epsilon(1e-9));
}
