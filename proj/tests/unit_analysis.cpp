#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fraclab/dim_bounds.hpp"
#include "fraclab/exact.hpp"
#include "fraclab/ifs.hpp"
#include "fraclab/polynomial.hpp"
#include "fraclab/separation.hpp"

using namespace fraclab;

namespace {

FieldPtr golden_field() { return make_field(IntPolynomial::parse("x^2-x-1")); }

double brute_max_min(const std::vector<LinearTerm>& terms, int steps) {
  double best = -1e300;
  for (int i = 0; i <= steps; ++i) {
    double x = static_cast<double>(i) / steps;
    double lo = 1e300;
    for (const auto& t : terms) lo = std::min(lo, t.at(x));
    best = std::max(best, lo);
  }
  return best;
}

}  // namespace

TEST_CASE("similarity dimension solves the moran equation") {
  CHECK(similarity_dimension({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(similarity_dimension({0.5, 0.5, 0.5}) ==
        doctest::Approx(std::log2(3.0)).epsilon(1e-10));
  double lam = std::sqrt(0.5);
  CHECK(similarity_dimension({lam, lam}) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_THROWS_AS(similarity_dimension({}), DomainError);
  CHECK_THROWS_AS(similarity_dimension({0.5, 1.2}), DomainError);
}

TEST_CASE("input validation names each constraint") {
  BoundInputs ok{2.0, 1.0, 1.0, 0.0, 2};
  CHECK_NOTHROW(validate(ok));
  BoundInputs bad = ok;
  bad.alpha = 2.5;  // above d = 2
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ok;
  bad.alpha = -0.1;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ok;
  bad.gamma = 2.5;  // above s
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ok;
  bad.beta = 2.5;  // above d
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ok;
  bad.d = 0;
  CHECK_THROWS_AS(validate(bad), DomainError);
}

TEST_CASE("envelope terms at the sharp instance") {
  BoundInputs inp{2.0, 1.0, 1.0, 0.0, 2};
  auto t = envelope_terms(inp);
  CHECK(t[0].slope == doctest::Approx(1.0));
  CHECK(t[0].intercept == doctest::Approx(1.0));
  CHECK(t[1].slope == doctest::Approx(-1.0));
  CHECK(t[1].intercept == doctest::Approx(2.0));
  CHECK(t[2].slope == doctest::Approx(-2.0));
  CHECK(t[2].intercept == doctest::Approx(3.0));
  CHECK(t[3].slope == doctest::Approx(-1.0));
  CHECK(t[3].intercept == doctest::Approx(2.0));

  auto r = thm1_bound(inp);
  CHECK(r.value == 1.5);  // exact: terms cross at x = 1/2
  CHECK(r.argmax_x == 0.5);
  CHECK(std::find(r.active_terms.begin(), r.active_terms.end(), 1) !=
        r.active_terms.end());
}

TEST_CASE("envelope bound handles degenerate corners") {
  auto r = thm1_bound(BoundInputs{2.0, 0.0, 0.0, 2.0, 3});
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.argmax_x == doctest::Approx(0.5));

  // alpha = beta = gamma = 0 collapses the last term to zero.
  auto z = thm1_bound(BoundInputs{3.0, 0.0, 0.0, 0.0, 2});
  CHECK(z.value == doctest::Approx(0.0));
}

TEST_CASE("exact solver matches a grid search on random terms") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LinearTerm> terms;
    int k = 2 + static_cast<int>(rng() % 4);
    for (int i = 0; i < k; ++i) terms.push_back(LinearTerm{u(rng), u(rng)});
    auto exact = envelope_max_min(terms);
    double grid = brute_max_min(terms, 20000);
    CHECK(std::abs(exact.value - grid) <= 1e-4);
    double at = 1e300;
    for (const auto& t : terms) at = std::min(at, t.at(exact.argmax_x));
    CHECK(at == doctest::Approx(exact.value).epsilon(1e-12));
  }
}

TEST_CASE("bound always sits inside the classical sandwich") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    BoundInputs inp;
    inp.d = 1 + static_cast<int>(rng() % 3);
    inp.s = 0.05 + 4.0 * u01(rng);
    inp.alpha = u01(rng) * std::min(inp.s, static_cast<double>(inp.d));
    inp.beta = u01(rng) * inp.d;
    inp.gamma = u01(rng) * inp.s;
    auto r = thm1_bound(inp);
    auto sand = classical_sandwich(inp.s, inp.alpha, inp.beta);
    CHECK(r.value >= sand.lower - 1e-9);
    CHECK(r.value <= sand.upper + 1e-9);
    CHECK(r.argmax_x >= 0.0);
    CHECK(r.argmax_x <= 1.0);
  }
}

TEST_CASE("corollary closed forms") {
  BoundInputs sharp{2.0, 1.0, 1.0, 0.0, 2};
  CHECK(corollary_bound(Corollary::cor2, sharp) == doctest::Approx(1.5));

  BoundInputs point{2.0, 0.0, 0.0, 0.0, 3};
  CHECK(corollary_bound(Corollary::cor3, point) == doctest::Approx(1.0));
  CHECK(corollary_bound(Corollary::cor4, point) == doctest::Approx(1.0));

  BoundInputs g{2.0, 1.0, 1.0, 1.0, 2};
  CHECK_THROWS_AS(corollary_bound(Corollary::cor2, g), DomainError);
  BoundInputs b{2.0, 1.0, 1.0, 0.0, 2};
  CHECK_THROWS_AS(corollary_bound(Corollary::cor3, b), DomainError);
  CHECK_THROWS_AS(corollary_bound(Corollary::cor4, b), DomainError);
}

TEST_CASE("corollaries agree with restricted envelopes") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    BoundInputs inp;
    inp.d = 1 + static_cast<int>(rng() % 3);
    inp.s = 0.05 + 4.0 * u01(rng);
    inp.alpha = u01(rng) * std::min(inp.s, static_cast<double>(inp.d));
    inp.beta = u01(rng) * inp.d;
    inp.gamma = 0.0;
    auto terms = envelope_terms(inp);
    // commuting case: only the first and last envelope terms bind
    auto r = envelope_max_min({terms[0], terms[3]});
    CHECK(corollary_bound(Corollary::cor2, inp) ==
          doctest::Approx(r.value).epsilon(1e-9));

    BoundInputs pt = inp;
    pt.beta = 0.0;
    pt.gamma = u01(rng) * pt.s;
    auto pterms = envelope_terms(pt);
    auto pr = envelope_max_min({pterms[0], pterms[1], pterms[2]});
    CHECK(corollary_bound(Corollary::cor3, pt) ==
          doctest::Approx(pr.value).epsilon(1e-9));

    BoundInputs fx = pt;
    fx.alpha = 0.0;
    auto fterms = envelope_terms(fx);
    auto fr = envelope_max_min({fterms[0], fterms[1], fterms[2]});
    CHECK(corollary_bound(Corollary::cor4, fx) ==
          doctest::Approx(fr.value).epsilon(1e-9));
  }
}

TEST_CASE("classical sandwich endpoints") {
  auto s = classical_sandwich(2.0, 1.0, 1.0);
  CHECK(s.lower == 1.0);
  CHECK(s.upper == 2.0);
}

TEST_CASE("bounds report is valid json with the key fields") {
  auto text = bounds_report_json(BoundInputs{2.0, 1.0, 1.0, 0.0, 2});
  CHECK(text.find("\"value\"") != std::string::npos);
  CHECK(text.find("\"envelope_terms\"") != std::string::npos);
  CHECK(text.find("\"breakpoints\"") != std::string::npos);
  CHECK(text.find("1.5") != std::string::npos);
}

TEST_CASE("reduced similarity dimension of overlapping systems") {
  // Two copies of the same map: every length-n word composes to one map.
  IfsSystem twin({Similarity{0.5, Mat::identity(1), {0.0}},
                  Similarity{0.5, Mat::identity(1), {0.0}}},
                 std::nullopt);
  CHECK(alpha_r(twin, 0.25) == doctest::Approx(0.0).epsilon(1e-9));

  IfsSystem apart({Similarity{0.5, Mat::identity(1), {0.0}},
                   Similarity{0.5, Mat::identity(1), {0.5}}},
                  std::nullopt);
  CHECK(alpha_r(apart, 0.25) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("golden comb loses dimension through exact overlaps") {
  double lam = 2.0 / (1.0 + std::sqrt(5.0));
  auto sys = bernoulli_comb(lam);
  double r3 = lam * lam * lam;
  // 8 words of length 3 collapse to 7 classes: (100) and (011) coincide.
  double a3 = alpha_r(sys, r3);
  double expect = std::log(7.0) / (3.0 * std::log(1.0 / lam));
  CHECK(a3 == doctest::Approx(expect).epsilon(1e-6));
  // Strictly below the bare similarity dimension log2/log(1/lam).
  CHECK(a3 < std::log(2.0) / std::log(1.0 / lam) - 1e-6);
}

TEST_CASE("modified similarity dimension decreases along the schedule") {
  double lam = 2.0 / (1.0 + std::sqrt(5.0));
  auto sys = bernoulli_comb(lam);
  std::vector<double> schedule{lam, lam * lam, lam * lam * lam,
                               lam * lam * lam * lam};
  auto md = modified_similarity_dimension(sys, schedule);
  REQUIRE(md.alphas.size() == 4);
  CHECK(md.monotone);
  CHECK_FALSE(md.truncated);
  double lnphi = std::log(1.0 / lam);
  CHECK(md.alphas[0] == doctest::Approx(std::log(2.0) / lnphi).epsilon(1e-6));
  CHECK(md.alphas[2] == doctest::Approx(std::log(7.0) / (3.0 * lnphi)).epsilon(1e-6));
  CHECK(md.alphas[3] == doctest::Approx(std::log(12.0) / (4.0 * lnphi)).epsilon(1e-6));
  CHECK(md.s_star == doctest::Approx(md.alphas.back()));
}

TEST_CASE("gamma estimate sees one linear part for the comb") {
  auto g = gamma_estimate(bernoulli_comb(0.5), 6);
  REQUIRE(g.counts.size() == 6);
  for (auto c : g.counts) CHECK(c == 1);
  CHECK(g.fit_valid);
  CHECK(g.gamma_hat == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("gamma estimate recovers free rotation growth") {
  auto g = gamma_estimate(sphere_system(0.5), 6);
  REQUIRE(g.counts.size() == 6);
  // Products of exactly k letters reach every reduced word of length <= k with
  // matching parity, so the distinct-part counts are the parity balls of the
  // free group on two generators, not the plain 4*3^{k-1} sphere sizes.
  const std::uint64_t expect[] = {4, 13, 40, 121, 364, 1093};
  for (std::size_t i = 0; i < g.counts.size(); ++i) CHECK(g.counts[i] == expect[i]);
  CHECK(g.fit_valid);
  // The parity correction adds a slowly decaying bias to the fitted slope.
  CHECK(g.gamma_hat == doctest::Approx(std::log2(3.0)).epsilon(0.01));
}

TEST_CASE("sum sets enumerate scaled digit expansions") {
  auto s = sum_set(0.6, 2);
  REQUIRE(s.values.size() == 4);
  CHECK(s.values[0] == doctest::Approx(0.0));
  CHECK(s.values[1] == doctest::Approx(0.24));
  CHECK(s.values[2] == doctest::Approx(0.4));
  CHECK(s.values[3] == doctest::Approx(0.64));
  CHECK(s.words[1] == 2u);  // second digit only
  CHECK(s.words[2] == 1u);  // first digit only

  auto dy = sum_set(0.5, 2);
  REQUIRE(dy.values.size() == 4);
  CHECK(dy.values[1] == doctest::Approx(0.25));
  CHECK(dy.values[3] == doctest::Approx(0.75));

  CHECK_THROWS_AS(sum_set(1.2, 3), DomainError);
  CHECK_THROWS_AS(sum_set(0.5, 30), ResourceError);
}

TEST_CASE("word bit rendering puts the first digit first") {
  CHECK(word_bits_to_string(0b101u, 3) == "101");
  CHECK(word_bits_to_string(0b001u, 3) == "100");
  CHECK(word_bits_to_string(0u, 2) == "00");
}

TEST_CASE("pair counting thresholds") {
  // A_2(1/2) = {0, 1/4, 1/2, 3/4}: threshold 1 * 2^-2 pairs up neighbours.
  CHECK(r2_count(1.0, 0.5, 2) == 6);
  CHECK(t_count(1.0, 0.5, 2) == 4);
  CHECK(t_count(1.0, 0.5, 2) <= r2_count(1.0, 0.5, 2));
  // Shrinking s below the lattice gap empties both counts.
  CHECK(r2_count(0.5, 0.5, 2) == 0);
  CHECK(t_count(0.5, 0.5, 2) == 0);
}

TEST_CASE("gap reports carry scaled witnesses") {
  auto dy = gap_report(0.5, 4);
  CHECK(dy.min_gap == doctest::Approx(1.0 / 16.0));
  CHECK(dy.scaled_gap == doctest::Approx(1.0));
  CHECK_FALSE(dy.zero_gap);

  auto rt = gap_report(std::sqrt(0.5), 3);
  CHECK(rt.scaled_gap == doctest::Approx(0.485281).epsilon(1e-4));
}

TEST_CASE("exact gap detects the golden collision") {
  auto g = gap_report_exact(golden_field(), 3);
  CHECK(g.zero_gap);
  CHECK(word_bits_to_string(g.word_a, 3) == "100");
  CHECK(word_bits_to_string(g.word_b, 3) == "011");

  auto rt = gap_report_exact(make_field(IntPolynomial::parse("x^2-2")), 3);
  CHECK_FALSE(rt.zero_gap);
  CHECK(rt.scaled_gap == doctest::Approx(0.485281).epsilon(1e-4));
}

TEST_CASE("well separated counts for the dyadic lattice") {
  // A_n(1/2) is the full 2^-n lattice; every point clears kappa/(n^2 2^n).
  for (int n = 2; n <= 8; ++n)
    CHECK(well_separated_count(0.5, n, 1.0) == (1ull << n));
  auto table = separation_table(0.5, 6);
  REQUIRE(table.size() == 6);
  for (const auto& e : table) {
    CHECK(e.count_a == (1ull << e.n));
    // n = 1 sits exactly on the threshold (gap = 1/2 = kappa/(n^2 2^n)) and
    // the separation test is strict, so only n >= 2 clears it.
    CHECK(e.pass == (e.n >= 2));
  }
  auto csv = table_csv(table);
  CHECK(csv.rfind("n,count_A,min_gap,scaled_gap,well_separated\n", 0) == 0);
}

TEST_CASE("lambda points accumulate the level sets") {
  auto pts = lambda_points(0.5, 2);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0] == doctest::Approx(0.0));
  CHECK(pts[3] == doctest::Approx(0.75));
}

TEST_CASE("scan is deterministic per seed") {
  auto a = monte_carlo_scan(0.5, 0.668, 3, 6, 42);
  auto b = monte_carlo_scan(0.5, 0.668, 3, 6, 42);
  auto c = monte_carlo_scan(0.5, 0.668, 3, 6, 43);
  REQUIRE(a.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.rows[i].lambda == b.rows[i].lambda);
    CHECK(a.rows[i].lambda >= 0.5);
    CHECK(a.rows[i].lambda <= 0.668);
    CHECK(a.rows[i].target_dim ==
          doctest::Approx(std::log2(4.0 * a.rows[i].lambda)));
    CHECK_FALSE(a.rows[i].has_dim);
  }
  bool moved = false;
  for (std::size_t i = 0; i < 3; ++i)
    if (a.rows[i].lambda != c.rows[i].lambda) moved = true;
  CHECK(moved);
  CHECK(scan_csv(a).rfind("lambda,target,pass_fraction,dim_est\n", 0) == 0);
}

TEST_CASE("scan can attach dimension estimates") {
  auto r = monte_carlo_scan(0.55, 0.6, 2, 6, 7, 1, 5, 8);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].has_dim);
  CHECK_FALSE(r.rows[1].has_dim);
  CHECK(r.rows[0].dim_est > 0.5);
  CHECK(r.rows[0].dim_est < 2.0);
}
