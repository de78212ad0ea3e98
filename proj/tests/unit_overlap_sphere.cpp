#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fraclab/ifs.hpp"
#include "fraclab/overlap.hpp"
#include "fraclab/polynomial.hpp"
#include "fraclab/sphere.hpp"

using namespace fraclab;

namespace {

FieldPtr golden_field() { return make_field(IntPolynomial::parse("x^2-x-1")); }
FieldPtr rt2_field() { return make_field(IntPolynomial::parse("x^2-2")); }

}  // namespace

TEST_CASE("exact comb composes words in the field") {
  auto field = golden_field();
  auto sys = exact_comb(field);
  CHECK(sys.dim() == 2);
  REQUIRE(sys.maps().size() == 2);

  auto w = sys.compose_word(Word{1, 1});
  double lam = field->lambda_approx();
  CHECK(w.scale.approx() == doctest::Approx(lam * lam).epsilon(1e-12));
  CHECK(w.trans[0].approx() == doctest::Approx((1 - lam) * (1 + lam)).epsilon(1e-12));
  CHECK(w.trans[1].approx() == doctest::Approx(0.0));

  auto id = sys.compose_word(Word{});
  CHECK(id.scale == FieldElem::one(field));
}

TEST_CASE("golden comb has the length-3 exact overlap") {
  auto report = exact_overlaps(exact_comb(golden_field()), 3);
  CHECK(report.mode == OverlapMode::exact);
  REQUIRE(report.pairs.size() == 1);
  CHECK(report.pairs[0].word_a == Word{0, 1, 1});
  CHECK(report.pairs[0].word_b == Word{1, 0, 0});
  CHECK(word_to_string(report.pairs[0].word_a) == "011");
}

TEST_CASE("golden overlaps extend to length 4 by padding") {
  auto report = exact_overlaps(exact_comb(golden_field()), 4);
  // the root relation plus its four one-letter extensions
  CHECK(report.pairs.size() == 5);
  for (const auto& p : report.pairs) {
    CHECK(p.word_a.size() == p.word_b.size());
    CHECK(p.word_a < p.word_b);
  }
  CHECK(report.pairs[0].word_a == Word{0, 1, 1});
}

TEST_CASE("garsia comb has no exact overlaps") {
  auto report = exact_overlaps(exact_comb(rt2_field()), 4);
  CHECK(report.pairs.empty());
}

TEST_CASE("float mode finds the same golden pair within tolerance") {
  auto sys = approx_system(exact_comb(golden_field()));
  auto report = exact_overlaps(sys, 3, 1e-9);
  CHECK(report.mode == OverlapMode::floating);
  REQUIRE(report.pairs.size() == 1);
  CHECK(report.pairs[0].word_a == Word{0, 1, 1});
  CHECK(report.pairs[0].word_b == Word{1, 0, 0});
  CHECK(report.pairs[0].map_distance <= 1e-9);
}

TEST_CASE("reduced words keep the lexicographically least representative") {
  auto field = golden_field();
  auto es = exact_comb(field);
  double lam = field->lambda_approx();
  double r = lam * lam * lam;
  auto reps = reduced_words(es, r);
  CHECK(reps.size() == 7);
  CHECK(std::find(reps.begin(), reps.end(), Word{0, 1, 1}) != reps.end());
  CHECK(std::find(reps.begin(), reps.end(), Word{1, 0, 0}) == reps.end());

  auto float_reps = reduced_words(approx_system(es), r);
  CHECK(float_reps.size() == 7);
}

TEST_CASE("wsp margins stay positive for the dyadic comb") {
  auto margin = wsp_margin(exact_comb(make_field(IntPolynomial::parse("x-2"))), 4);
  CHECK(margin.mode == OverlapMode::exact);
  CHECK(margin.any_pair);
  CHECK(margin.overall > 0.4);
  REQUIRE(!margin.length_sum.empty());
  for (double v : margin.min_distance) CHECK(v >= margin.overall);

  auto csv = margin_csv(margin);
  CHECK(csv.rfind("length_sum,min_distance\n", 0) == 0);
}

TEST_CASE("wsp margins for the golden comb exclude the collided pairs") {
  auto margin = wsp_margin(exact_comb(golden_field()), 4);
  CHECK(margin.any_pair);
  // Pisot reciprocal: distances bounded away from zero even with overlaps.
  CHECK(margin.overall > 0.01);
}

TEST_CASE("overlap report json lists pairs and mode") {
  auto text = overlap_report_json(exact_overlaps(exact_comb(golden_field()), 3));
  CHECK(text.find("\"mode\"") != std::string::npos);
  CHECK(text.find("exact") != std::string::npos);
  CHECK(text.find("011") != std::string::npos);
}

TEST_CASE("rotation sets validate and deduplicate") {
  auto def = default_rotation_set();
  auto alpha = def.alphabet();
  CHECK(alpha.size() == 4);
  for (const auto& g : alpha) {
    CHECK(orthogonality_defect(g) <= 1e-12);
    CHECK(determinant(g) == doctest::Approx(1.0).epsilon(1e-12));
  }

  Mat bad = Mat::identity(3);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(make_rotation_set({bad}, true), DomainError);

  // symmetric generator: transpose adds nothing
  Mat flip(3);
  flip(0, 0) = 1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  // det = -1: rejected outright
  CHECK_THROWS_AS(make_rotation_set({flip}, true), DomainError);

  auto comm = commuting_rotation_set();
  CHECK(comm.alphabet().size() == 4);
  for (const auto& a : comm.alphabet())
    for (const auto& b : comm.alphabet())
      CHECK(max_entry_dist(a * b, b * a) <= 1e-12);
}

TEST_CASE("orbit of the pole under the default generators") {
  Vec pole{1.0, 0.0, 0.0};
  auto o0 = orbit(default_rotation_set(), pole, 0);
  CHECK(o0.size() == 1);
  // one generator fixes the pole, so only three length-1 images are distinct
  auto o1 = orbit(default_rotation_set(), pole, 1);
  CHECK(o1.size() == 3);

  CHECK_THROWS_AS(orbit(default_rotation_set(), Vec{2.0, 0.0, 0.0}, 1), DomainError);
  CHECK_THROWS_AS(orbit(default_rotation_set(), Vec{1.0, 0.0}, 1), DomainError);
  CHECK_THROWS_AS(orbit(default_rotation_set(), pole, 10, 10), ResourceError);
}

TEST_CASE("orbit counts grow then saturate on a coarse mesh") {
  Vec pole{1.0, 0.0, 0.0};
  auto oc = orbit_counts(default_rotation_set(), pole, 8, 2);
  REQUIRE(oc.counts.size() == 9);
  CHECK(oc.counts[0] == 1);
  CHECK(oc.saturated);
  CHECK(oc.saturation_onset < 8);
  for (int i = 1; i <= oc.saturation_onset; ++i)
    CHECK(oc.counts[i] >= oc.counts[i - 1]);

  auto csv = orbit_csv(oc);
  CHECK(csv.rfind("n,count,log2count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("free generators spread faster than commuting ones") {
  Vec pole{1.0, 0.0, 0.0};
  auto free_counts = orbit_counts(default_rotation_set(), pole, 8, 6);
  CHECK(free_counts.eps_hat >= 0.2);
  for (std::size_t i = 1; i < free_counts.counts.size(); ++i)
    CHECK(free_counts.counts[i] > free_counts.counts[i - 1]);

  // circle orbits only grow linearly; the fitted rate dies off with depth
  auto comm = orbit_counts(commuting_rotation_set(), pole, 40, 6);
  CHECK(comm.eps_hat <= 0.05);
  CHECK(comm.eps_hat >= 0.0);
}

TEST_CASE("sg attractor of a trivial rotation set stays low dimensional") {
  auto rot = make_rotation_set({Mat::identity(3)}, false);
  auto sg = sg_attractor(0.5, rot, Vec{1.0, 0.0, 0.0}, 6);
  CHECK(sg.estimate.slope < 0.5);
  CHECK(sg.cloud.size() > 0);
  CHECK(sg.target_dim >= 0.0);
}

TEST_CASE("sg attractor rejects contractions too close to one") {
  CHECK_THROWS_AS(
      sg_attractor(0.99999, default_rotation_set(), Vec{1.0, 0.0, 0.0}, 7),
      ResourceError);
}
