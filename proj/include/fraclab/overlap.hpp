#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/exact.hpp"
#include "fraclab/ifs.hpp"

namespace fraclab {

enum class OverlapMode { floating, exact };

struct OverlapPair {
  Word word_a;  // earlier word in (length, lexicographic) order
  Word word_b;
  double map_distance = 0.0;  // 0 in exact mode
};

// Similarity with algebraic data: the scale and translation coordinates live
// in Q(lambda), the rotation is a rational orthogonal matrix.
struct ExactSimilarity {
  FieldElem scale;
  std::vector<Rational> rot;  // row-major d x d
  std::vector<FieldElem> trans;
};

class ExactSystem {
 public:
  ExactSystem(FieldPtr field, std::vector<ExactSimilarity> maps, std::size_t dim);

  const FieldPtr& field() const { return field_; }
  const std::vector<ExactSimilarity>& maps() const { return maps_; }
  std::size_t dim() const { return dim_; }

  ExactSimilarity compose_word(const Word& w) const;

 private:
  FieldPtr field_;
  std::vector<ExactSimilarity> maps_;
  std::size_t dim_;
};

// The comb pair lambda x and lambda x + (1 - lambda, 0) over Q(lambda).
ExactSystem exact_comb(const FieldPtr& field);

// Float shadow of an exact system (for stopping-set enumeration); carries no
// condensation set.
IfsSystem approx_system(const ExactSystem& sys);

struct OverlapReport {
  std::vector<OverlapPair> pairs;  // sorted by (length sum, word_a, word_b)
  OverlapMode mode = OverlapMode::floating;
  double tolerance = 0.0;
  int max_len = 0;
};

// All pairs of distinct words with lengths <= max_len whose composed maps
// coincide: exactly in exact mode, within tol under the map sup metric in
// float mode.  The listed pairs are closed under symmetry of the underlying
// relation (each unordered pair appears once, canonically ordered) and
// transitivity within max_len.
OverlapReport exact_overlaps(const IfsSystem& sys, int max_len, double tol = 1e-9);
OverlapReport exact_overlaps(const ExactSystem& sys, int max_len);

// One representative per class of equal composed maps in the stopping set at
// scale r; the representative is the lexicographically least word.
std::vector<Word> reduced_words(const IfsSystem& sys, double r,
                                const EnumBudget& budget = {});
std::vector<Word> reduced_words(const ExactSystem& sys, double r,
                                const EnumBudget& budget = {});

struct WspMargin {
  std::vector<int> length_sum;       // bucket labels |I| + |J|
  std::vector<double> min_distance;  // per-bucket minimum
  double overall = 0.0;              // min over buckets; 0 kept only for "no pairs"
  bool any_pair = false;
  OverlapMode mode = OverlapMode::floating;
  double tolerance = 0.0;
  int max_len = 0;
};

// Distance of S_I^{-1} S_J from the identity over all non-equivalent word
// pairs with lengths <= max_len, measured as the max of |scale ratio - 1|,
// the orthogonal-part entry distance, and the sup norm of the residual
// translation.  Equivalent pairs (exactly equal maps, or within tol in float
// mode) are excluded before taking minima.
WspMargin wsp_margin(const IfsSystem& sys, int max_len, double tol = 1e-9);
WspMargin wsp_margin(const ExactSystem& sys, int max_len);

// Header length_sum,min_distance.
std::string margin_csv(const WspMargin& margin);

std::string overlap_report_json(const OverlapReport& report);

}  // namespace fraclab
