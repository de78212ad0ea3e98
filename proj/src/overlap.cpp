#include "fraclab/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

#include "json.hpp"

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr std::uint64_t kMaxFloatWords = std::uint64_t{1} << 21;
constexpr std::uint64_t kMaxExactWords = 200'000;
constexpr std::uint64_t kMaxPairs = std::uint64_t{1} << 20;
constexpr std::uint64_t kMaxMarginWords = 8192;

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::uint64_t words_up_to(std::size_t nmaps, int max_len, std::uint64_t cap) {
  std::uint64_t total = 0;
  for (int l = 0; l < max_len; ++l) {
    total = (total + 1) * nmaps;
    if (total > cap)
      throw ResourceError("word enumeration exceeds the pair-scan budget");
  }
  return total;
}

// All nonempty words with length <= max_len in prefix order, with their
// composed maps.
void enumerate_with_maps(const IfsSystem& sys, int max_len, std::uint64_t cap,
                         std::vector<Word>& words, std::vector<Similarity>& sims) {
  if (max_len < 1) throw DomainError("max_len must be >= 1");
  std::uint64_t total = words_up_to(sys.maps().size(), max_len, cap);
  words.reserve(total);
  sims.reserve(total);
  Word w;
  auto rec = [&](auto&& self, const Similarity& acc) -> void {
    for (std::uint8_t i = 0; i < sys.maps().size(); ++i) {
      Similarity next = compose(acc, sys.maps()[i]);
      w.push_back(i);
      words.push_back(w);
      sims.push_back(next);
      if (static_cast<int>(w.size()) < max_len) self(self, next);
      w.pop_back();
    }
  };
  rec(rec, Similarity::identity(sys.dim()));
}

double map_distance(const Similarity& a, const Similarity& b) {
  double m = std::fabs(a.scale - b.scale);
  m = std::max(m, max_entry_dist(a.rot, b.rot));
  for (std::size_t i = 0; i < a.trans.size(); ++i)
    m = std::max(m, std::fabs(a.trans[i] - b.trans[i]));
  return m;
}

void push_pair(std::vector<OverlapPair>& pairs, const Word& a, const Word& b,
               double dist) {
  if (pairs.size() >= kMaxPairs)
    throw ResourceError("overlap pair list exceeds the reporting budget");
  if (word_less(a, b))
    pairs.push_back({a, b, dist});
  else
    pairs.push_back({b, a, dist});
}

void sort_pairs(std::vector<OverlapPair>& pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const OverlapPair& x, const OverlapPair& y) {
              std::size_t lx = x.word_a.size() + x.word_b.size();
              std::size_t ly = y.word_a.size() + y.word_b.size();
              if (lx != ly) return lx < ly;
              if (x.word_a != y.word_a) return word_less(x.word_a, y.word_a);
              return word_less(x.word_b, y.word_b);
            });
}

std::vector<Rational> rat_matmul(std::size_t d, const std::vector<Rational>& a,
                                 const std::vector<Rational>& b) {
  std::vector<Rational> r(d * d, Rational(0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (a[i * d + k] == 0) continue;
      for (std::size_t j = 0; j < d; ++j)
        r[i * d + j] += a[i * d + k] * b[k * d + j];
    }
  return r;
}

std::vector<FieldElem> rat_apply(std::size_t d, const std::vector<Rational>& m,
                                 const std::vector<FieldElem>& x,
                                 const FieldPtr& field) {
  std::vector<FieldElem> y(d, FieldElem::zero(field));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (m[i * d + j] == 0) continue;
      y[i] = y[i] + FieldElem::from_rational(field, m[i * d + j]) * x[j];
    }
  return y;
}

ExactSimilarity exact_compose(const FieldPtr& field, std::size_t d,
                              const ExactSimilarity& a, const ExactSimilarity& b) {
  ExactSimilarity r;
  r.scale = a.scale * b.scale;
  r.rot = rat_matmul(d, a.rot, b.rot);
  r.trans = rat_apply(d, a.rot, b.trans, field);
  for (std::size_t i = 0; i < d; ++i)
    r.trans[i] = a.scale * r.trans[i] + a.trans[i];
  return r;
}

ExactSimilarity exact_identity(const FieldPtr& field, std::size_t d) {
  ExactSimilarity e;
  e.scale = FieldElem::one(field);
  e.rot.assign(d * d, Rational(0));
  for (std::size_t i = 0; i < d; ++i) e.rot[i * d + i] = 1;
  e.trans.assign(d, FieldElem::zero(field));
  return e;
}

// Flattened exact coordinates; equal vectors exactly when the maps coincide.
std::vector<Rational> exact_key(const ExactSimilarity& s) {
  std::vector<Rational> key;
  key.reserve(s.scale.coords().size() * (1 + s.trans.size()) + s.rot.size());
  for (const auto& c : s.scale.coords()) key.push_back(c);
  for (const auto& r : s.rot) key.push_back(r);
  for (const auto& t : s.trans)
    for (const auto& c : t.coords()) key.push_back(c);
  return key;
}

void enumerate_exact(const ExactSystem& sys, int max_len, std::vector<Word>& words,
                     std::vector<ExactSimilarity>& sims) {
  if (max_len < 1) throw DomainError("max_len must be >= 1");
  std::uint64_t total = words_up_to(sys.maps().size(), max_len, kMaxExactWords);
  words.reserve(total);
  sims.reserve(total);
  Word w;
  auto rec = [&](auto&& self, const ExactSimilarity& acc) -> void {
    for (std::uint8_t i = 0; i < sys.maps().size(); ++i) {
      ExactSimilarity next =
          exact_compose(sys.field(), sys.dim(), acc, sys.maps()[i]);
      w.push_back(i);
      words.push_back(w);
      sims.push_back(next);
      if (static_cast<int>(w.size()) < max_len) self(self, next);
      w.pop_back();
    }
  };
  rec(rec, exact_identity(sys.field(), sys.dim()));
}

std::vector<std::int64_t> quantized_key(const Similarity& s) {
  const double q = 1e9;
  std::vector<std::int64_t> key;
  key.reserve(1 + s.rot.data().size() + s.trans.size());
  key.push_back(std::llround(s.scale * q));
  for (double v : s.rot.data()) key.push_back(std::llround(v * q));
  for (double v : s.trans) key.push_back(std::llround(v * q));
  return key;
}

struct InverseGap {
  // Distance of S_a^{-1} S_b from the identity.
  static double eval(const Similarity& a, const Similarity& b) {
    double m = std::fabs(b.scale / a.scale - 1.0);
    Mat rel = a.rot.transposed() * b.rot;
    m = std::max(m, max_entry_dist(rel, Mat::identity(a.rot.dim())));
    Vec diff = b.trans - a.trans;
    Vec res = a.rot.transposed().apply(diff);
    for (double v : res) m = std::max(m, std::fabs(v) / a.scale);
    return m;
  }
  // Either orientation of the unordered pair.
  static double both(const Similarity& a, const Similarity& b) {
    return std::min(eval(a, b), eval(b, a));
  }
};

WspMargin margin_scan(const std::vector<Word>& words,
                      const std::vector<Similarity>& sims, int max_len,
                      const std::vector<std::size_t>* class_of, double tol) {
  WspMargin out;
  out.max_len = max_len;
  std::vector<double> bucket(2 * static_cast<std::size_t>(max_len) + 1,
                             std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      if (class_of != nullptr) {
        if ((*class_of)[i] == (*class_of)[j]) continue;
      }
      double d = InverseGap::both(sims[i], sims[j]);
      if (class_of == nullptr && d <= tol) continue;  // float-mode equivalence
      std::size_t ls = words[i].size() + words[j].size();
      if (d < bucket[ls]) bucket[ls] = d;
    }
  double overall = std::numeric_limits<double>::infinity();
  for (std::size_t ls = 2; ls < bucket.size(); ++ls) {
    if (!std::isfinite(bucket[ls])) continue;
    out.length_sum.push_back(static_cast<int>(ls));
    out.min_distance.push_back(bucket[ls]);
    overall = std::min(overall, bucket[ls]);
  }
  out.any_pair = !out.length_sum.empty();
  out.overall = out.any_pair ? overall : 0.0;
  return out;
}

}  // namespace

ExactSystem::ExactSystem(FieldPtr field, std::vector<ExactSimilarity> maps,
                         std::size_t dim)
    : field_(std::move(field)), maps_(std::move(maps)), dim_(dim) {
  if (!field_) throw DomainError("exact system needs a number field");
  if (maps_.empty()) throw DomainError("exact system needs at least one map");
  for (const auto& m : maps_) {
    if (m.rot.size() != dim_ * dim_ || m.trans.size() != dim_)
      throw DomainError("exact map dimensions disagree");
    double c = m.scale.approx();
    if (!(c > 0.0 && c < 1.0))
      throw DomainError("exact map scales must lie in (0,1)");
  }
}

ExactSimilarity ExactSystem::compose_word(const Word& w) const {
  ExactSimilarity acc = exact_identity(field_, dim_);
  for (std::uint8_t i : w) {
    if (i >= maps_.size()) throw DomainError("word letter out of range");
    acc = exact_compose(field_, dim_, acc, maps_[i]);
  }
  return acc;
}

ExactSystem exact_comb(const FieldPtr& field) {
  if (!field) throw DomainError("exact comb needs a number field");
  FieldElem lam = FieldElem::lambda(field);
  double l = lam.approx();
  if (!(l > 0.0 && l < 1.0))
    throw DomainError("comb contraction must lie in (0,1)");
  ExactSimilarity s0 = exact_identity(field, 2);
  s0.scale = lam;
  ExactSimilarity s1 = s0;
  s1.trans[0] = FieldElem::one(field) - lam;
  return ExactSystem(field, {s0, s1}, 2);
}

IfsSystem approx_system(const ExactSystem& sys) {
  std::vector<Similarity> maps;
  maps.reserve(sys.maps().size());
  std::size_t d = sys.dim();
  for (const auto& em : sys.maps()) {
    Similarity s;
    s.scale = em.scale.approx();
    s.rot = Mat(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        s.rot(i, j) = static_cast<double>(em.rot[i * d + j]);
    s.trans.resize(d);
    for (std::size_t i = 0; i < d; ++i) s.trans[i] = em.trans[i].approx();
    maps.push_back(std::move(s));
  }
  return IfsSystem(std::move(maps), std::nullopt, "exact-shadow");
}

OverlapReport exact_overlaps(const IfsSystem& sys, int max_len, double tol) {
  if (!(tol > 0.0)) throw DomainError("float tolerance must be positive");
  std::vector<Word> words;
  std::vector<Similarity> sims;
  enumerate_with_maps(sys, max_len, kMaxFloatWords, words, sims);
  std::vector<std::size_t> order(words.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&sims](std::size_t x, std::size_t y) {
    return sims[x].scale < sims[y].scale;
  });
  OverlapReport rep;
  rep.mode = OverlapMode::floating;
  rep.tolerance = tol;
  rep.max_len = max_len;
  // Scale buckets: a chain break of more than tol separates every
  // cross-bucket pair by more than tol already.
  std::size_t lo = 0;
  while (lo < order.size()) {
    std::size_t hi = lo + 1;
    while (hi < order.size() &&
           sims[order[hi]].scale - sims[order[hi - 1]].scale <= tol)
      ++hi;
    std::vector<std::size_t> bucket(order.begin() + lo, order.begin() + hi);
    std::sort(bucket.begin(), bucket.end(), [&sims](std::size_t x, std::size_t y) {
      return sims[x].trans[0] < sims[y].trans[0];
    });
    for (std::size_t i = 0; i < bucket.size(); ++i)
      for (std::size_t j = i + 1; j < bucket.size(); ++j) {
        if (sims[bucket[j]].trans[0] - sims[bucket[i]].trans[0] > tol) break;
        double d = map_distance(sims[bucket[i]], sims[bucket[j]]);
        if (d <= tol) push_pair(rep.pairs, words[bucket[i]], words[bucket[j]], d);
      }
    lo = hi;
  }
  sort_pairs(rep.pairs);
  return rep;
}

OverlapReport exact_overlaps(const ExactSystem& sys, int max_len) {
  std::vector<Word> words;
  std::vector<ExactSimilarity> sims;
  enumerate_exact(sys, max_len, words, sims);
  std::map<std::vector<Rational>, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < sims.size(); ++i)
    classes[exact_key(sims[i])].push_back(i);
  OverlapReport rep;
  rep.mode = OverlapMode::exact;
  rep.tolerance = 0.0;
  rep.max_len = max_len;
  for (const auto& [key, members] : classes) {
    if (members.size() < 2) continue;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        push_pair(rep.pairs, words[members[i]], words[members[j]], 0.0);
  }
  sort_pairs(rep.pairs);
  return rep;
}

std::vector<Word> reduced_words(const IfsSystem& sys, double r,
                                const EnumBudget& budget) {
  auto words = stopping_set(sys, r, budget);
  std::map<std::vector<std::int64_t>, std::size_t> seen;
  std::vector<Word> out;
  for (auto& w : words) {
    auto key = quantized_key(compose(sys, w));
    if (seen.emplace(std::move(key), out.size()).second) out.push_back(std::move(w));
  }
  return out;
}

std::vector<Word> reduced_words(const ExactSystem& sys, double r,
                                const EnumBudget& budget) {
  auto words = stopping_set(approx_system(sys), r, budget);
  std::map<std::vector<Rational>, std::size_t> seen;
  std::vector<Word> out;
  for (auto& w : words) {
    auto key = exact_key(sys.compose_word(w));
    if (seen.emplace(std::move(key), out.size()).second) out.push_back(std::move(w));
  }
  return out;
}

WspMargin wsp_margin(const IfsSystem& sys, int max_len, double tol) {
  if (!(tol > 0.0)) throw DomainError("float tolerance must be positive");
  WspMargin empty;
  empty.mode = OverlapMode::floating;
  empty.tolerance = tol;
  empty.max_len = max_len;
  if (sys.maps().size() < 2) return empty;
  std::vector<Word> words;
  std::vector<Similarity> sims;
  enumerate_with_maps(sys, max_len, kMaxMarginWords, words, sims);
  WspMargin out = margin_scan(words, sims, max_len, nullptr, tol);
  out.mode = OverlapMode::floating;
  out.tolerance = tol;
  return out;
}

WspMargin wsp_margin(const ExactSystem& sys, int max_len) {
  WspMargin empty;
  empty.mode = OverlapMode::exact;
  empty.max_len = max_len;
  if (sys.maps().size() < 2) return empty;
  std::vector<Word> words;
  std::vector<ExactSimilarity> esims;
  enumerate_exact(sys, max_len, words, esims);
  if (words.size() > kMaxMarginWords)
    throw ResourceError("word list too large for the pairwise margin scan");
  std::map<std::vector<Rational>, std::size_t> class_ids;
  std::vector<std::size_t> class_of(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto key = exact_key(esims[i]);
    auto [it, fresh] = class_ids.emplace(std::move(key), class_ids.size());
    class_of[i] = it->second;
  }
  std::vector<Similarity> sims;
  sims.reserve(words.size());
  IfsSystem shadow = approx_system(sys);
  for (const auto& w : words) sims.push_back(compose(shadow, w));
  WspMargin out = margin_scan(words, sims, max_len, &class_of, 0.0);
  out.mode = OverlapMode::exact;
  out.tolerance = 0.0;
  return out;
}

std::string margin_csv(const WspMargin& margin) {
  std::string out = "length_sum,min_distance\n";
  char buf[80];
  for (std::size_t i = 0; i < margin.length_sum.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", margin.length_sum[i],
                  margin.min_distance[i]);
    out += buf;
  }
  return out;
}

std::string overlap_report_json(const OverlapReport& report) {
  nlohmann::json j;
  j["mode"] = report.mode == OverlapMode::exact ? "exact" : "float";
  j["tolerance"] = report.tolerance;
  j["max_len"] = report.max_len;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    nlohmann::json jp;
    jp["a"] = word_to_string(p.word_a);
    jp["b"] = word_to_string(p.word_b);
    jp["map_distance"] = p.map_distance;
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  return j.dump(2);
}

}  // namespace fraclab
