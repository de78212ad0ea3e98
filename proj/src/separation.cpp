#include "fraclab/separation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>
#include <tuple>

#include "fraclab/boxcount.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/ifs.hpp"

namespace fraclab {

namespace {

constexpr int kMaxMaterialN = 24;  // 2^24 values is the in-memory ceiling
constexpr int kMaxStreamN = 30;

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("lambda must lie in (0,1)");
}

// terms[k] multiplies bit k of a word: (1-lambda) * lambda^k.
std::vector<double> word_terms(double lambda, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  double p = 1.0 - lambda;
  for (int k = 0; k < n; ++k) {
    t[static_cast<std::size_t>(k)] = p;
    p *= lambda;
  }
  return t;
}

double compensated_sum(std::uint32_t w, const std::vector<double>& terms,
                       int base) {
  double s = 0.0, comp = 0.0;
  for (int k = 0; w != 0; ++k, w >>= 1) {
    if (w & 1u) {
      double y = terms[static_cast<std::size_t>(base + k)] - comp;
      double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
  }
  return s;
}

struct ValueWord {
  double v;
  std::uint32_t w;
};

// All 2^n word sums, sorted by (value, word).  Each value is assembled from
// two half-depth compensated sums, so the only uncompensated rounding is the
// final addition.
std::vector<ValueWord> all_sums(double lambda, int n) {
  check_lambda(lambda);
  if (n < 0) throw DomainError("word length must be nonnegative");
  if (n > kMaxMaterialN)
    throw ResourceError("word sums materialise 2^n values; length capped at 24");
  auto terms = word_terms(lambda, n);
  int n1 = n / 2, n2 = n - n1;
  std::vector<double> lo(std::size_t{1} << n1), hi(std::size_t{1} << n2);
  for (std::uint32_t w = 0; w < lo.size(); ++w)
    lo[w] = compensated_sum(w, terms, 0);
  for (std::uint32_t w = 0; w < hi.size(); ++w)
    hi[w] = compensated_sum(w, terms, n1);
  std::vector<ValueWord> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint32_t b = 0; b < hi.size(); ++b)
    for (std::uint32_t a = 0; a < lo.size(); ++a)
      out.push_back({lo[a] + hi[b], a | (b << n1)});
  std::sort(out.begin(), out.end(), [](const ValueWord& x, const ValueWord& y) {
    return x.v != y.v ? x.v < y.v : x.w < y.w;
  });
  return out;
}

std::uint64_t neighbour_threshold_pairs(const std::vector<double>& v,
                                        double thr) {
  std::uint64_t unordered = 0;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    while (v[i] - v[lo] > thr) ++lo;
    unordered += i - lo;
  }
  return 2 * unordered;
}

}  // namespace

std::string word_bits_to_string(std::uint32_t w, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int k = 0; k < n; ++k)
    if (w >> k & 1u) s[static_cast<std::size_t>(k)] = '1';
  return s;
}

SumSet sum_set(double lambda, int n, double dedup_tol) {
  if (dedup_tol < 0.0) throw DomainError("dedup tolerance must be nonnegative");
  auto pairs = all_sums(lambda, n);
  SumSet out;
  out.lambda = lambda;
  out.n = n;
  out.values.reserve(pairs.size());
  out.words.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!out.values.empty() && p.v - out.values.back() <= dedup_tol) continue;
    out.values.push_back(p.v);
    out.words.push_back(p.w);
  }
  return out;
}

std::uint64_t r2_count(double s, double lambda, int n) {
  if (s < 0.0) throw DomainError("pair radius must be nonnegative");
  if (n < 1) throw DomainError("word length must be positive");
  auto set = sum_set(lambda, n, 0.0);
  return neighbour_threshold_pairs(set.values, s * std::exp2(-n));
}

std::uint64_t t_count(double s, double lambda, int n) {
  if (s < 0.0) throw DomainError("pair radius must be nonnegative");
  if (n < 1) throw DomainError("word length must be positive");
  auto set = sum_set(lambda, n, 0.0);
  double thr = s * std::exp2(-n);
  const auto& v = set.values;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool close = (i > 0 && v[i] - v[i - 1] <= thr) ||
                 (i + 1 < v.size() && v[i + 1] - v[i] <= thr);
    if (close) ++count;
  }
  return count;
}

GapReport gap_report(double lambda, int n) {
  check_lambda(lambda);
  if (n < 1) throw DomainError("word length must be positive");
  if (n > kMaxStreamN) throw ResourceError("word length capped at 30");
  GapReport rep;
  rep.n = n;
  rep.min_gap = std::numeric_limits<double>::infinity();
  if (n <= kMaxMaterialN) {
    auto pairs = all_sums(lambda, n);
    for (std::size_t i = 1; i < pairs.size(); ++i) {
      double d = pairs[i].v - pairs[i - 1].v;
      if (d < rep.min_gap) {
        rep.min_gap = d;
        rep.word_a = pairs[i - 1].w;
        rep.word_b = pairs[i].w;
        if (d == 0.0) break;
      }
    }
  } else {
    // Stream the sorted order of lo+hi from two half sets through a heap of
    // one cursor per hi value.  Slow for n near 30, but bounded memory.
    auto terms = word_terms(lambda, n);
    int n2 = 15, n1 = n - n2;
    std::vector<ValueWord> lo(std::size_t{1} << n1), hi(std::size_t{1} << n2);
    for (std::uint32_t w = 0; w < lo.size(); ++w)
      lo[w] = {compensated_sum(w, terms, 0), w};
    for (std::uint32_t w = 0; w < hi.size(); ++w)
      hi[w] = {compensated_sum(w, terms, n1), w};
    auto by_value = [](const ValueWord& x, const ValueWord& y) {
      return x.v != y.v ? x.v < y.v : x.w < y.w;
    };
    std::sort(lo.begin(), lo.end(), by_value);
    std::sort(hi.begin(), hi.end(), by_value);
    using Cursor = std::tuple<double, std::uint32_t, std::uint32_t>;  // v, i, j
    std::priority_queue<Cursor, std::vector<Cursor>, std::greater<>> heap;
    for (std::uint32_t j = 0; j < hi.size(); ++j)
      heap.emplace(lo[0].v + hi[j].v, 0u, j);
    double prev_v = 0.0;
    std::uint32_t prev_w = 0;
    bool have_prev = false;
    while (!heap.empty()) {
      auto [v, i, j] = heap.top();
      heap.pop();
      std::uint32_t w = lo[i].w | (hi[j].w << n1);
      if (have_prev) {
        double d = v - prev_v;
        if (d < rep.min_gap && w != prev_w) {
          rep.min_gap = d;
          rep.word_a = prev_w;
          rep.word_b = w;
        }
      }
      prev_v = v;
      prev_w = w;
      have_prev = true;
      if (i + 1 < lo.size()) heap.emplace(lo[i + 1].v + hi[j].v, i + 1, j);
    }
  }
  // Float arithmetic cannot certify a true collision; treat sub-rounding gaps
  // as coincident and leave certification to the exact mode.
  rep.zero_gap = rep.min_gap <= 1e-13;
  rep.scaled_gap = std::ldexp(rep.min_gap, n);
  return rep;
}

GapReport gap_report_exact(const FieldPtr& field, int n) {
  if (!field) throw DomainError("exact gap report needs a number field");
  if (n < 1) throw DomainError("word length must be positive");
  if (n > 20) throw ResourceError("exact word sums capped at length 20");
  FieldElem lam = FieldElem::lambda(field);
  FieldElem factor = FieldElem::one(field) - lam;
  std::vector<FieldElem> terms;
  terms.reserve(static_cast<std::size_t>(n));
  FieldElem pow = factor;
  for (int k = 0; k < n; ++k) {
    terms.push_back(pow);
    pow = pow * lam;
  }
  struct Entry {
    double a;
    std::uint32_t w;
    FieldElem e;
  };
  std::vector<Entry> entries;
  entries.reserve(std::size_t{1} << n);
  for (std::uint32_t w = 0; w < (1u << n); ++w) {
    FieldElem e = FieldElem::zero(field);
    for (int k = 0; k < n; ++k)
      if (w >> k & 1u) e = e + terms[static_cast<std::size_t>(k)];
    entries.push_back({e.approx(), w, std::move(e)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.a != y.a ? x.a < y.a : x.w < y.w;
  });
  GapReport rep;
  rep.n = n;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < entries.size(); ++i) {
    FieldElem diff = entries[i].e - entries[i - 1].e;
    if (diff.is_zero()) {
      rep.min_gap = 0.0;
      rep.word_a = entries[i - 1].w;
      rep.word_b = entries[i].w;
      rep.zero_gap = true;
      break;
    }
    double d = std::fabs(diff.approx());
    if (d < rep.min_gap) {
      rep.min_gap = d;
      rep.word_a = entries[i - 1].w;
      rep.word_b = entries[i].w;
    }
  }
  rep.scaled_gap = std::ldexp(rep.min_gap, n);
  return rep;
}

std::vector<double> lambda_points(double lambda, int k, double dedup_tol) {
  if (k < 0) throw DomainError("depth must be nonnegative");
  // Zero-padded words embed every shorter sum set in the length-k one, so the
  // union over lengths 0..k equals the length-k set.
  return sum_set(lambda, k, dedup_tol).values;
}

std::uint64_t well_separated_count(double lambda, int n, double kappa) {
  if (kappa < 0.0) throw DomainError("separation constant must be nonnegative");
  if (n < 1) throw DomainError("word length must be positive");
  auto set = sum_set(lambda, n, 1e-12);
  double thr = kappa / (static_cast<double>(n) * n * std::exp2(n));
  const auto& v = set.values;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool ok = (i == 0 || v[i] - v[i - 1] > thr) &&
              (i + 1 == v.size() || v[i + 1] - v[i] > thr);
    if (ok) ++count;
  }
  return count;
}

std::vector<SeparationEntry> separation_table(double lambda, int n_max,
                                              double kappa) {
  if (n_max < 1) throw DomainError("table depth must be positive");
  if (n_max > kMaxMaterialN) throw ResourceError("table depth capped at 24");
  std::vector<SeparationEntry> table;
  table.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    SeparationEntry e;
    e.n = n;
    e.count_a = sum_set(lambda, n, 1e-12).values.size();
    auto gap = gap_report(lambda, n);
    e.min_gap = gap.min_gap;
    e.scaled_gap = gap.scaled_gap;
    e.well_separated = well_separated_count(lambda, n, kappa);
    e.pass = e.well_separated >= (std::uint64_t{1} << (n - 1));
    table.push_back(e);
  }
  return table;
}

std::string table_csv(const std::vector<SeparationEntry>& table) {
  std::string out = "n,count_A,min_gap,scaled_gap,well_separated\n";
  char buf[160];
  for (const auto& e : table) {
    std::snprintf(buf, sizeof(buf), "%d,%llu,%.17g,%.17g,%llu\n", e.n,
                  static_cast<unsigned long long>(e.count_a), e.min_gap,
                  e.scaled_gap, static_cast<unsigned long long>(e.well_separated));
    out += buf;
  }
  return out;
}

ScanReport monte_carlo_scan(double lo, double hi, int samples, int n_max,
                            std::uint64_t seed, int dim_samples, int dim_m_lo,
                            int dim_m_hi) {
  if (!(lo > 0.0 && lo <= hi && hi < 1.0))
    throw DomainError("scan interval must satisfy 0 < lo <= hi < 1");
  if (samples < 1) throw DomainError("sample count must be positive");
  if (n_max < 1 || n_max > kMaxMaterialN)
    throw DomainError("table depth must lie in 1..24");
  if (dim_samples > 0 && !(dim_m_lo >= 1 && dim_m_lo + 2 <= dim_m_hi))
    throw DomainError("dimension window needs at least three mesh levels");
  ScanReport rep;
  rep.seed = seed;
  rep.n_max = n_max;
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < samples; ++i) {
    ScanRow row;
    row.lambda = lo + (hi - lo) * unit();
    row.per_n = separation_table(row.lambda, n_max);
    int passes = 0;
    for (const auto& e : row.per_n) passes += e.pass ? 1 : 0;
    row.pass_fraction = static_cast<double>(passes) / n_max;
    row.target_dim = std::log2(4.0 * row.lambda);
    if (i < dim_samples) {
      try {
        auto curve = count_curve(bernoulli_comb(row.lambda), dim_m_lo, dim_m_hi);
        if (!curve.truncated) {
          auto est = estimate_dimension(curve, dim_m_lo, dim_m_hi);
          row.has_dim = true;
          row.dim_est = est.slope;
        }
      } catch (const ResourceError&) {
        row.has_dim = false;
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string scan_csv(const ScanReport& report) {
  std::string out = "lambda,target,pass_fraction,dim_est\n";
  char buf[160];
  for (const auto& row : report.rows) {
    if (row.has_dim)
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.6g,%.12g\n", row.lambda,
                    row.target_dim, row.pass_fraction, row.dim_est);
    else
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.6g,\n", row.lambda,
                    row.target_dim, row.pass_fraction);
    out += buf;
  }
  return out;
}

}  // namespace fraclab
