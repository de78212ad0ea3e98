#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/exact.hpp"

namespace fraclab {

// Binary words of length n are packed into a uint32 with i_k at bit k-1; the
// word's sum value is (1-lambda) * sum_k i_k lambda^{k-1}.
std::string word_bits_to_string(std::uint32_t w, int n);

struct SumSet {
  double lambda = 0.0;
  int n = 0;
  std::vector<double> values;          // sorted, deduplicated
  std::vector<std::uint32_t> words;    // one generating word per value
};

// All 2^n subset sums, deduplicated at dedup_tol (0 = exact duplicates only).
// Full materialisation is limited to n <= 24.
SumSet sum_set(double lambda, int n, double dedup_tol = 1e-12);

// Ordered pairs a != b from the value set with |a-b| <= s * 2^-n.
std::uint64_t r2_count(double s, double lambda, int n);
// Values admitting at least one distinct neighbour within s * 2^-n.
std::uint64_t t_count(double s, double lambda, int n);

struct GapReport {
  int n = 0;
  double min_gap = 0.0;
  double scaled_gap = 0.0;  // min_gap * 2^n
  std::uint32_t word_a = 0, word_b = 0;
  bool zero_gap = false;  // the witnesses produce the same value
};

// Minimal distance over distinct word pairs, with witnesses.  n <= 24 works
// in memory; 25..30 streams the sorted sum order from two half-depth sets
// through a heap, which is slow but bounded.
GapReport gap_report(double lambda, int n);
// Exact-arithmetic variant; collisions are detected as true zeros.  n <= 20.
GapReport gap_report_exact(const FieldPtr& field, int n);

// Base points of all words of length 0..k (union of the length-l sum sets).
std::vector<double> lambda_points(double lambda, int k, double dedup_tol = 1e-12);

// Values whose nearest distinct neighbour is farther than kappa / (n^2 2^n).
std::uint64_t well_separated_count(double lambda, int n, double kappa);

struct SeparationEntry {
  int n = 0;
  std::uint64_t count_a = 0;
  double min_gap = 0.0;
  double scaled_gap = 0.0;
  std::uint64_t well_separated = 0;
  bool pass = false;  // well_separated >= 2^{n-1}
};

std::vector<SeparationEntry> separation_table(double lambda, int n_max,
                                              double kappa = 1.0);
// Header n,count_A,min_gap,scaled_gap,well_separated.
std::string table_csv(const std::vector<SeparationEntry>& table);

struct ScanRow {
  double lambda = 0.0;
  std::vector<SeparationEntry> per_n;  // n = 1..n_max
  double pass_fraction = 0.0;
  double target_dim = 0.0;  // log2(4 lambda)
  bool has_dim = false;
  double dim_est = 0.0;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  std::uint64_t seed = 0;
  int n_max = 0;
};

// Uniform lambda samples in [lo, hi]; deterministic for a given seed.  The
// first dim_samples rows also carry a box-dimension estimate of the comb
// attractor over mesh exponents [dim_m_lo, dim_m_hi].
ScanReport monte_carlo_scan(double lo, double hi, int samples, int n_max,
                            std::uint64_t seed = 0xF1D0, int dim_samples = 0,
                            int dim_m_lo = 8, int dim_m_hi = 13);

// Per-lambda summary, header lambda,target,pass_fraction,dim_est.
std::string scan_csv(const ScanReport& report);

}  // namespace fraclab
