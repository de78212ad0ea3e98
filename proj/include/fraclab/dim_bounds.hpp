#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/ifs.hpp"

namespace fraclab {

// Unique s >= 0 with sum of ratios^s equal to 1, to 1e-12.
double similarity_dimension(const std::vector<double>& ratios);

// Data feeding the envelope bound: s the similarity dimension, alpha the
// dimension of the homogeneous attractor, beta the upper box dimension of the
// condensation set, gamma the growth rate of distinct linear parts, d the
// ambient dimension.
struct BoundInputs {
  double s = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int d = 1;
};

// Enforces alpha <= min(s, d), gamma <= s, beta <= d, all nonnegative, d >= 1;
// DomainError names the violated constraint.
void validate(const BoundInputs& inp);

struct LinearTerm {
  double slope = 0.0;
  double intercept = 0.0;
  double at(double x) const { return slope * x + intercept; }
};

// The four affine functions of x in [0,1] whose pointwise minimum is
// maximised:  x s + (1-x) beta,  x alpha + (1-x) d,
// alpha + (1-x)(beta + d - 1),  alpha + x gamma + (1-x) beta.
std::array<LinearTerm, 4> envelope_terms(const BoundInputs& inp);

struct MaxMinResult {
  double value = 0.0;
  double argmax_x = 0.0;             // smallest maximiser
  std::vector<int> active_terms;     // 1-based indices attaining the minimum
};

// Exact max over [0,1] of the pointwise minimum of affine terms, evaluated at
// the endpoints and all pairwise intersections; no numerical search.
MaxMinResult envelope_max_min(const std::vector<LinearTerm>& terms);

MaxMinResult thm1_bound(const BoundInputs& inp);

enum class Corollary { cor2, cor3, cor4 };

// Closed forms for special cases of the envelope bound.
//   cor2 (commuting linear parts, needs gamma = 0):  max(beta, alpha + beta - alpha beta / s)
//   cor3 (point condensation, needs beta = 0):       d'/(1 + (d' - alpha)/s), d' = min(d, alpha + d - 1)
//   cor4 (common fixed point, needs alpha = beta = 0): (d-1)/(1 + (d-1)/s)
// DomainError names the failed hypothesis.
double corollary_bound(Corollary which, const BoundInputs& inp);

struct Sandwich {
  double lower = 0.0;  // max(alpha, beta)
  double upper = 0.0;  // max(s, beta)
};
Sandwich classical_sandwich(double s, double alpha, double beta);

// Similarity dimension of the reduced stopping set at scale r: solves
// sum over class representatives of c_I^a = 1.
double alpha_r(const IfsSystem& sys, double r, const EnumBudget& budget = {});

struct ModifiedDimension {
  std::vector<double> r_values;
  std::vector<double> alphas;   // alpha(r) per schedule entry
  double s_star = 0.0;          // final alpha reached
  bool monotone = true;         // nonincreasing within 1e-9
  bool truncated = false;       // budget ended the schedule early
};

ModifiedDimension modified_similarity_dimension(const IfsSystem& sys,
                                                const std::vector<double>& r_schedule,
                                                const EnumBudget& budget = {});

struct GammaEstimate {
  std::vector<int> k;
  std::vector<std::uint64_t> counts;  // distinct (scale, rotation) pairs per level
  double gamma_hat = 0.0;             // slope of log2 count against k over k >= 4
  bool fit_valid = false;
};

GammaEstimate gamma_estimate(const IfsSystem& sys, int k_max,
                             const EnumBudget& budget = {});

// Inputs, term coefficients, candidate breakpoints, the bound, and whichever
// closed forms apply, as a JSON document.
std::string bounds_report_json(const BoundInputs& inp);

}  // namespace fraclab
