#include "fraclab/dim_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"

#include "fraclab/errors.hpp"
#include "fraclab/overlap.hpp"

namespace fraclab {

namespace {

// Root of a strictly decreasing function via bisection on [lo, hi].
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  if (flo <= 0.0) return lo;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double similarity_dimension(const std::vector<double>& ratios) {
  if (ratios.empty()) throw DomainError("ratio list must be nonempty");
  for (double c : ratios)
    if (!(c > 0.0 && c < 1.0)) throw DomainError("ratios must lie in (0,1)");
  auto excess = [&ratios](double s) {
    double acc = -1.0;
    for (double c : ratios) acc += std::pow(c, s);
    return acc;
  };
  double hi = 1.0;
  while (excess(hi) > 0.0) hi *= 2.0;
  return bisect_decreasing(excess, 0.0, hi, 1e-13);
}

void validate(const BoundInputs& inp) {
  if (inp.d < 1) throw DomainError("ambient dimension d must be >= 1");
  if (!(inp.s >= 0.0)) throw DomainError("s must be >= 0");
  if (!(inp.alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  if (!(inp.beta >= 0.0)) throw DomainError("beta must be >= 0");
  if (!(inp.gamma >= 0.0)) throw DomainError("gamma must be >= 0");
  if (inp.alpha > std::min(inp.s, static_cast<double>(inp.d)))
    throw DomainError("alpha must be <= min(s, d)");
  if (inp.gamma > inp.s) throw DomainError("gamma must be <= s");
  if (inp.beta > static_cast<double>(inp.d))
    throw DomainError("beta must be <= d");
}

std::array<LinearTerm, 4> envelope_terms(const BoundInputs& inp) {
  validate(inp);
  double d = static_cast<double>(inp.d);
  return {LinearTerm{inp.s - inp.beta, inp.beta},
          LinearTerm{inp.alpha - d, d},
          LinearTerm{-(inp.beta + d - 1.0), inp.alpha + inp.beta + d - 1.0},
          LinearTerm{inp.gamma - inp.beta, inp.alpha + inp.beta}};
}

MaxMinResult envelope_max_min(const std::vector<LinearTerm>& terms) {
  if (terms.empty()) throw DomainError("envelope needs at least one term");
  // The lower envelope of affine functions is concave, so its maximum over
  // [0,1] is attained at an endpoint or where two terms cross.
  std::vector<double> xs = {0.0, 1.0};
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      double ds = terms[i].slope - terms[j].slope;
      if (ds == 0.0) continue;
      double x = (terms[j].intercept - terms[i].intercept) / ds;
      if (x > 0.0 && x < 1.0) xs.push_back(x);
    }
  std::sort(xs.begin(), xs.end());
  auto lower = [&terms](double x) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : terms) m = std::min(m, t.at(x));
    return m;
  };
  MaxMinResult res;
  res.value = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    double v = lower(x);
    if (v > res.value) {
      res.value = v;
      res.argmax_x = x;
    }
  }
  double slack = 1e-12 * std::max(1.0, std::fabs(res.value));
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i].at(res.argmax_x) <= res.value + slack)
      res.active_terms.push_back(static_cast<int>(i) + 1);
  return res;
}

MaxMinResult thm1_bound(const BoundInputs& inp) {
  auto t = envelope_terms(inp);
  return envelope_max_min(std::vector<LinearTerm>(t.begin(), t.end()));
}

double corollary_bound(Corollary which, const BoundInputs& inp) {
  validate(inp);
  double d = static_cast<double>(inp.d);
  switch (which) {
    case Corollary::cor2: {
      if (inp.gamma != 0.0)
        throw DomainError("cor2 requires gamma = 0 (commuting linear parts)");
      double cross = inp.s == 0.0
                         ? inp.beta
                         : inp.alpha + inp.beta - inp.alpha * inp.beta / inp.s;
      return std::max(inp.beta, cross);
    }
    case Corollary::cor3: {
      if (inp.beta != 0.0)
        throw DomainError("cor3 requires beta = 0 (point condensation)");
      double dp = std::min(d, inp.alpha + d - 1.0);
      if (dp == 0.0 || inp.s == 0.0) return inp.alpha;
      return dp / (1.0 + (dp - inp.alpha) / inp.s);
    }
    case Corollary::cor4: {
      if (inp.alpha != 0.0)
        throw DomainError("cor4 requires alpha = 0 (common fixed point)");
      if (inp.beta != 0.0)
        throw DomainError("cor4 requires beta = 0 (common fixed point)");
      double dd = d - 1.0;
      if (dd == 0.0 || inp.s == 0.0) return 0.0;
      return dd / (1.0 + dd / inp.s);
    }
  }
  throw DomainError("unknown corollary selector");
}

Sandwich classical_sandwich(double s, double alpha, double beta) {
  if (!(s >= 0.0 && alpha >= 0.0 && beta >= 0.0))
    throw DomainError("sandwich inputs must be >= 0");
  return {std::max(alpha, beta), std::max(s, beta)};
}

double alpha_r(const IfsSystem& sys, double r, const EnumBudget& budget) {
  auto words = reduced_words(sys, r, budget);
  std::vector<double> ratios;
  ratios.reserve(words.size());
  for (const auto& w : words) ratios.push_back(compose(sys, w).scale);
  std::vector<double> full;
  for (const auto& m : sys.maps()) full.push_back(m.scale);
  double hi = static_cast<double>(sys.dim()) + similarity_dimension(full) + 1.0;
  auto excess = [&ratios](double a) {
    double acc = -1.0;
    for (double c : ratios) acc += std::pow(c, a);
    return acc;
  };
  return bisect_decreasing(excess, 0.0, hi, 1e-12);
}

ModifiedDimension modified_similarity_dimension(const IfsSystem& sys,
                                                const std::vector<double>& r_schedule,
                                                const EnumBudget& budget) {
  if (r_schedule.empty()) throw DomainError("r schedule must be nonempty");
  for (std::size_t i = 0; i < r_schedule.size(); ++i) {
    double r = r_schedule[i];
    if (!(r > 0.0 && r < 1.0))
      throw DomainError("r schedule values must lie in (0,1)");
    if (i > 0 && !(r < r_schedule[i - 1]))
      throw DomainError("r schedule must be strictly decreasing");
  }
  ModifiedDimension out;
  for (double r : r_schedule) {
    double a;
    try {
      a = alpha_r(sys, r, budget);
    } catch (const ResourceError&) {
      out.truncated = true;
      break;
    }
    if (!out.alphas.empty() && a > out.alphas.back() + 1e-9) out.monotone = false;
    out.r_values.push_back(r);
    out.alphas.push_back(a);
  }
  if (out.alphas.empty())
    throw ResourceError("no schedule entry fit in the enumeration budget");
  out.s_star = out.alphas.back();
  return out;
}

GammaEstimate gamma_estimate(const IfsSystem& sys, int k_max,
                             const EnumBudget& budget) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  GammaEstimate out;
  const double q = 1e9;  // dedup grid for (scale, rotation) entries
  for (int k = 1; k <= k_max; ++k) {
    auto words = level_set(sys, k, budget);
    std::set<std::vector<std::int64_t>> parts;
    for (const auto& w : words) {
      Similarity s = compose(sys, w);
      std::vector<std::int64_t> key;
      key.reserve(1 + s.rot.data().size());
      key.push_back(std::llround(s.scale * q));
      for (double v : s.rot.data()) key.push_back(std::llround(v * q));
      parts.insert(std::move(key));
    }
    out.k.push_back(k);
    out.counts.push_back(parts.size());
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int npts = 0;
  for (std::size_t i = 0; i < out.k.size(); ++i) {
    if (out.k[i] < 4 || out.counts[i] == 0) continue;
    double x = out.k[i];
    double y = std::log2(static_cast<double>(out.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++npts;
  }
  if (npts >= 2) {
    double Vxx = sxx - sx * sx / npts;
    if (Vxx > 0.0) {
      out.gamma_hat = (sxy - sx * sy / npts) / Vxx;
      out.fit_valid = true;
    }
  }
  return out;
}

std::string bounds_report_json(const BoundInputs& inp) {
  auto terms = envelope_terms(inp);
  auto res = thm1_bound(inp);
  nlohmann::json j;
  j["inputs"] = {{"s", inp.s},
                 {"alpha", inp.alpha},
                 {"beta", inp.beta},
                 {"gamma", inp.gamma},
                 {"d", inp.d}};
  nlohmann::json jt = nlohmann::json::array();
  for (const auto& t : terms)
    jt.push_back({{"slope", t.slope}, {"intercept", t.intercept}});
  j["envelope_terms"] = jt;
  std::vector<double> xs = {0.0, 1.0};
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t k = i + 1; k < terms.size(); ++k) {
      double ds = terms[i].slope - terms[k].slope;
      if (ds == 0.0) continue;
      double x = (terms[k].intercept - terms[i].intercept) / ds;
      if (x > 0.0 && x < 1.0) xs.push_back(x);
    }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  j["breakpoints"] = xs;
  j["value"] = res.value;
  j["argmax_x"] = res.argmax_x;
  j["active_terms"] = res.active_terms;
  nlohmann::json jc;
  if (inp.gamma == 0.0)
    jc["cor2"] = corollary_bound(Corollary::cor2, inp);
  if (inp.beta == 0.0)
    jc["cor3"] = corollary_bound(Corollary::cor3, inp);
  if (inp.alpha == 0.0 && inp.beta == 0.0)
    jc["cor4"] = corollary_bound(Corollary::cor4, inp);
  j["corollaries"] = jc;
  auto sw = classical_sandwich(inp.s, inp.alpha, inp.beta);
  j["sandwich"] = {{"lower", sw.lower}, {"upper", sw.upper}};
  return j.dump(2);
}

}  // namespace fraclab
