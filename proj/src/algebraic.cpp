#include "fraclab/algebraic.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

using CLD = std::complex<long double>;

long double eval_poly(const std::vector<long double>& c, CLD x, CLD* out) {
  CLD acc(0.0L);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  *out = acc;
  return std::abs(acc);
}

// Aberth-Ehrlich simultaneous iteration in extended precision.
std::vector<CLD> aberth(const std::vector<long double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<long double> dc(n);
  for (int k = 1; k <= n; ++k) dc[k - 1] = c[k] * k;

  long double maxc = 0.0L;
  for (int k = 0; k < n; ++k) maxc = std::max(maxc, std::abs(c[k]));
  const long double R = 1.0L + maxc / std::abs(c[n]);  // Cauchy bound

  std::vector<CLD> z(n);
  for (int k = 0; k < n; ++k) {
    long double ang = 2.0L * 3.14159265358979323846L * (k + 0.351L) / n + 0.5L;
    z[k] = CLD(R * 0.7L * std::cos(ang), R * 0.7L * std::sin(ang));
  }

  for (int iter = 0; iter < 400; ++iter) {
    long double worst = 0.0L;
    for (int i = 0; i < n; ++i) {
      CLD p, dp;
      eval_poly(c, z[i], &p);
      eval_poly(dc, z[i], &dp);
      if (std::abs(dp) == 0.0L) {
        z[i] += CLD(1e-6L, 1e-6L);
        worst = 1.0L;
        continue;
      }
      CLD newton = p / dp;
      CLD sum(0.0L);
      for (int j = 0; j < n; ++j)
        if (j != i) {
          CLD d = z[i] - z[j];
          if (std::abs(d) == 0.0L) d = CLD(1e-20L, 0.0L);
          sum += CLD(1.0L) / d;
        }
      CLD denom = CLD(1.0L) - newton * sum;
      CLD delta = std::abs(denom) == 0.0L ? newton : newton / denom;
      z[i] -= delta;
      worst = std::max(worst, std::abs(delta) / std::max(1.0L, std::abs(z[i])));
    }
    if (worst < 1e-19L) break;
  }

  // Nonreal roots of real polynomials come in conjugate pairs; snap nearly
  // real iterates onto the axis so pairs stay exactly symmetric.
  for (auto& zi : z)
    if (std::abs(zi.imag()) < 1e-17L * std::max(1.0L, std::abs(zi.real())))
      zi = CLD(zi.real(), 0.0L);
  return z;
}

}  // namespace

std::vector<Root> find_roots(const IntPolynomial& poly, double precision) {
  if (poly.degree() < 1) throw DomainError("find_roots: constant polynomial");
  if (precision <= 0) throw DomainError("find_roots: precision must be positive");

  std::vector<long double> c(poly.coeffs().begin(), poly.coeffs().end());

  // Exact zero roots from a vanishing constant term.
  int zero_mult = 0;
  while (c.size() > 1 && c.front() == 0.0L) {
    c.erase(c.begin());
    ++zero_mult;
  }
  if (zero_mult > 1) throw PrecisionError("find_roots: repeated root at 0");

  std::vector<Root> out;
  if (zero_mult == 1) out.push_back({{0.0, 0.0}, 0.0});

  const int n = static_cast<int>(c.size()) - 1;
  if (n >= 1) {
    std::vector<CLD> z = aberth(c);
    // A posteriori bound: each disk |w - z_i| <= n * |p(z_i) / (lc *
    // prod_{j!=i}(z_i - z_j))| contains at least one true root.
    for (int i = 0; i < n; ++i) {
      CLD p;
      eval_poly(c, z[i], &p);
      // Horner's rounding error can swallow |p| entirely near a repeated
      // root; without this term a double root would self-certify with
      // radius zero.
      long double mag = 0.0L;
      long double az = std::abs(z[i]);
      for (auto it = c.rbegin(); it != c.rend(); ++it)
        mag = mag * az + std::abs(*it);
      long double perr = 2.0L * n * LDBL_EPSILON * mag;
      long double denom = std::abs(c[n]);
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= std::abs(z[i] - z[j]);
      long double rad;
      if (denom == 0.0L)
        rad = precision * 10;  // coincident iterates: certification fails below
      else
        rad = n * (std::abs(p) + perr) / denom;
      double radius = static_cast<double>(rad) * (1.0 + 1e-12) + 1e-300;
      out.push_back({{static_cast<double>(z[i].real()), static_cast<double>(z[i].imag())},
                     radius});
    }
  }

  for (const Root& r : out)
    if (r.radius > precision)
      throw PrecisionError("find_roots: root certification exceeded precision " +
                           std::to_string(precision));

  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

AlgebraicNumber::AlgebraicNumber(IntPolynomial poly, int root_index, double precision)
    : poly_(std::move(poly)), root_index_(root_index), roots_(find_roots(poly_, precision)) {
  if (root_index_ < 0 || root_index_ >= static_cast<int>(roots_.size()))
    throw DomainError("AlgebraicNumber: root index out of range");
  const Root& sel = roots_[root_index_];
  for (int j = 0; j < static_cast<int>(roots_.size()); ++j) {
    if (j == root_index_) continue;
    double sep = std::abs(sel.value - roots_[j].value);
    if (sep <= sel.radius + roots_[j].radius)
      throw PrecisionError("AlgebraicNumber: selected root not separated at this precision");
  }
}

AlgebraicNumber AlgebraicNumber::largest_real_root(const IntPolynomial& poly,
                                                   double precision) {
  std::vector<Root> roots = find_roots(poly, precision);
  int best = -1;
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    if (std::abs(roots[i].value.imag()) <= roots[i].radius) best = i;
  }
  if (best < 0) throw DomainError("largest_real_root: no real root");
  return AlgebraicNumber(poly, best, precision);
}

bool AlgebraicNumber::is_real() const {
  return std::abs(value().imag()) <= radius();
}

double AlgebraicNumber::real_value() const {
  if (!is_real()) throw DomainError("AlgebraicNumber: selected root is not real");
  return value().real();
}

namespace {

enum class Compare { below, above, undecided };

// Certified comparison of |z| against a threshold t.
Compare modulus_vs(const Root& r, double t) {
  double m = std::abs(r.value);
  if (m - r.radius > t) return Compare::above;
  if (m + r.radius < t) return Compare::below;
  return Compare::undecided;
}

}  // namespace

bool is_garsia(const AlgebraicNumber& theta) {
  const IntPolynomial& p = theta.poly();
  if (!p.monic()) return false;
  if (p.constant() != 2 && p.constant() != -2) return false;
  if (!theta.is_real()) return false;
  if (theta.value().real() - theta.radius() <= 0.0) {
    if (theta.value().real() + theta.radius() >= 0.0)
      throw PrecisionError("is_garsia: sign of selected root undecided");
    return false;
  }
  for (const Root& r : theta.all_roots()) {
    switch (modulus_vs(r, 1.0)) {
      case Compare::above:
        break;
      case Compare::below:
        return false;
      case Compare::undecided:
        throw PrecisionError("is_garsia: root modulus vs 1 undecided at this precision");
    }
  }
  return true;
}

bool is_pisot(const AlgebraicNumber& theta) {
  const IntPolynomial& p = theta.poly();
  if (!p.monic()) return false;
  if (!theta.is_real()) return false;
  if (theta.value().real() - theta.radius() <= 1.0) {
    if (theta.value().real() + theta.radius() >= 1.0)
      throw PrecisionError("is_pisot: selected root vs 1 undecided");
    return false;
  }
  for (int j = 0; j < static_cast<int>(theta.all_roots().size()); ++j) {
    if (j == theta.root_index()) continue;
    switch (modulus_vs(theta.all_roots()[j], 1.0)) {
      case Compare::below:
        break;
      case Compare::above:
        return false;
      case Compare::undecided:
        throw PrecisionError("is_pisot: conjugate modulus vs 1 undecided at this precision");
    }
  }
  return true;
}

const char* to_string(LambdaClass c) {
  switch (c) {
    case LambdaClass::garsia_reciprocal: return "garsia_reciprocal";
    case LambdaClass::pisot_reciprocal: return "pisot_reciprocal";
    case LambdaClass::unclassified: return "unclassified";
  }
  return "unclassified";
}

ClassifyResult classify_lambda(const AlgebraicNumber& theta) {
  double th = theta.real_value();
  if (th <= 1.0) throw DomainError("classify_lambda: theta must exceed 1");
  ClassifyResult res;
  res.lambda = 1.0 / th;
  res.theta = th;
  if (is_garsia(theta))
    res.kind = LambdaClass::garsia_reciprocal;
  else if (is_pisot(theta))
    res.kind = LambdaClass::pisot_reciprocal;
  else
    res.kind = LambdaClass::unclassified;
  return res;
}

ClassifyResult classify_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("classify_lambda: lambda must lie in (0,1)");
  ClassifyResult res;
  res.kind = LambdaClass::unclassified;
  res.lambda = lambda;
  return res;
}

}  // namespace fraclab
