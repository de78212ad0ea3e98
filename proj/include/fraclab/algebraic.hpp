#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/polynomial.hpp"

namespace fraclab {

// One root approximation together with a radius r such that the closed disk
// of radius r around value contains a true root of the polynomial.  When all
// disks of a root list are pairwise disjoint, each disk contains exactly one
// root.
struct Root {
  std::complex<double> value;
  double radius = 0.0;
};

// All complex roots, sorted by (real part, imaginary part), each certified to
// radius <= precision.  Throws PrecisionError if certification fails (e.g.
// repeated roots), DomainError for constant polynomials.
std::vector<Root> find_roots(const IntPolynomial& poly, double precision = 1e-14);

// A root of an integer polynomial, pinned by index into the sorted root list.
// Invariant: the certified disk of the selected root is disjoint from the
// disks of all other roots.
class AlgebraicNumber {
 public:
  AlgebraicNumber(IntPolynomial poly, int root_index, double precision = 1e-14);

  // Selects the largest certified-real root; DomainError if there is none.
  static AlgebraicNumber largest_real_root(const IntPolynomial& poly,
                                           double precision = 1e-14);

  const IntPolynomial& poly() const { return poly_; }
  int root_index() const { return root_index_; }
  std::complex<double> value() const { return roots_[root_index_].value; }
  double radius() const { return roots_[root_index_].radius; }
  const std::vector<Root>& all_roots() const { return roots_; }

  // Certified-real test for the selected root: with pairwise disjoint disks a
  // disk touching the real axis must hold a real root.
  bool is_real() const;
  double real_value() const;  // DomainError if not certified real

 private:
  IntPolynomial poly_;
  int root_index_;
  std::vector<Root> roots_;
};

// True iff theta is a Garsia number: its polynomial is monic with constant
// term of absolute value 2, the selected root is a positive real, and every
// root of the polynomial has modulus strictly greater than 1.  Throws
// PrecisionError when a modulus comparison cannot be certified.
bool is_garsia(const AlgebraicNumber& theta);

// True iff theta is a Pisot number: monic polynomial, selected root real and
// greater than 1, all other roots of modulus strictly less than 1.  Throws
// PrecisionError when a comparison cannot be certified.
bool is_pisot(const AlgebraicNumber& theta);

enum class LambdaClass { garsia_reciprocal, pisot_reciprocal, unclassified };

struct ClassifyResult {
  LambdaClass kind = LambdaClass::unclassified;
  double lambda = 0.0;                   // contraction ratio in (0,1)
  std::optional<double> theta;           // 1/lambda when algebraic data given
};

const char* to_string(LambdaClass c);

// Classification of a contraction ratio lambda = 1/theta given algebraic data
// for theta.  Garsia is tested before Pisot, so polynomials satisfying both
// definitions (degree-1 root 2, i.e. lambda = 1/2) report garsia_reciprocal.
// DomainError unless 0 < lambda < 1.
ClassifyResult classify_lambda(const AlgebraicNumber& theta);

// Plain numeric lambda carries no algebraic data; always unclassified.
// DomainError unless 0 < lambda < 1.
ClassifyResult classify_lambda(double lambda);

}  // namespace fraclab
