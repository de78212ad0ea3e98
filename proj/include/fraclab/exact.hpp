#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <string>
#include <vector>

#include "fraclab/polynomial.hpp"

namespace fraclab {

using Rational = boost::multiprecision::cpp_rational;

// The field Q(lambda) where lambda = 1/theta and theta is a root of an
// integer polynomial p of degree n.  Elements are written in the power basis
// {1, lambda, ..., lambda^{n-1}}; lambda satisfies the reversed polynomial
// a_0 x^n + a_1 x^{n-1} + ... + a_n = 0, so
//   lambda^n = -(a_1 lambda^{n-1} + ... + a_n) / a_0.
class NumberField {
 public:
  explicit NumberField(IntPolynomial theta_poly);

  int degree() const { return deg_; }
  const IntPolynomial& theta_poly() const { return theta_poly_; }
  const std::vector<Rational>& reduction() const { return reduction_; }
  // Numeric embedding of lambda: the reciprocal of the largest real root.
  double lambda_approx() const { return lambda_approx_; }

 private:
  IntPolynomial theta_poly_;
  int deg_;
  std::vector<Rational> reduction_;  // lambda^deg in the power basis
  double lambda_approx_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

FieldPtr make_field(const IntPolynomial& theta_poly);

// Element of Q(lambda) with exact rational coordinates.
class FieldElem {
 public:
  FieldElem() = default;
  FieldElem(FieldPtr field, std::vector<Rational> coords);

  static FieldElem zero(const FieldPtr& f);
  static FieldElem one(const FieldPtr& f);
  static FieldElem from_rational(const FieldPtr& f, const Rational& r);
  static FieldElem lambda(const FieldPtr& f);

  const FieldPtr& field() const { return field_; }
  const std::vector<Rational>& coords() const { return c_; }
  bool is_zero() const;

  FieldElem operator+(const FieldElem& o) const;
  FieldElem operator-(const FieldElem& o) const;
  FieldElem operator*(const FieldElem& o) const;
  FieldElem operator-() const;
  bool operator==(const FieldElem& o) const;
  bool operator!=(const FieldElem& o) const { return !(*this == o); }
  // Lexicographic coordinate order; a total order usable as a map key, not
  // the order of the real embedding.
  bool operator<(const FieldElem& o) const;

  double approx() const;  // value at the numeric embedding of lambda
  std::string to_string() const;

 private:
  FieldPtr field_;
  std::vector<Rational> c_;
};

}  // namespace fraclab
