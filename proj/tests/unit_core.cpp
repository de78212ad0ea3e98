#include "doctest.h"

#include <cmath>

#include "fraclab/algebraic.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/exact.hpp"
#include "fraclab/polynomial.hpp"

using namespace fraclab;

TEST_CASE("polynomial parsing round-trips the canonical form") {
  auto p = IntPolynomial::parse("x^3-2x-2");
  CHECK(p.degree() == 3);
  CHECK(p.coeffs() == std::vector<std::int64_t>{-2, -2, 0, 1});
  CHECK(p.to_string() == "x^3-2x-2");

  auto q = IntPolynomial::parse("2x^2 + x - 1");
  CHECK(q.coeffs() == std::vector<std::int64_t>{-1, 1, 2});
  CHECK(q.to_string() == "2x^2+x-1");

  CHECK(IntPolynomial::parse("x-2").degree() == 1);
  CHECK(IntPolynomial::parse("x + x").coeffs() == std::vector<std::int64_t>{0, 2});
  CHECK(IntPolynomial::parse("7").degree() == 0);
}

TEST_CASE("polynomial rejects degenerate input") {
  CHECK_THROWS_AS(IntPolynomial::parse(""), DomainError);
  CHECK_THROWS_AS(IntPolynomial::parse("   "), DomainError);
  CHECK_THROWS_AS(IntPolynomial::parse("0"), DomainError);
  CHECK_THROWS_AS(IntPolynomial::parse("x - x"), DomainError);
  CHECK_THROWS_AS(IntPolynomial(std::vector<std::int64_t>{}), DomainError);
  CHECK_THROWS_AS(IntPolynomial(std::vector<std::int64_t>{0, 0}), DomainError);
}

TEST_CASE("polynomial constructor trims trailing zeros") {
  IntPolynomial p(std::vector<std::int64_t>{-2, 0, 1, 0});
  CHECK(p.degree() == 2);
  CHECK(p.leading() == 1);
  CHECK(p.constant() == -2);
  CHECK(p.monic());
}

TEST_CASE("evaluation and derivative") {
  auto p = IntPolynomial::parse("x^2-2");
  CHECK(p.eval(2.0) == doctest::Approx(2.0));
  CHECK(p.eval(std::sqrt(2.0)) == doctest::Approx(0.0).epsilon(1e-12));
  auto d = p.derivative();
  CHECK(d.coeffs() == std::vector<std::int64_t>{0, 2});
  CHECK_THROWS_AS(IntPolynomial::parse("5").derivative(), DomainError);
}

TEST_CASE("root finding is sorted and certified") {
  auto roots = find_roots(IntPolynomial::parse("x^2-2"));
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].value.real() == doctest::Approx(-std::sqrt(2.0)));
  CHECK(roots[1].value.real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(roots[0].radius <= 1e-14);
  CHECK(roots[1].radius <= 1e-14);

  auto imag = find_roots(IntPolynomial::parse("x^2+1"));
  REQUIRE(imag.size() == 2);
  CHECK(imag[0].value.imag() == doctest::Approx(-1.0));
  CHECK(imag[1].value.imag() == doctest::Approx(1.0));

  CHECK_THROWS_AS(find_roots(IntPolynomial::parse("x^2-2x+1")), PrecisionError);
  CHECK_THROWS_AS(find_roots(IntPolynomial::parse("3")), DomainError);
}

TEST_CASE("largest real root selection") {
  auto theta = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^2-2"));
  CHECK(theta.is_real());
  CHECK(theta.real_value() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^2+1")),
                  DomainError);
}

TEST_CASE("garsia and pisot predicates") {
  auto rt2 = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^2-2"));
  CHECK(is_garsia(rt2));
  CHECK_FALSE(is_pisot(rt2));

  auto phi = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^2-x-1"));
  CHECK_FALSE(is_garsia(phi));  // norm is 1, not 2
  CHECK(is_pisot(phi));

  auto two = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x-2"));
  CHECK(is_garsia(two));
  CHECK(is_pisot(two));

  auto cbrt2 = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^3-2"));
  CHECK(is_garsia(cbrt2));  // complex pair has modulus 2^{1/3} > 1
  CHECK_FALSE(is_pisot(cbrt2));
}

TEST_CASE("classification prefers garsia on ties") {
  auto rt2 = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^2-2"));
  auto r = classify_lambda(rt2);
  CHECK(r.kind == LambdaClass::garsia_reciprocal);
  CHECK(r.lambda == doctest::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(r.theta.has_value());
  CHECK(*r.theta == doctest::Approx(std::sqrt(2.0)));

  auto phi = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^2-x-1"));
  CHECK(classify_lambda(phi).kind == LambdaClass::pisot_reciprocal);

  // theta = 2 satisfies both definitions; garsia wins.
  auto two = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x-2"));
  CHECK(classify_lambda(two).kind == LambdaClass::garsia_reciprocal);

  // theta = sqrt(3): norm 3, conjugate modulus > 1: neither class.
  auto rt3 = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x^2-3"));
  CHECK(classify_lambda(rt3).kind == LambdaClass::unclassified);

  CHECK(classify_lambda(0.70710678).kind == LambdaClass::unclassified);
  CHECK_THROWS_AS(classify_lambda(1.5), DomainError);
  CHECK_THROWS_AS(classify_lambda(-0.25), DomainError);

  // theta = 1 gives lambda = 1, outside (0,1).
  auto one = AlgebraicNumber::largest_real_root(IntPolynomial::parse("x-1"));
  CHECK_THROWS_AS(classify_lambda(one), DomainError);

  CHECK(std::string(to_string(LambdaClass::garsia_reciprocal)) == "garsia_reciprocal");
  CHECK(std::string(to_string(LambdaClass::pisot_reciprocal)) == "pisot_reciprocal");
  CHECK(std::string(to_string(LambdaClass::unclassified)) == "unclassified");
}

TEST_CASE("number field arithmetic reduces by the reversed polynomial") {
  auto field = make_field(IntPolynomial::parse("x^2-2"));
  CHECK(field->degree() == 2);
  CHECK(field->lambda_approx() == doctest::Approx(1.0 / std::sqrt(2.0)));

  auto lam = FieldElem::lambda(field);
  auto half = FieldElem::from_rational(field, Rational(1, 2));
  CHECK(lam * lam == half);  // lambda^2 = 1/2
  CHECK((lam * lam - half).is_zero());
  CHECK(lam.approx() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("golden field satisfies lambda^2 = 1 - lambda") {
  auto field = make_field(IntPolynomial::parse("x^2-x-1"));
  auto lam = FieldElem::lambda(field);
  auto one = FieldElem::one(field);
  CHECK(lam * lam + lam == one);
  // (1 + lambda)(1 - lambda) = 1 - lambda^2 = lambda
  CHECK((one + lam) * (one - lam) == lam);
  CHECK(lam.approx() == doctest::Approx(2.0 / (1.0 + std::sqrt(5.0))));
}

TEST_CASE("cubic field reduction") {
  auto field = make_field(IntPolynomial::parse("x^3-2"));
  auto lam = FieldElem::lambda(field);
  CHECK(lam * lam * lam == FieldElem::from_rational(field, Rational(1, 2)));
}

TEST_CASE("field element ordering is total") {
  auto field = make_field(IntPolynomial::parse("x^2-2"));
  auto a = FieldElem::zero(field);
  auto b = FieldElem::lambda(field);
  CHECK(a != b);
  CHECK((a < b) != (b < a));
  CHECK_FALSE(a < a);
}
