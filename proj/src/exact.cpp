#include "fraclab/exact.hpp"

#include <sstream>

#include "fraclab/algebraic.hpp"
#include "fraclab/errors.hpp"

namespace fraclab {

NumberField::NumberField(IntPolynomial theta_poly)
    : theta_poly_(std::move(theta_poly)), deg_(theta_poly_.degree()) {
  if (deg_ < 1) throw DomainError("NumberField: constant polynomial");
  const auto& a = theta_poly_.coeffs();  // ascending in theta
  // Reversed polynomial in lambda: leading coefficient is a_0.
  Rational lead(a[0]);
  if (lead == 0) throw DomainError("NumberField: zero constant term, theta root at 0");
  reduction_.assign(deg_, Rational(0));
  // a_0 lambda^n + sum_{k=1..n} a_k lambda^{n-k} = 0
  for (int k = 1; k <= deg_; ++k) reduction_[deg_ - k] = Rational(-a[k]) / lead;

  AlgebraicNumber theta = AlgebraicNumber::largest_real_root(theta_poly_);
  double th = theta.real_value();
  if (th <= 0) throw DomainError("NumberField: largest real root must be positive");
  lambda_approx_ = 1.0 / th;
}

FieldPtr make_field(const IntPolynomial& theta_poly) {
  return std::make_shared<NumberField>(theta_poly);
}

FieldElem::FieldElem(FieldPtr field, std::vector<Rational> coords)
    : field_(std::move(field)), c_(std::move(coords)) {
  if (static_cast<int>(c_.size()) != field_->degree())
    throw DomainError("FieldElem: coordinate count mismatch");
}

FieldElem FieldElem::zero(const FieldPtr& f) {
  return FieldElem(f, std::vector<Rational>(f->degree(), Rational(0)));
}

FieldElem FieldElem::one(const FieldPtr& f) { return from_rational(f, Rational(1)); }

FieldElem FieldElem::from_rational(const FieldPtr& f, const Rational& r) {
  std::vector<Rational> c(f->degree(), Rational(0));
  c[0] = r;
  return FieldElem(f, std::move(c));
}

FieldElem FieldElem::lambda(const FieldPtr& f) {
  if (f->degree() == 1) return FieldElem(f, {f->reduction()[0]});
  std::vector<Rational> c(f->degree(), Rational(0));
  c[1] = 1;
  return FieldElem(f, std::move(c));
}

bool FieldElem::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

namespace {

void check_same_field(const FieldElem& a, const FieldElem& b) {
  if (a.field().get() != b.field().get())
    throw DomainError("FieldElem: operands from different fields");
}

}  // namespace

FieldElem FieldElem::operator+(const FieldElem& o) const {
  check_same_field(*this, o);
  std::vector<Rational> r(c_);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.c_[i];
  return FieldElem(field_, std::move(r));
}

FieldElem FieldElem::operator-(const FieldElem& o) const {
  check_same_field(*this, o);
  std::vector<Rational> r(c_);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= o.c_[i];
  return FieldElem(field_, std::move(r));
}

FieldElem FieldElem::operator-() const {
  std::vector<Rational> r(c_);
  for (auto& x : r) x = -x;
  return FieldElem(field_, std::move(r));
}

FieldElem FieldElem::operator*(const FieldElem& o) const {
  check_same_field(*this, o);
  const int n = field_->degree();
  std::vector<Rational> prod(2 * n - 1, Rational(0));
  for (int i = 0; i < n; ++i) {
    if (c_[i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (o.c_[j] == 0) continue;
      prod[i + j] += c_[i] * o.c_[j];
    }
  }
  const auto& red = field_->reduction();
  for (int k = 2 * n - 2; k >= n; --k) {
    Rational top = prod[k];
    if (top == 0) continue;
    prod[k] = 0;
    for (int j = 0; j < n; ++j) prod[k - n + j] += top * red[j];
  }
  prod.resize(n);
  return FieldElem(field_, std::move(prod));
}

bool FieldElem::operator==(const FieldElem& o) const {
  check_same_field(*this, o);
  return c_ == o.c_;
}

bool FieldElem::operator<(const FieldElem& o) const {
  check_same_field(*this, o);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] < o.c_[i]) return true;
    if (o.c_[i] < c_[i]) return false;
  }
  return false;
}

double FieldElem::approx() const {
  double lam = field_->lambda_approx();
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    acc = acc * lam + static_cast<double>(*it);
  return acc;
}

std::string FieldElem::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ", ";
    os << c_[i];
  }
  os << "]";
  return os.str();
}

}  // namespace fraclab
