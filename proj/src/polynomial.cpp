#include "fraclab/polynomial.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

IntPolynomial::IntPolynomial(std::vector<std::int64_t> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0) coeffs_.pop_back();
  if (coeffs_.empty() || (coeffs_.size() == 1 && coeffs_[0] == 0))
    throw DomainError("polynomial: zero polynomial");
}

IntPolynomial IntPolynomial::derivative() const {
  if (degree() == 0) throw DomainError("polynomial: derivative of constant");
  std::vector<std::int64_t> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    d[k - 1] = static_cast<std::int64_t>(k) * coeffs_[k];
  return IntPolynomial(std::move(d));
}

namespace {

struct Term {
  std::int64_t coeff;
  int exp;
};

// One term: [sign] [digits] [x [^ digits]]
Term parse_term(const std::string& s, std::size_t& i) {
  auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip_ws();
  std::int64_t sign = 1;
  while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    if (s[i] == '-') sign = -sign;
    ++i;
    skip_ws();
  }
  bool saw_digits = false;
  std::int64_t mag = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    saw_digits = true;
    mag = mag * 10 + (s[i] - '0');
    if (mag > (std::int64_t{1} << 62)) throw DomainError("polynomial: coefficient overflow");
    ++i;
  }
  skip_ws();
  int exp = 0;
  if (i < s.size() && (s[i] == 'x' || s[i] == 'X')) {
    ++i;
    skip_ws();
    if (i < s.size() && s[i] == '^') {
      ++i;
      skip_ws();
      if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
        throw DomainError("polynomial: malformed exponent in '" + s + "'");
      exp = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        exp = exp * 10 + (s[i] - '0');
        if (exp > 64) throw DomainError("polynomial: exponent too large");
        ++i;
      }
    } else {
      exp = 1;
    }
    if (!saw_digits) mag = 1;
  } else if (!saw_digits) {
    throw DomainError("polynomial: malformed term in '" + s + "'");
  }
  return {sign * mag, exp};
}

}  // namespace

IntPolynomial IntPolynomial::parse(const std::string& text) {
  std::size_t i = 0;
  std::vector<std::int64_t> coeffs;
  bool any = false;
  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    Term t = parse_term(text, i);
    if (static_cast<std::size_t>(t.exp) >= coeffs.size()) coeffs.resize(t.exp + 1, 0);
    coeffs[t.exp] += t.coeff;
    any = true;
  }
  if (!any) throw DomainError("polynomial: empty input");
  return IntPolynomial(std::move(coeffs));
}

std::string IntPolynomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    std::int64_t c = coeffs_[k];
    if (c == 0) continue;
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? '-' : '+');
    }
    std::int64_t a = c < 0 ? -c : c;
    if (a != 1 || k == 0) os << a;
    if (k >= 1) os << 'x';
    if (k >= 2) os << '^' << k;
    first = false;
  }
  if (first) os << '0';
  return os.str();
}

}  // namespace fraclab
