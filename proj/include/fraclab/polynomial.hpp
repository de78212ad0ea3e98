#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace fraclab {

// Univariate polynomial with integer coefficients, stored ascending:
// coeffs[k] multiplies x^k.  The leading coefficient is nonzero.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  // Trailing zero coefficients are trimmed; the zero polynomial is invalid.
  explicit IntPolynomial(std::vector<std::int64_t> coeffs);

  // Parses expressions like "x^3-2x-2", "2x^2 + x - 1", "x-2".
  // Whitespace is ignored; coefficients and exponents are decimal integers.
  static IntPolynomial parse(const std::string& text);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<std::int64_t>& coeffs() const { return coeffs_; }
  std::int64_t leading() const { return coeffs_.back(); }
  std::int64_t constant() const { return coeffs_.front(); }
  bool monic() const { return leading() == 1; }

  template <typename T>
  T eval(const T& x) const {
    T acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      acc = acc * x + T(static_cast<double>(*it));
    return acc;
  }

  IntPolynomial derivative() const;

  // Canonical text form, e.g. "x^3-2x-2".
  std::string to_string() const;

  bool operator==(const IntPolynomial& o) const { return coeffs_ == o.coeffs_; }

 private:
  std::vector<std::int64_t> coeffs_;
};

}  // namespace fraclab
