#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

using Vec = std::vector<double>;

// Dense square matrix, row-major.  Dimensions in this library are tiny
// (ambient dimension of the systems, typically 1..3), so no attempt is made
// at being clever.
class Mat {
 public:
  Mat() = default;
  explicit Mat(std::size_t d, double diag = 0.0) : d_(d), a_(d * d, 0.0) {
    for (std::size_t i = 0; i < d; ++i) (*this)(i, i) = diag;
  }
  static Mat identity(std::size_t d) { return Mat(d, 1.0); }

  std::size_t dim() const { return d_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * d_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  Vec apply(const Vec& x) const {
    Vec y(d_, 0.0);
    for (std::size_t i = 0; i < d_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d_; ++j) s += a_[i * d_ + j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Mat operator*(const Mat& o) const {
    Mat r(d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t k = 0; k < d_; ++k) {
        double v = a_[i * d_ + k];
        for (std::size_t j = 0; j < d_; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  Mat transposed() const {
    Mat r(d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

 private:
  std::size_t d_ = 0;
  std::vector<double> a_;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double c, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

// Rotation about a unit axis by an angle in radians (Rodrigues), d = 3.
inline Mat rotation_about_axis(const Vec& axis, double angle) {
  if (axis.size() != 3) throw DomainError("axis-angle rotations need dimension 3");
  double n = norm2(axis);
  if (n == 0.0) throw DomainError("rotation axis must be nonzero");
  double ux = axis[0] / n, uy = axis[1] / n, uz = axis[2] / n;
  double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  Mat m(3);
  m(0, 0) = c + ux * ux * t;
  m(0, 1) = ux * uy * t - uz * s;
  m(0, 2) = ux * uz * t + uy * s;
  m(1, 0) = uy * ux * t + uz * s;
  m(1, 1) = c + uy * uy * t;
  m(1, 2) = uy * uz * t - ux * s;
  m(2, 0) = uz * ux * t - uy * s;
  m(2, 1) = uz * uy * t + ux * s;
  m(2, 2) = c + uz * uz * t;
  return m;
}

// Largest absolute entry of M - N, a crude but monotone matrix distance.
inline double max_entry_dist(const Mat& m, const Mat& n) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.data().size(); ++i)
    r = std::max(r, std::abs(m.data()[i] - n.data()[i]));
  return r;
}

// || M^T M - I ||_max; zero for exactly orthogonal matrices.
inline double orthogonality_defect(const Mat& m) {
  return max_entry_dist(m.transposed() * m, Mat::identity(m.dim()));
}

// Determinant via LU with partial pivoting.  Fine for the tiny dimensions
// used here.
inline double determinant(const Mat& m) {
  std::size_t d = m.dim();
  Mat a = m;
  double det = 1.0;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (a(p, c) == 0.0) return 0.0;
    if (p != c) {
      for (std::size_t j = 0; j < d; ++j) std::swap(a(p, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < d; ++r) {
      double f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < d; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

}  // namespace fraclab
