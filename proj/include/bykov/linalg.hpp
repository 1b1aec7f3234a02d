#pragma once

// Fixed-size 2x2 linear algebra. Everything the return map needs is 2-D, so
// this stays tiny and allocation-free.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace bykov {

template <typename Real = double>
struct Vec2T {
  Real x{0}, y{0};

  Real norm() const {
    using std::hypot;
    return hypot(x, y);
  }
  Vec2T normalized() const {
    const Real n = norm();
    return {x / n, y / n};
  }
};

template <typename Real = double>
struct Mat2T {
  // row-major: [[a, b], [c, d]]
  Real a{1}, b{0}, c{0}, d{1};

  static Mat2T identity() { return {Real(1), Real(0), Real(0), Real(1)}; }

  Real det() const { return a * d - b * c; }
  Real trace() const { return a + d; }

  Mat2T operator*(const Mat2T& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Vec2T<Real> operator*(const Vec2T<Real>& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
};

using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;

/// Eigenvalues of a real 2x2 matrix given through its trace and determinant.
/// In the real case `small` has the smaller modulus; it is obtained as
/// det / large to avoid cancellation.
template <typename Real = double>
struct Eigenvalues2 {
  bool real = true;
  Real small{0}, large{0};  // real case
  std::complex<double> pair{0.0, 0.0};  // complex case, upper half plane
  Real modulus{0};                       // complex case, sqrt(det)
};

template <typename Real>
Eigenvalues2<Real> eigenvalues_from(const Real& tr, const Real& det) {
  using std::sqrt;
  using std::abs;
  Eigenvalues2<Real> e;
  const Real disc = tr * tr - Real(4) * det;
  if (disc >= Real(0)) {
    const Real s = sqrt(disc);
    // large-modulus root has the sign of the trace
    const Real large = tr >= Real(0) ? (tr + s) / Real(2) : (tr - s) / Real(2);
    e.real = true;
    e.large = large;
    e.small = large != Real(0) ? det / large : Real(0);
  } else {
    e.real = false;
    e.modulus = sqrt(det);
    e.pair = {static_cast<double>(tr / Real(2)), static_cast<double>(sqrt(-disc) / Real(2))};
  }
  return e;
}

/// Singular values (largest first) of a 2x2 matrix.
inline std::array<double, 2> singular_values(const Mat2& m) {
  // sigma1 * sigma2 = |det|, sigma1^2 + sigma2^2 = Frobenius^2
  const double fro2 = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  const double adet = std::abs(m.det());
  const double s = std::sqrt(std::max(0.0, fro2 + 2.0 * adet));
  const double t = std::sqrt(std::max(0.0, fro2 - 2.0 * adet));
  const double s1 = 0.5 * (s + t);
  const double s2 = s1 > 0.0 ? adet / s1 : 0.0;
  return {s1, s2};
}

/// Same, with |det| supplied by the caller. Use when det is known in closed
/// form and a*d - b*c would cancel.
inline std::array<double, 2> singular_values(const Mat2& m, double abs_det) {
  const double fro2 = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  const double s = std::sqrt(std::max(0.0, fro2 + 2.0 * abs_det));
  const double t = std::sqrt(std::max(0.0, fro2 - 2.0 * abs_det));
  const double s1 = 0.5 * (s + t);
  return {s1, s1 > 0.0 ? abs_det / s1 : 0.0};
}

/// Thin QR of a 2x2 matrix by Givens rotation. R has non-negative diagonal.
struct QR2 {
  Mat2 q;
  Mat2 r;
};

inline QR2 qr(const Mat2& m) {
  const double n = std::hypot(m.a, m.c);
  double cs = 1.0, sn = 0.0;
  if (n > 0.0) {
    cs = m.a / n;
    sn = m.c / n;
  }
  // Q^T m
  Mat2 r{cs * m.a + sn * m.c, cs * m.b + sn * m.d, -sn * m.a + cs * m.c, -sn * m.b + cs * m.d};
  Mat2 q{cs, -sn, sn, cs};
  r.c = 0.0;
  if (r.d < 0.0) {
    r.d = -r.d;
    q.b = -q.b;
    q.d = -q.d;
  }
  return {q, r};
}

}  // namespace bykov
