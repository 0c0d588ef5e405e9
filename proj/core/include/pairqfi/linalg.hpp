#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace pairqfi {

using Complex = std::complex<double>;

/// Cartesian triple used for both separation and centroid vectors.
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double c) const { return {x * c, y * c, z * c}; }
  Vec3 operator/(double c) const { return {x / c, y / c, z / c}; }
  Vec3 operator-() const { return {-x, -y, -z}; }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double max_abs() const {
    return std::max({std::abs(x), std::abs(y), std::abs(z)});
  }
};

inline Vec3 operator*(double c, const Vec3& v) { return v * c; }

struct CVec3 {
  Complex x{}, y{}, z{};

  Complex operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  Complex& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  CVec3 operator-() const { return {-x, -y, -z}; }

  Vec3 real() const { return {x.real(), y.real(), z.real()}; }
  Vec3 imag() const { return {x.imag(), y.imag(), z.imag()}; }
  double max_abs() const {
    return std::max({std::abs(x), std::abs(y), std::abs(z)});
  }
};

/// Dense 3x3 matrix, row-major. Used for the QFI/FI blocks, which are
/// symmetric in exact arithmetic.
struct Mat3 {
  std::array<double, 9> m{};

  double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
  double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

  static Mat3 identity() { return diagonal(1.0, 1.0, 1.0); }
  static Mat3 diagonal(double a, double b, double c) {
    Mat3 d;
    d(0, 0) = a;
    d(1, 1) = b;
    d(2, 2) = c;
    return d;
  }

  Vec3 diag() const { return {(*this)(0, 0), (*this)(1, 1), (*this)(2, 2)}; }

  Mat3 transposed() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
    return t;
  }

  Mat3 operator+(const Mat3& o) const {
    Mat3 s;
    for (std::size_t i = 0; i < 9; ++i) s.m[i] = m[i] + o.m[i];
    return s;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 s;
    for (std::size_t i = 0; i < 9; ++i) s.m[i] = m[i] - o.m[i];
    return s;
  }
  Mat3 operator*(double c) const {
    Mat3 s;
    for (std::size_t i = 0; i < 9; ++i) s.m[i] = m[i] * c;
    return s;
  }

  double max_abs() const {
    double v = 0.0;
    for (double e : m) v = std::max(v, std::abs(e));
    return v;
  }

  double symmetry_defect() const {
    double v = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int c = r + 1; c < 3; ++c)
        v = std::max(v, std::abs((*this)(r, c) - (*this)(c, r)));
    return v;
  }
};

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(r, k) * b(k, c);
      p(r, c) = s;
    }
  return p;
}

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
          a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
          a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

inline double det3(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Closed-form inverse via the adjugate. The caller is responsible for
/// checking conditioning (see eigenvalues_symmetric).
inline Mat3 adjugate_inverse(const Mat3& a, double* det_out = nullptr) {
  const double det = det3(a);
  if (det_out) *det_out = det;
  Mat3 inv;
  inv(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  inv(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  inv(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  inv(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  inv(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  inv(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  inv(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  inv(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  inv(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return inv * (1.0 / det);
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order, by the
/// trigonometric form of Cardano's solution of the characteristic cubic.
inline Vec3 eigenvalues_symmetric(const Mat3& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  if (p1 == 0.0) {
    Vec3 d = a.diag();
    if (d.x > d.y) std::swap(d.x, d.y);
    if (d.y > d.z) std::swap(d.y, d.z);
    if (d.x > d.y) std::swap(d.x, d.y);
    return d;
  }
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b = (a - Mat3::diagonal(q, q, q)) * (1.0 / p);
  double r = det3(b) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double two_pi_3 = 2.0943951023931953;
  const double e_hi = q + 2.0 * p * std::cos(phi);
  const double e_lo = q + 2.0 * p * std::cos(phi + two_pi_3);
  const double e_mid = 3.0 * q - e_hi - e_lo;
  return {e_lo, e_mid, e_hi};
}

inline double min_eigenvalue_symmetric(const Mat3& a) {
  return eigenvalues_symmetric(a).x;
}

}  // namespace pairqfi
