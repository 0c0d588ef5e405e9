#pragma once

// Closed-form oracles shared by the unit tests. Everything here is computed
// independently of the library's quadrature path: analytic disk moments,
// textbook Zernike polynomials and Bessel/sinc overlap formulas.

#include <cmath>
#include <numbers>

namespace oracles {

inline constexpr double kPi = std::numbers::pi;

inline double double_factorial(int n) {
  double prod = 1.0;
  for (int k = n; k > 1; k -= 2) prod *= k;
  return prod;
}

/// (1/pi) * integral over the unit disk of u_x^a u_y^b, by polar reduction:
/// 2/(a+b+2) * (a-1)!! (b-1)!! / (a+b)!! for even a, b; zero otherwise.
inline double disk_moment(int a, int b) {
  if (a % 2 != 0 || b % 2 != 0) return 0.0;
  return 2.0 / (a + b + 2) * double_factorial(a - 1) * double_factorial(b - 1) /
         double_factorial(a + b);
}

/// Overlap magnitude for a pure transverse separation on the clear pupil:
/// |2 J1(4 pi l_perp) / (4 pi l_perp)|.
inline double delta_transverse(double l_perp) {
  const double k = 4.0 * kPi * l_perp;
  if (k == 0.0) return 1.0;
  return std::abs(2.0 * std::cyl_bessel_j(1, k) / k);
}

/// Overlap magnitude for a pure axial separation on the clear pupil:
/// |sin(pi l_z) / (pi l_z)| (substitute t = r^2 in the disk integral).
inline double delta_axial(double l_z) {
  const double k = kPi * l_z;
  if (k == 0.0) return 1.0;
  return std::abs(std::sin(k) / k);
}

/// First Zernike polynomials in the Noll convention, straight from the
/// published table.
inline double noll_table(int j, double r, double theta) {
  const double r2 = r * r;
  switch (j) {
    case 1: return 1.0;
    case 2: return 2.0 * r * std::cos(theta);
    case 3: return 2.0 * r * std::sin(theta);
    case 4: return std::sqrt(3.0) * (2.0 * r2 - 1.0);
    case 5: return std::sqrt(6.0) * r2 * std::sin(2.0 * theta);
    case 6: return std::sqrt(6.0) * r2 * std::cos(2.0 * theta);
    case 7: return std::sqrt(8.0) * (3.0 * r2 * r - 2.0 * r) * std::sin(theta);
    case 8: return std::sqrt(8.0) * (3.0 * r2 * r - 2.0 * r) * std::cos(theta);
    case 9: return std::sqrt(8.0) * r2 * r * std::sin(3.0 * theta);
    case 10: return std::sqrt(8.0) * r2 * r * std::cos(3.0 * theta);
    case 11: return std::sqrt(5.0) * (6.0 * r2 * r2 - 6.0 * r2 + 1.0);
    default: return 0.0;
  }
}

}  // namespace oracles
