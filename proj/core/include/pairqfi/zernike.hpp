#pragma once

#include <vector>

#include "pairqfi/aperture.hpp"

namespace pairqfi {

/// Radial degree n and signed azimuthal frequency m of a Noll index.
/// m > 0 means a cos(m*theta) mode, m < 0 a sin(|m|*theta) mode.
struct NollIndex {
  int n;
  int m;
};

NollIndex noll_to_nm(int j);

/// Noll-indexed Zernike polynomials Z_1..Z_N, normalized so that the
/// unit-weight disk average of Z_j Z_k is delta_jk:
/// Z1 = 1, Z2 = 2 r cos(theta), Z3 = 2 r sin(theta), Z4 = sqrt(3)(2r^2 - 1).
class ZernikeBasis {
 public:
  static ZernikeBasis noll(int n_modes);

  int n_modes() const { return static_cast<int>(modes_.size()); }

  /// Value of Z_j at a point of the closed unit disk; j is 1-based.
  double eval(int j, AperturePoint p) const;

 private:
  struct Mode {
    int m_abs;
    bool is_sin;
    double norm;
    std::vector<double> radial;  // coefficient of r^{n-2s}, s = 0..(n-|m|)/2
  };
  std::vector<Mode> modes_;
};

inline double zernike_eval(const ZernikeBasis& basis, int j, AperturePoint p) {
  return basis.eval(j, p);
}

}  // namespace pairqfi
