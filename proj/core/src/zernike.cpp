#include "pairqfi/zernike.hpp"

#include <cmath>

namespace pairqfi {

NollIndex noll_to_nm(int j) {
  if (j < 1) throw ConfigError("Noll index must be >= 1");
  // Row n holds n+1 modes; cumulative count through row n is (n+1)(n+2)/2.
  int n = 0;
  while ((n + 1) * (n + 2) / 2 < j) ++n;
  const int k = j - n * (n + 1) / 2;  // 1-based position within the row
  int m_abs;
  if (n % 2 == 0) {
    m_abs = 2 * (k / 2);
  } else {
    m_abs = 2 * ((k - 1) / 2) + 1;
  }
  if (m_abs == 0) return {n, 0};
  // Noll's convention: even j carries the cosine mode, odd j the sine mode.
  return {n, (j % 2 == 0) ? m_abs : -m_abs};
}

ZernikeBasis ZernikeBasis::noll(int n_modes) {
  if (n_modes < 1) throw ConfigError("Zernike basis needs at least one mode");
  ZernikeBasis basis;
  basis.modes_.reserve(static_cast<std::size_t>(n_modes));
  for (int j = 1; j <= n_modes; ++j) {
    const NollIndex nm = noll_to_nm(j);
    const int n = nm.n;
    const int m_abs = std::abs(nm.m);
    Mode mode;
    mode.m_abs = m_abs;
    mode.is_sin = nm.m < 0;
    mode.norm = (m_abs == 0) ? std::sqrt(n + 1.0) : std::sqrt(2.0 * (n + 1.0));

    const int p = (n - m_abs) / 2;
    mode.radial.resize(static_cast<std::size_t>(p) + 1);
    for (int s = 0; s <= p; ++s) {
      // (-1)^s (n-s)! / [s! ((n+|m|)/2 - s)! ((n-|m|)/2 - s)!]
      double c = (s % 2 == 0) ? 1.0 : -1.0;
      c *= std::tgamma(n - s + 1.0);
      c /= std::tgamma(s + 1.0);
      c /= std::tgamma((n + m_abs) / 2 - s + 1.0);
      c /= std::tgamma((n - m_abs) / 2 - s + 1.0);
      mode.radial[static_cast<std::size_t>(s)] = c;
    }
    basis.modes_.push_back(std::move(mode));
  }
  return basis;
}

double ZernikeBasis::eval(int j, AperturePoint p) const {
  if (j < 1 || j > n_modes())
    throw ConfigError("Zernike index out of range for this basis");
  const Mode& mode = modes_[static_cast<std::size_t>(j - 1)];

  const double r2 = p.uu();
  const double r = std::sqrt(r2);

  // R_n^{|m|}(r) = r^{|m|} * polynomial in r^2, evaluated by Horner.
  double radial = 0.0;
  for (double c : mode.radial) radial = radial * r2 + c;
  for (int i = 0; i < mode.m_abs; ++i) radial *= r;

  double angular = 1.0;
  if (mode.m_abs != 0) {
    const double theta = std::atan2(p.uy, p.ux);
    angular = mode.is_sin ? std::sin(mode.m_abs * theta)
                          : std::cos(mode.m_abs * theta);
  }
  return mode.norm * radial * angular;
}

}  // namespace pairqfi
