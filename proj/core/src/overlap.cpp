#include "pairqfi/overlap.hpp"

#include <cmath>
#include <numbers>

#include "pairqfi/eigenstates.hpp"

namespace pairqfi {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex expi(double phase) { return {std::cos(phase), std::sin(phase)}; }
}  // namespace

Vec3 pair_phase_gradient(AperturePoint p) {
  return {kTwoPi * p.ux, kTwoPi * p.uy, kPi * p.uu()};
}

double overlap_phase(const Vec3& l, AperturePoint p) {
  return 2.0 * kTwoPi * (l.x * p.ux + l.y * p.uy) + kTwoPi * l.z * p.uu();
}

OverlapResult compute_overlap(const PupilFunction& pupil, const SceneParams& scene) {
  // The default (80,160) spec resolves ~8 radial phase cycles; refuse scenes
  // beyond the resolved envelope instead of silently returning garbage.
  const double cycles =
      2.0 * std::hypot(scene.l.x, scene.l.y) + std::abs(scene.l.z);
  if (cycles > pupil.spec().n_radial / 10.0)
    throw OscillationError(
        "overlap integrand oscillates too fast for the quadrature spec; "
        "raise n_radial/n_angular (needs roughly n_radial >= 10 * "
        "(2|l_perp| + |l_z|))");

  auto nodes = pupil.nodes();
  auto iw = pupil.intensity_weights();
  Complex raw{};
  for (std::size_t k = 0; k < nodes.size(); ++k)
    raw += iw[k] * expi(overlap_phase(scene.l, nodes[k]));

  OverlapResult result;
  result.raw_integral = raw;
  result.delta = std::abs(raw);
  result.phi0 = 0.5 * std::arg(raw);
  return result;
}

MatrixElements compute_matrix_elements(const PupilFunction& pupil,
                                       const SceneParams& scene,
                                       const OverlapResult& overlap) {
  auto nodes = pupil.nodes();
  auto iw = pupil.intensity_weights();

  // Real |P|^2 moments (centroid-derivative elements are scene-free).
  double m_x = 0, m_y = 0, m_uu = 0;
  double m_xx = 0, m_xy = 0, m_yy = 0, m_xuu = 0, m_yuu = 0, m_uuuu = 0;
  // Oscillatory averages <f exp(i chi)> shared by B and d(raw)/dl.
  Complex o_1{}, o_x{}, o_y{}, o_uu{};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const AperturePoint p = nodes[k];
    const double w = iw[k];
    const double uu = p.uu();
    m_x += w * p.ux;
    m_y += w * p.uy;
    m_uu += w * uu;
    m_xx += w * p.ux * p.ux;
    m_xy += w * p.ux * p.uy;
    m_yy += w * p.uy * p.uy;
    m_xuu += w * p.ux * uu;
    m_yuu += w * p.uy * uu;
    m_uuuu += w * uu * uu;
    const Complex osc = w * expi(overlap_phase(scene.l, p));
    o_1 += osc;
    o_x += osc * p.ux;
    o_y += osc * p.uy;
    o_uu += osc * uu;
  }

  MatrixElements el;
  const Complex mi(0.0, -1.0);
  el.a = {mi * kTwoPi * m_x, mi * kTwoPi * m_y, mi * kPi * m_uu};

  const Complex debias = std::polar(1.0, -2.0 * overlap.phi0);
  el.b = {debias * mi * kTwoPi * o_x, debias * mi * kTwoPi * o_y,
          debias * mi * kPi * o_uu};

  el.c(0, 0) = kTwoPi * kTwoPi * m_xx;
  el.c(0, 1) = el.c(1, 0) = kTwoPi * kTwoPi * m_xy;
  el.c(1, 1) = kTwoPi * kTwoPi * m_yy;
  el.c(0, 2) = el.c(2, 0) = kTwoPi * kPi * m_xuu;
  el.c(1, 2) = el.c(2, 1) = kTwoPi * kPi * m_yuu;
  el.c(2, 2) = kPi * kPi * m_uuuu;

  // d(raw)/dl_mu = i <dchi_mu exp(i chi)> with dchi = 2 dPsi.
  const CVec3 d_raw = {Complex(0, 2.0) * kTwoPi * o_x,
                       Complex(0, 2.0) * kTwoPi * o_y,
                       Complex(0, 2.0) * kPi * o_uu};
  for (int mu = 0; mu < 3; ++mu) {
    const Complex rotated = debias * d_raw[mu];
    el.d_delta[mu] = rotated.real();
    el.d_phi0[mu] =
        overlap.delta > 0.0 ? rotated.imag() / (2.0 * overlap.delta) : 0.0;
  }

  // <K+| d/dl_mu |K+> = i dphi0_mu - i <dPsi_mu>; the phase-constant term
  // keeps the eigenstate identities exact.
  el.g = {Complex(0.0, el.d_phi0.x - kTwoPi * m_x),
          Complex(0.0, el.d_phi0.y - kTwoPi * m_y),
          Complex(0.0, el.d_phi0.z - kPi * m_uu)};
  return el;
}

IdentityReport eigen_identities_check(const PupilFunction& pupil,
                                      const SceneParams& scene) {
  const EigenstateProbe probe(pupil, scene);
  const MatrixElements& el = probe.elements();
  const double delta = probe.delta();
  const double root = std::sqrt(1.0 - delta * delta);

  IdentityReport report{0.0, 0.0, 0.0, 0.0};
  for (int mu = 0; mu < 3; ++mu) {
    const Complex i_im_b(0.0, el.b[mu].imag());
    const Complex rhs_pp = (el.a[mu] + i_im_b) / (1.0 + delta);
    const Complex rhs_mm = (el.a[mu] - i_im_b) / (1.0 - delta);
    const Complex rhs_mp = Complex(el.b[mu].real(), 0.0) / root;
    const Complex rhs_l = el.g[mu] / root;

    auto track = [&report](Complex direct, Complex closed) {
      report.max_residual = std::max(report.max_residual, std::abs(direct - closed));
    };
    track(probe.s_element(+1, +1, mu), rhs_pp);
    track(probe.s_element(-1, -1, mu), rhs_mm);
    track(probe.s_element(-1, +1, mu), rhs_mp);
    track(probe.s_element(+1, -1, mu), -rhs_mp);
    track(probe.l_element(+1, +1, mu), Complex{});
    track(probe.l_element(-1, -1, mu), Complex{});
    track(probe.l_element(-1, +1, mu), rhs_l);
    track(probe.l_element(+1, -1, mu), rhs_l);

    report.max_l_diagonal =
        std::max({report.max_l_diagonal, std::abs(probe.l_element(+1, +1, mu)),
                  std::abs(probe.l_element(-1, -1, mu))});
    report.max_s_cross_imag = std::max(
        {report.max_s_cross_imag, std::abs(probe.s_element(-1, +1, mu).imag()),
         std::abs(probe.s_element(+1, -1, mu).imag())});
    report.hermiticity_residual = std::max(
        report.hermiticity_residual,
        std::abs(probe.k_s_element(+1, -1, mu) +
                 std::conj(probe.k_s_element(-1, +1, mu))));
  }
  return report;
}

}  // namespace pairqfi
