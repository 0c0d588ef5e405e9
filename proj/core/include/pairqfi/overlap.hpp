#pragma once

#include "pairqfi/aperture.hpp"
#include "pairqfi/linalg.hpp"

namespace pairqfi {

/// The six estimated parameters: pair-separation vector l and pair-centroid
/// vector s, in normalized diffraction units (transverse components scale the
/// linear pupil phase, axial components the quadratic one).
struct SceneParams {
  Vec3 l;
  Vec3 s;
};

/// Guard below which expressions dividing by (1 - delta^2) are refused.
inline constexpr double kDegeneracyGuard = 1e-9;

/// The two-source overlap integral for one separation vector.
struct OverlapResult {
  Complex raw_integral;  // sum of |P|^2 exp(i(4 pi l_perp.u + 2 pi l_z u^2))
  double delta;          // |raw_integral|, in [0, 1]
  double phi0;           // arg(raw_integral)/2, in (-pi/2, pi/2]

  double one_minus_delta_sq() const { return 1.0 - delta * delta; }
};

/// Phase gradient dPsi/dl at a pupil point: (2 pi u_x, 2 pi u_y, pi u^2).
Vec3 pair_phase_gradient(AperturePoint p);

/// chi(u) = 4 pi l_perp.u + 2 pi l_z u^2, the phase of the overlap integrand.
double overlap_phase(const Vec3& l, AperturePoint p);

/// Computes the overlap integral, delta and phi0. Independent of the
/// centroid vector. Throws OscillationError when the integrand oscillates
/// beyond what the pupil's quadrature spec is sized for.
OverlapResult compute_overlap(const PupilFunction& pupil, const SceneParams& scene);

/// Wavefunction matrix elements feeding the centroid QFI and the identity
/// checks. a and g are purely imaginary; c is real symmetric PSD.
struct MatrixElements {
  CVec3 a;       // <K+| d/ds_mu |K+>
  CVec3 b;       // <K+| d/ds_mu |K->
  Mat3 c;        // (d/ds_mu <K+|) d/ds_nu |K+>
  CVec3 g;       // <K+| d/dl_mu |K+>  (includes the dphi0/dl term)
  Vec3 d_delta;  // d(delta)/dl
  Vec3 d_phi0;   // d(phi0)/dl
};

MatrixElements compute_matrix_elements(const PupilFunction& pupil,
                                       const SceneParams& scene,
                                       const OverlapResult& overlap);

/// Residuals of the eigenstate matrix-element identities, evaluated by
/// comparing direct quadrature over the eigenstate superpositions against
/// the closed forms in terms of MatrixElements.
struct IdentityReport {
  double max_residual;        // worst |direct - closed form| over all identities
  double max_l_diagonal;      // |<e_i| d/dl |e_i>| from direct quadrature
  double max_s_cross_imag;    // |Im <e_-+| d/ds |e_+->| from direct quadrature
  double hermiticity_residual;  // |<K+|d_s|K-> + conj(<K-|d_s|K+>)|
};

IdentityReport eigen_identities_check(const PupilFunction& pupil,
                                      const SceneParams& scene);

}  // namespace pairqfi
