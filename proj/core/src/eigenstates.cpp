#include "pairqfi/eigenstates.hpp"

#include <cmath>
#include <numbers>

namespace pairqfi {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex expi(double phase) { return {std::cos(phase), std::sin(phase)}; }
}  // namespace

EigenstateProbe::EigenstateProbe(const PupilFunction& pupil,
                                 const SceneParams& scene)
    : overlap_(compute_overlap(pupil, scene)) {
  if (overlap_.one_minus_delta_sq() <= kDegeneracyGuard)
    throw DegenerateSceneError(overlap_.delta);
  elements_ = compute_matrix_elements(pupil, scene, overlap_);

  auto nodes = pupil.nodes();
  auto weights = pupil.weights();
  auto amp = pupil.amplitude();
  const std::size_t n = nodes.size();

  w_.assign(weights.begin(), weights.end());
  for (auto& column : dpsi_) column.resize(n);
  k_plus_.resize(n);
  k_minus_.resize(n);
  e_plus_.resize(n);
  e_minus_.resize(n);

  const Complex phase_plus = expi(overlap_.phi0);
  const Complex phase_minus = std::conj(phase_plus);
  const double norm_plus = 1.0 / std::sqrt(2.0 * (1.0 + overlap_.delta));
  const double norm_minus = 1.0 / std::sqrt(2.0 * (1.0 - overlap_.delta));

  for (std::size_t k = 0; k < n; ++k) {
    const AperturePoint p = nodes[k];
    const Vec3 grad = pair_phase_gradient(p);
    dpsi_[0][k] = grad.x;
    dpsi_[1][k] = grad.y;
    dpsi_[2][k] = grad.z;

    const double s_phase =
        kTwoPi * (scene.s.x * p.ux + scene.s.y * p.uy) + kPi * scene.s.z * p.uu();
    const double psi = 0.5 * overlap_phase(scene.l, p);
    const Complex common = amp[k] * expi(-s_phase);
    k_plus_[k] = phase_plus * common * expi(-psi);
    k_minus_[k] = phase_minus * common * expi(psi);
    e_plus_[k] = norm_plus * (k_plus_[k] + k_minus_[k]);
    e_minus_[k] = norm_minus * (k_plus_[k] - k_minus_[k]);
  }
}

Complex EigenstateProbe::s_element(int i, int j, int mu) const {
  const auto& bra = eig(i);
  const auto& ket = eig(j);
  const auto& d = dpsi_[static_cast<std::size_t>(mu)];
  Complex acc{};
  for (std::size_t k = 0; k < w_.size(); ++k)
    acc += w_[k] * std::conj(bra[k]) * d[k] * ket[k];
  return Complex(0.0, -1.0) * acc;
}

Complex EigenstateProbe::l_element(int i, int j, int mu) const {
  const auto& bra = eig(i);
  const auto& ket = eig(j);
  const auto& d = dpsi_[static_cast<std::size_t>(mu)];
  const double delta = overlap_.delta;
  const double dphi0 = elements_.d_phi0[mu];
  const double norm_j = 1.0 / std::sqrt(2.0 * (1.0 + j * delta));

  // d/dl |e_j> = -j dDelta/(2(1+j Delta)) |e_j>
  //            + [dK+ + j dK-] / sqrt(2(1+j Delta)),
  // with dK+- = +-i (dphi0 - dPsi) K+-.
  Complex overlap_ij{};
  Complex deriv_part{};
  for (std::size_t k = 0; k < w_.size(); ++k) {
    const Complex cbra = std::conj(bra[k]);
    overlap_ij += w_[k] * cbra * ket[k];
    const Complex factor(0.0, dphi0 - d[k]);
    const Complex dk = factor * k_plus_[k] - static_cast<double>(j) * factor * k_minus_[k];
    deriv_part += w_[k] * cbra * dk;
  }
  const double norm_term = -j * elements_.d_delta[mu] / (2.0 * (1.0 + j * delta));
  return norm_term * overlap_ij + norm_j * deriv_part;
}

Complex EigenstateProbe::s_braderiv(int i, int mu) const {
  const auto& state = eig(i);
  const auto& d = dpsi_[static_cast<std::size_t>(mu)];
  Complex acc{};
  for (std::size_t k = 0; k < w_.size(); ++k)
    acc += w_[k] * d[k] * std::norm(state[k]);
  // conj of the -i factor from the ket derivative
  return Complex(0.0, 1.0) * acc;
}

Complex EigenstateProbe::k_s_element(int i, int j, int mu) const {
  const auto& bra = (i > 0) ? k_plus_ : k_minus_;
  const auto& ket = (j > 0) ? k_plus_ : k_minus_;
  const auto& d = dpsi_[static_cast<std::size_t>(mu)];
  Complex acc{};
  for (std::size_t k = 0; k < w_.size(); ++k)
    acc += w_[k] * std::conj(bra[k]) * d[k] * ket[k];
  return Complex(0.0, -1.0) * acc;
}

}  // namespace pairqfi
