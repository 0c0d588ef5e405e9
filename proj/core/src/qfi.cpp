#include "pairqfi/qfi.hpp"

#include <cmath>
#include <limits>

#include "pairqfi/eigenstates.hpp"

namespace pairqfi {

Mat3 compute_h_ll(const PupilFunction& pupil) {
  auto nodes = pupil.nodes();
  auto iw = pupil.intensity_weights();

  Vec3 mean;
  Mat3 second;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Vec3 g = pair_phase_gradient(nodes[k]);
    const double w = iw[k];
    mean = mean + w * g;
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = mu; nu < 3; ++nu) second(mu, nu) += w * g[mu] * g[nu];
  }
  Mat3 h;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = mu; nu < 3; ++nu) {
      h(mu, nu) = 4.0 * (second(mu, nu) - mean[mu] * mean[nu]);
      h(nu, mu) = h(mu, nu);
    }
  return h;
}

Mat3 compute_h_ss(const MatrixElements& el, double delta) {
  const double omd = 1.0 - delta * delta;
  if (omd <= kDegeneracyGuard) throw DegenerateSceneError(std::abs(delta));

  Mat3 h;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = mu; nu < 3; ++nu) {
      const double im_a_mu = el.a[mu].imag(), im_a_nu = el.a[nu].imag();
      const double re_b_mu = el.b[mu].real(), re_b_nu = el.b[nu].real();
      const double im_b_mu = el.b[mu].imag(), im_b_nu = el.b[nu].imag();
      double v = 4.0 * (el.c(mu, nu) - re_b_mu * re_b_nu);
      v -= (4.0 / omd) * (im_a_mu * im_a_nu + im_b_mu * im_b_nu);
      v += (4.0 * delta / omd) * (im_a_mu * im_b_nu + im_a_nu * im_b_mu);
      h(mu, nu) = v;
      h(nu, mu) = v;
    }
  return h;
}

Mat3 compute_h_ss(const PupilFunction& pupil, const SceneParams& scene) {
  const OverlapResult overlap = compute_overlap(pupil, scene);
  if (overlap.one_minus_delta_sq() <= kDegeneracyGuard)
    throw DegenerateSceneError(overlap.delta);
  const MatrixElements el = compute_matrix_elements(pupil, scene, overlap);
  return compute_h_ss(el, overlap.delta);
}

QfiBlocks compute_qfi_blocks(const PupilFunction& pupil, const SceneParams& scene) {
  QfiBlocks blocks;
  blocks.scene = scene;
  blocks.h_ll = compute_h_ll(pupil);
  const OverlapResult overlap = compute_overlap(pupil, scene);
  if (overlap.one_minus_delta_sq() <= kDegeneracyGuard)
    throw DegenerateSceneError(overlap.delta);
  blocks.delta = overlap.delta;
  blocks.h_ss =
      compute_h_ss(compute_matrix_elements(pupil, scene, overlap), overlap.delta);
  blocks.h_sl_residual = compute_h_sl_residual(pupil, scene).residual;
  return blocks;
}

HslResidual compute_h_sl_residual(const PupilFunction& pupil,
                                  const SceneParams& scene) {
  const EigenstateProbe probe(pupil, scene);
  const double delta = probe.delta();
  const double omd = 1.0 - delta * delta;
  const MatrixElements& el = probe.elements();

  HslResidual out{Mat3{}, 0.0, 0.0};
  for (int nu = 0; nu < 3; ++nu) {
    out.max_first_sum_re =
        std::max({out.max_first_sum_re,
                  std::abs(probe.l_element(-1, +1, nu).real()),
                  std::abs(probe.l_element(+1, -1, nu).real())});
  }
  for (int mu = 0; mu < 3; ++mu) {
    const Complex brad_plus = probe.s_braderiv(+1, mu);
    const Complex brad_minus = probe.s_braderiv(-1, mu);
    for (int nu = 0; nu < 3; ++nu) {
      const Complex cross =
          probe.eigenvalue(+1) * probe.s_element(+1, -1, mu) *
              probe.l_element(-1, +1, nu) +
          probe.eigenvalue(-1) * probe.s_element(-1, +1, mu) *
              probe.l_element(+1, -1, nu);
      const double first_sum = 4.0 * omd * cross.real();
      const double second_sum =
          -el.d_delta[nu] * (brad_plus - brad_minus).real();
      out.residual(mu, nu) = first_sum + second_sum;
      out.max_abs = std::max(out.max_abs, std::abs(out.residual(mu, nu)));
    }
  }
  return out;
}

namespace {

Mat3 invert_block(const Mat3& h, const char* name, double* condition) {
  const Vec3 eig = eigenvalues_symmetric(h);
  if (eig.x <= 1e-10) throw SingularBlockError(name, eig.x);
  if (condition) *condition = eig.z / eig.x;
  return adjugate_inverse(h);
}

}  // namespace

QcrbResult assemble_and_invert(const Mat3& h_ll, const Mat3& h_ss) {
  QcrbResult result;
  result.qcrb_ll = invert_block(h_ll, "H(ll)", &result.condition_ll);
  result.qcrb_ss = invert_block(h_ss, "H(ss)", &result.condition_ss);
  return result;
}

std::vector<Vec3> SweepSpec::points() const {
  if (axis < 0 || axis > 2) throw ConfigError("sweep axis must be x, y or z");
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (stop < start) throw ConfigError("sweep stop must be >= start");
  std::vector<Vec3> pts;
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count <= 0) throw ConfigError("empty sweep");
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vec3 l = fixed_l;
    l[axis] = start + i * step;
    pts.push_back(l);
  }
  return pts;
}

std::vector<GridRow> qcrb_grid(const PupilFunction& pupil, const SweepSpec& sweep) {
  const std::vector<Vec3> pts = sweep.points();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<GridRow> rows;
  rows.reserve(pts.size());
  for (const Vec3& l : pts) {
    GridRow row;
    row.l = l;
    const SceneParams scene{l, Vec3{}};
    const OverlapResult overlap = compute_overlap(pupil, scene);
    row.delta = overlap.delta;
    if (overlap.one_minus_delta_sq() <= kDegeneracyGuard) {
      row.degenerate = true;
      row.qcrb_ss_diag = {nan, nan, nan};
    } else {
      const MatrixElements el = compute_matrix_elements(pupil, scene, overlap);
      const Mat3 h_ss = compute_h_ss(el, overlap.delta);
      const Vec3 eig = eigenvalues_symmetric(h_ss);
      if (eig.x <= 1e-10) {
        row.degenerate = true;
        row.qcrb_ss_diag = {nan, nan, nan};
      } else {
        row.qcrb_ss_diag = adjugate_inverse(h_ss).diag();
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pairqfi
