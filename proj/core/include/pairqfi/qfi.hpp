#pragma once

#include <vector>

#include "pairqfi/overlap.hpp"

namespace pairqfi {

/// The assembled 3x3 QFI blocks for one scene. h_sl holds the verification
/// residual of the off-diagonal block, which vanishes identically in exact
/// arithmetic; it is never used in the QCRB assembly.
struct QfiBlocks {
  Mat3 h_ll;
  Mat3 h_ss;
  Mat3 h_sl_residual;
  double delta = 0.0;
  SceneParams scene;
};

/// Separation-estimation QFI: H_mu_nu = 4 [ <dPsi_mu dPsi_nu> -
/// <dPsi_mu><dPsi_nu> ]. Independent of both l and s, so it takes only the
/// pupil.
Mat3 compute_h_ll(const PupilFunction& pupil);

/// Centroid-estimation QFI assembled from the wavefunction matrix elements.
/// Accepts a negative delta so that branch-flip invariance can be exercised.
Mat3 compute_h_ss(const MatrixElements& elements, double delta);

/// Convenience: full overlap -> elements -> H^(ss) pipeline for one scene.
Mat3 compute_h_ss(const PupilFunction& pupil, const SceneParams& scene);

/// All blocks for one scene in a single call, including the off-diagonal
/// verification residual.
QfiBlocks compute_qfi_blocks(const PupilFunction& pupil, const SceneParams& scene);

struct HslResidual {
  Mat3 residual;
  double max_abs;
  /// Largest |Re <e_i| d/dl |e_j>| (i != j); those elements are purely
  /// imaginary, which is what kills the first sum of the block.
  double max_first_sum_re;
};

/// Numerically evaluates the two sums that make up the off-diagonal block
/// from eigenstate quadrature and reports the residual. Any value above
/// quadrature noise signals an implementation bug, not physics.
HslResidual compute_h_sl_residual(const PupilFunction& pupil,
                                  const SceneParams& scene);

struct QcrbResult {
  Mat3 qcrb_ll;
  Mat3 qcrb_ss;
  double condition_ll = 0.0;
  double condition_ss = 0.0;

  Vec3 ll_diag() const { return qcrb_ll.diag(); }
  Vec3 ss_diag() const { return qcrb_ss.diag(); }
};

/// Blockwise inversion of the (block-diagonal) 6x6 QFI. Throws
/// SingularBlockError naming the offending block when its smallest
/// eigenvalue is at or below 1e-10.
QcrbResult assemble_and_invert(const Mat3& h_ll, const Mat3& h_ss);

/// Sweep of one separation component with the other two held fixed.
struct SweepSpec {
  int axis = 0;  // 0 = l_x, 1 = l_y, 2 = l_z
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  Vec3 fixed_l;  // the swept component is overwritten

  std::vector<Vec3> points() const;
};

struct GridRow {
  Vec3 l;
  double delta = 0.0;
  Vec3 qcrb_ss_diag;  // nan when degenerate
  bool degenerate = false;
};

/// One QCRB(s) row per grid point. Degenerate points are flagged, never
/// interpolated; they do not fail the sweep.
std::vector<GridRow> qcrb_grid(const PupilFunction& pupil, const SweepSpec& sweep);

}  // namespace pairqfi
