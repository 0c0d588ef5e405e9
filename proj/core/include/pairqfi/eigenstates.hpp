#pragma once

#include <array>
#include <vector>

#include "pairqfi/overlap.hpp"

namespace pairqfi {

/// Direct quadrature over the density-operator eigenstates
///   |e_+-> = (|K+> +- |K->) / sqrt(2 (1 +- delta)),
/// including the l-dependence of the phase constant phi0 and of the
/// normalization. This is the verification side of the identity and
/// off-diagonal-block checks; production formulas never go through it.
class EigenstateProbe {
 public:
  EigenstateProbe(const PupilFunction& pupil, const SceneParams& scene);

  double delta() const { return overlap_.delta; }
  double eigenvalue(int sign) const { return 0.5 * (1.0 + sign * overlap_.delta); }
  const OverlapResult& overlap() const { return overlap_; }
  const MatrixElements& elements() const { return elements_; }

  /// <e_i| d/ds_mu |e_j>, signs i, j in {+1, -1}.
  Complex s_element(int i, int j, int mu) const;
  /// <e_i| d/dl_mu |e_j>, including the d(delta) normalization term.
  Complex l_element(int i, int j, int mu) const;
  /// (d/ds_mu <e_i|) |e_i>, purely imaginary in exact arithmetic.
  Complex s_braderiv(int i, int mu) const;
  /// <K_i| d/ds_mu |K_j>.
  Complex k_s_element(int i, int j, int mu) const;

 private:
  const std::vector<Complex>& eig(int sign) const {
    return sign > 0 ? e_plus_ : e_minus_;
  }

  OverlapResult overlap_;
  MatrixElements elements_;
  std::vector<double> w_;                    // quadrature weights
  std::array<std::vector<double>, 3> dpsi_;  // dPsi/dl_mu at nodes
  std::vector<Complex> k_plus_, k_minus_;    // wavefunction values
  std::vector<Complex> e_plus_, e_minus_;    // eigenstate values
};

}  // namespace pairqfi
