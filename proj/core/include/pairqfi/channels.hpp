#pragma once

#include <span>
#include <vector>

#include "pairqfi/overlap.hpp"
#include "pairqfi/zernike.hpp"

namespace pairqfi {

/// Floor applied to channel probabilities inside Fisher-information sums and
/// log-likelihoods, so matched-filter zeros do not produce 0/0.
inline constexpr double kProbabilityFloor = 1e-12;

/// Zernike-projection channel probabilities P_1..P_N, the residual bucket
/// P_bar = 1 - sum(P_n), and (optionally) their separation derivatives.
struct ChannelModel {
  int n_channels = 0;
  std::vector<double> probs;
  double p_residual = 0.0;
  std::vector<Vec3> dprobs;  // filled by channel_derivatives
  Vec3 dp_residual;
  SceneParams scene;
  bool has_derivatives = false;
  double fd_max_rel_mismatch = 0.0;  // analytic vs central-difference check

  double prob_sum_with_residual() const {
    double s = p_residual;
    for (double p : probs) s += p;
    return s;
  }
};

/// Per-photon multinomial Fisher information scaled by the photon count.
struct FisherMatrix {
  Mat3 j_ll;
  double photons = 0.0;
  /// 1-based channel indices dropped because their probability fell below
  /// the floor; n_channels + 1 denotes the residual bucket.
  std::vector<int> dropped_channels;

  Mat3 per_photon() const { return j_ll * (1.0 / photons); }
};

/// Precomputed projection coefficients for fast repeated evaluation of the
/// channel probabilities at many separation vectors (the ML hot path).
class ChannelEvaluator {
 public:
  ChannelEvaluator(const PupilFunction& pupil, const ZernikeBasis& basis,
                   int n_channels);

  int n_channels() const { return n_; }

  /// P_1..P_N followed by P_bar (size N+1).
  std::vector<double> probabilities(const SceneParams& scene) const;

  /// Probabilities plus analytic separation derivatives (no FD check here).
  ChannelModel derivatives(const SceneParams& scene) const;

  /// log L(l) = sum_n m_n ln P_n(l; s=0) + m_bar ln P_bar(l; s=0), with
  /// probabilities floored. counts has the N channel counts.
  double log_likelihood(std::span<const long long> counts, long long residual_count,
                        const Vec3& l) const;

 private:
  int n_;
  std::size_t n_nodes_;
  std::vector<double> ux_, uy_, uu_;
  std::vector<Complex> coeff_;  // channel-major: coeff_[n * n_nodes_ + k]
};

/// Probabilities only (dprobs left empty).
ChannelModel channel_probabilities(const PupilFunction& pupil,
                                   const ZernikeBasis& basis,
                                   const SceneParams& scene);

/// Probabilities plus derivatives, cross-checked against central finite
/// differences (step 1e-4); throws InternalConsistencyError when the two
/// paths disagree by more than 1e-5 in relative terms.
ChannelModel channel_derivatives(const PupilFunction& pupil,
                                 const ZernikeBasis& basis,
                                 const SceneParams& scene);

/// J_mu_nu = M [ sum_n dP_n dP_n / P_n + dPbar dPbar / Pbar ] with
/// below-floor channels dropped from the sum.
FisherMatrix classical_fi(const ChannelModel& model, double photons);

}  // namespace pairqfi
