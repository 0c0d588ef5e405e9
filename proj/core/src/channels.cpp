#include "pairqfi/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pairqfi {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFdStep = 1e-4;
constexpr double kFdRelTolerance = 1e-5;
}  // namespace

ChannelEvaluator::ChannelEvaluator(const PupilFunction& pupil,
                                   const ZernikeBasis& basis, int n_channels)
    : n_(n_channels) {
  if (n_channels < 1) throw ConfigError("need at least one projection channel");
  if (n_channels > basis.n_modes())
    throw ConfigError("Zernike basis has fewer modes than requested channels");

  auto nodes = pupil.nodes();
  auto weights = pupil.weights();
  auto amp = pupil.amplitude();
  n_nodes_ = nodes.size();

  ux_.resize(n_nodes_);
  uy_.resize(n_nodes_);
  uu_.resize(n_nodes_);
  for (std::size_t k = 0; k < n_nodes_; ++k) {
    ux_[k] = nodes[k].ux;
    uy_[k] = nodes[k].uy;
    uu_[k] = nodes[k].uu();
  }

  // The projection mode is Z_n / sqrt(pi), unit-normalized on the disk.
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  coeff_.resize(static_cast<std::size_t>(n_) * n_nodes_);
  for (int n = 0; n < n_; ++n)
    for (std::size_t k = 0; k < n_nodes_; ++k)
      coeff_[static_cast<std::size_t>(n) * n_nodes_ + k] =
          weights[k] * basis.eval(n + 1, nodes[k]) * inv_sqrt_pi * amp[k];
}

std::vector<double> ChannelEvaluator::probabilities(const SceneParams& scene) const {
  std::vector<Complex> a_plus(static_cast<std::size_t>(n_));
  std::vector<Complex> a_minus(static_cast<std::size_t>(n_));

  for (std::size_t k = 0; k < n_nodes_; ++k) {
    const double s_phase = kTwoPi * (scene.s.x * ux_[k] + scene.s.y * uy_[k]) +
                           kPi * scene.s.z * uu_[k];
    const double psi = kTwoPi * (scene.l.x * ux_[k] + scene.l.y * uy_[k]) +
                       kPi * scene.l.z * uu_[k];
    const Complex ph_plus(std::cos(s_phase + psi), -std::sin(s_phase + psi));
    const Complex ph_minus(std::cos(psi - s_phase), std::sin(psi - s_phase));
    for (int n = 0; n < n_; ++n) {
      const Complex c = coeff_[static_cast<std::size_t>(n) * n_nodes_ + k];
      a_plus[static_cast<std::size_t>(n)] += c * ph_plus;
      a_minus[static_cast<std::size_t>(n)] += c * ph_minus;
    }
  }

  std::vector<double> probs(static_cast<std::size_t>(n_) + 1);
  double sum = 0.0;
  for (int n = 0; n < n_; ++n) {
    const double p = 0.5 * (std::norm(a_plus[static_cast<std::size_t>(n)]) +
                            std::norm(a_minus[static_cast<std::size_t>(n)]));
    probs[static_cast<std::size_t>(n)] = p;
    sum += p;
  }
  probs[static_cast<std::size_t>(n_)] = std::max(0.0, 1.0 - sum);
  return probs;
}

ChannelModel ChannelEvaluator::derivatives(const SceneParams& scene) const {
  const std::size_t nn = static_cast<std::size_t>(n_);
  std::vector<Complex> a_plus(nn), a_minus(nn);
  std::vector<std::array<Complex, 3>> t_plus(nn), t_minus(nn);

  for (std::size_t k = 0; k < n_nodes_; ++k) {
    const double s_phase = kTwoPi * (scene.s.x * ux_[k] + scene.s.y * uy_[k]) +
                           kPi * scene.s.z * uu_[k];
    const double psi = kTwoPi * (scene.l.x * ux_[k] + scene.l.y * uy_[k]) +
                       kPi * scene.l.z * uu_[k];
    const Complex ph_plus(std::cos(s_phase + psi), -std::sin(s_phase + psi));
    const Complex ph_minus(std::cos(psi - s_phase), std::sin(psi - s_phase));
    const double dpsi[3] = {kTwoPi * ux_[k], kTwoPi * uy_[k], kPi * uu_[k]};
    for (int n = 0; n < n_; ++n) {
      const Complex c = coeff_[static_cast<std::size_t>(n) * n_nodes_ + k];
      const Complex cp = c * ph_plus;
      const Complex cm = c * ph_minus;
      a_plus[static_cast<std::size_t>(n)] += cp;
      a_minus[static_cast<std::size_t>(n)] += cm;
      for (int mu = 0; mu < 3; ++mu) {
        t_plus[static_cast<std::size_t>(n)][static_cast<std::size_t>(mu)] += dpsi[mu] * cp;
        t_minus[static_cast<std::size_t>(n)][static_cast<std::size_t>(mu)] += dpsi[mu] * cm;
      }
    }
  }

  ChannelModel model;
  model.n_channels = n_;
  model.scene = scene;
  model.has_derivatives = true;
  model.probs.resize(nn);
  model.dprobs.assign(nn, Vec3{});
  double sum = 0.0;
  Vec3 dsum;
  for (std::size_t n = 0; n < nn; ++n) {
    model.probs[n] = 0.5 * (std::norm(a_plus[n]) + std::norm(a_minus[n]));
    sum += model.probs[n];
    for (int mu = 0; mu < 3; ++mu) {
      // da+-/dl_mu = -+ i t+-_mu, so dP picks up the imaginary parts.
      const double d = (std::conj(a_plus[n]) * t_plus[n][static_cast<std::size_t>(mu)]).imag() -
                       (std::conj(a_minus[n]) * t_minus[n][static_cast<std::size_t>(mu)]).imag();
      model.dprobs[n][mu] = d;
      dsum[mu] += d;
    }
  }
  model.p_residual = std::max(0.0, 1.0 - sum);
  model.dp_residual = -dsum;
  return model;
}

double ChannelEvaluator::log_likelihood(std::span<const long long> counts,
                                        long long residual_count,
                                        const Vec3& l) const {
  const std::size_t nn = static_cast<std::size_t>(n_);
  std::vector<Complex> a_plus(nn), a_minus(nn);

  for (std::size_t k = 0; k < n_nodes_; ++k) {
    const double psi = kTwoPi * (l.x * ux_[k] + l.y * uy_[k]) + kPi * l.z * uu_[k];
    const Complex ph_plus(std::cos(psi), -std::sin(psi));
    const Complex ph_minus = std::conj(ph_plus);
    for (std::size_t n = 0; n < nn; ++n) {
      const Complex c = coeff_[n * n_nodes_ + k];
      a_plus[n] += c * ph_plus;
      a_minus[n] += c * ph_minus;
    }
  }

  double sum = 0.0;
  double loglike = 0.0;
  for (std::size_t n = 0; n < nn; ++n) {
    const double p = 0.5 * (std::norm(a_plus[n]) + std::norm(a_minus[n]));
    sum += p;
    if (counts[n] != 0)
      loglike += static_cast<double>(counts[n]) * std::log(std::max(p, kProbabilityFloor));
  }
  if (residual_count != 0)
    loglike += static_cast<double>(residual_count) *
               std::log(std::max(1.0 - sum, kProbabilityFloor));
  return loglike;
}

ChannelModel channel_probabilities(const PupilFunction& pupil,
                                   const ZernikeBasis& basis,
                                   const SceneParams& scene) {
  const ChannelEvaluator evaluator(pupil, basis, basis.n_modes());
  std::vector<double> probs = evaluator.probabilities(scene);
  ChannelModel model;
  model.n_channels = basis.n_modes();
  model.scene = scene;
  model.p_residual = probs.back();
  probs.pop_back();
  model.probs = std::move(probs);
  return model;
}

ChannelModel channel_derivatives(const PupilFunction& pupil,
                                 const ZernikeBasis& basis,
                                 const SceneParams& scene) {
  const ChannelEvaluator evaluator(pupil, basis, basis.n_modes());
  ChannelModel model = evaluator.derivatives(scene);

  // Central finite differences over the probabilities as an independent
  // route; disagreement means the analytic derivative code is wrong. The
  // denominator floor of 0.05 keeps the comparison meaningful for entries
  // near matched-filter zeros, where the FD truncation remainder (~1e-7 at
  // this step) dwarfs the derivative itself.
  const std::size_t nn = model.probs.size();
  double worst = 0.0;
  for (int mu = 0; mu < 3; ++mu) {
    SceneParams hi = scene, lo = scene;
    hi.l[mu] += kFdStep;
    lo.l[mu] -= kFdStep;
    const std::vector<double> p_hi = evaluator.probabilities(hi);
    const std::vector<double> p_lo = evaluator.probabilities(lo);
    for (std::size_t n = 0; n <= nn; ++n) {
      const double fd = (p_hi[n] - p_lo[n]) / (2.0 * kFdStep);
      const double analytic =
          (n < nn) ? model.dprobs[n][mu] : model.dp_residual[mu];
      const double denom = std::max({std::abs(analytic), std::abs(fd), 0.05});
      worst = std::max(worst, std::abs(analytic - fd) / denom);
    }
  }
  model.fd_max_rel_mismatch = worst;
  if (worst > kFdRelTolerance)
    throw InternalConsistencyError(
        "analytic channel derivatives disagree with finite differences", worst);
  return model;
}

FisherMatrix classical_fi(const ChannelModel& model, double photons) {
  if (!model.has_derivatives)
    throw ConfigError("classical_fi needs a model with derivatives");
  if (!(photons > 0)) throw ConfigError("photon count must be positive");

  FisherMatrix fi;
  fi.photons = photons;

  const std::size_t nn = model.probs.size();
  int kept = 0;
  for (std::size_t n = 0; n <= nn; ++n) {
    const double p = (n < nn) ? model.probs[n] : model.p_residual;
    const Vec3 dp = (n < nn) ? model.dprobs[n] : model.dp_residual;
    if (p < kProbabilityFloor) {
      fi.dropped_channels.push_back(static_cast<int>(n) + 1);
      continue;
    }
    ++kept;
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = 0; nu < 3; ++nu)
        fi.j_ll(mu, nu) += photons * dp[mu] * dp[nu] / p;
  }
  if (kept == 0)
    throw Error("classical_fi: every channel probability is below the floor");
  return fi;
}

}  // namespace pairqfi
