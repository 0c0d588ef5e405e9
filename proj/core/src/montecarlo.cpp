#include "pairqfi/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

namespace pairqfi {

void SimulationConfig::validate() const {
  if (n_centroid_draws < 1) throw ConfigError("n_centroid_draws must be >= 1");
  if (frames_per_draw < 2) throw ConfigError("frames_per_draw must be >= 2");
  if (photons_per_frame < 1) throw ConfigError("photons_per_frame must be >= 1");
  if (n_channels < 1) throw ConfigError("n_channels must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (estimator.multistart < 1) throw ConfigError("multistart must be >= 1");
  if (!(estimator.tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (sigma_s.x < 0 || sigma_s.y < 0 || sigma_s.z < 0)
    throw ConfigError("sigma_s components must be >= 0");
  estimator_quadrature.validate();
}

CountFrame sample_frame(std::span<const double> probs, long long photons,
                        Philox4x32& rng) {
  if (probs.size() < 2) throw Error("sample_frame: need at least two buckets");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= -1e-10) || !(p <= 1.0 + 1e-10))
      throw Error("sample_frame: probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw Error("sample_frame: probabilities do not sum to 1 within 1e-10");
  if (photons < 0) throw Error("sample_frame: negative photon count");

  const std::size_t n_channels = probs.size() - 1;
  CountFrame frame;
  frame.total = photons;
  frame.counts.assign(n_channels, 0);

  // std::binomial_distribution reaches lgamma(), which writes libm's global
  // signgam flag; serialize the draws so concurrent frames stay race-free.
  // Counts depend only on this frame's own rng stream, so the lock order
  // cannot change any output.
  static std::mutex lgamma_guard;
  const std::lock_guard<std::mutex> lock(lgamma_guard);

  long long remaining = photons;
  double denom = 1.0;
  for (std::size_t n = 0; n < n_channels; ++n) {
    if (remaining == 0) break;
    const double p_cond =
        denom > 0.0 ? std::clamp(probs[n] / denom, 0.0, 1.0) : 1.0;
    long long m;
    if (p_cond <= 0.0) {
      m = 0;
    } else if (p_cond >= 1.0) {
      m = remaining;
    } else {
      std::binomial_distribution<long long> binom(remaining, p_cond);
      m = binom(rng);
    }
    frame.counts[n] = m;
    remaining -= m;
    denom -= probs[n];
  }
  frame.residual = remaining;
  return frame;
}

Vec3 draw_centroid(const Vec3& sigma, Philox4x32& rng) {
  Vec3 s;
  for (int i = 0; i < 3; ++i) {
    if (sigma[i] > 0.0) {
      std::normal_distribution<double> gauss(0.0, sigma[i]);
      s[i] = gauss(rng);
    }
  }
  return s;
}

namespace {

/// Nelder-Mead on an R^3 objective. Returns true when the simplex collapsed
/// below the tolerance before the iteration cap.
template <typename F>
bool nelder_mead(F&& objective, Vec3& x, double& fx, double init_step,
                 double tolerance, int max_iterations, int& evaluations) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  std::array<Vec3, 4> pts;
  std::array<double, 4> vals;
  pts[0] = x;
  for (int i = 0; i < 3; ++i) {
    pts[static_cast<std::size_t>(i) + 1] = x;
    pts[static_cast<std::size_t>(i) + 1][i] += init_step;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    vals[i] = objective(pts[i]);
    ++evaluations;
  }

  auto order = [&] {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(),
              [&](int a2, int b2) { return vals[static_cast<std::size_t>(a2)] < vals[static_cast<std::size_t>(b2)]; });
    std::array<Vec3, 4> p2;
    std::array<double, 4> v2;
    for (std::size_t i = 0; i < 4; ++i) {
      p2[i] = pts[static_cast<std::size_t>(idx[i])];
      v2[i] = vals[static_cast<std::size_t>(idx[i])];
    }
    pts = p2;
    vals = v2;
  };

  bool converged = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    order();
    double extent = 0.0;
    for (std::size_t i = 1; i < 4; ++i)
      extent = std::max(extent, (pts[i] - pts[0]).max_abs());
    if (extent < tolerance) {
      converged = true;
      break;
    }

    const Vec3 centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
    const Vec3 reflected = centroid + kReflect * (centroid - pts[3]);
    const double f_reflected = objective(reflected);
    ++evaluations;

    if (f_reflected < vals[0]) {
      const Vec3 expanded = centroid + kExpand * (reflected - centroid);
      const double f_expanded = objective(expanded);
      ++evaluations;
      if (f_expanded < f_reflected) {
        pts[3] = expanded;
        vals[3] = f_expanded;
      } else {
        pts[3] = reflected;
        vals[3] = f_reflected;
      }
    } else if (f_reflected < vals[2]) {
      pts[3] = reflected;
      vals[3] = f_reflected;
    } else {
      const bool outside = f_reflected < vals[3];
      const Vec3 toward = outside ? reflected : pts[3];
      const Vec3 contracted = centroid + kContract * (toward - centroid);
      const double f_contracted = objective(contracted);
      ++evaluations;
      if (f_contracted < std::min(f_reflected, vals[3])) {
        pts[3] = contracted;
        vals[3] = f_contracted;
      } else {
        for (std::size_t i = 1; i < 4; ++i) {
          pts[i] = pts[0] + kShrink * (pts[i] - pts[0]);
          vals[i] = objective(pts[i]);
          ++evaluations;
        }
      }
    }
  }
  order();
  x = pts[0];
  fx = vals[0];
  return converged;
}

constexpr std::array<Vec3, 8> kStartPattern = {
    Vec3{0, 0, 0},   Vec3{1, 1, 1},   Vec3{-1, 1, -1}, Vec3{1, -1, -1},
    Vec3{-1, -1, 1}, Vec3{1, 1, -1},  Vec3{-1, 1, 1},  Vec3{1, -1, 1}};

}  // namespace

MlEstimate ml_estimate(const CountFrame& frame, const ChannelEvaluator& evaluator,
                       const Vec3& init, const MlSettings& settings) {
  if (static_cast<int>(frame.counts.size()) != evaluator.n_channels())
    throw ConfigError("frame channel count does not match the evaluator");

  auto negative_loglike = [&](const Vec3& l) {
    return -evaluator.log_likelihood(frame.counts, frame.residual, l);
  };

  MlEstimate best;
  const int n_starts = std::min<int>(settings.multistart, kStartPattern.size());
  for (int s = 0; s < n_starts; ++s) {
    Vec3 x = init + settings.jitter * kStartPattern[static_cast<std::size_t>(s)];
    double fx = 0.0;
    int evals = 0;
    const bool converged =
        nelder_mead(negative_loglike, x, fx, 0.02, settings.tolerance,
                    settings.max_iterations, evals);
    best.evaluations += evals;
    if (s == 0) {
      best.l_hat = x;
      best.log_likelihood = -fx;
      best.converged = converged;
      continue;
    }
    // The channel probabilities are even in each component of l, so mirror
    // basins tie exactly in likelihood; ties go to the basin of the init.
    const double tie = 1e-6 * (1.0 + std::abs(best.log_likelihood));
    const bool strictly_better = -fx > best.log_likelihood + tie;
    const bool tied_but_nearer =
        -fx > best.log_likelihood - tie &&
        (x - init).norm() < (best.l_hat - init).norm();
    if (strictly_better || tied_but_nearer) {
      best.l_hat = x;
      best.log_likelihood = -fx;
      best.converged = converged;
    }
  }
  return best;
}

namespace {

struct FrameResult {
  Vec3 l_hat;
  bool converged = false;
};

Vec3 sample_variance(const std::vector<FrameResult>& results, Vec3* mean_out) {
  const double n = static_cast<double>(results.size());
  Vec3 mean;
  for (const FrameResult& r : results) mean = mean + r.l_hat;
  mean = mean / n;
  Vec3 var;
  for (const FrameResult& r : results) {
    const Vec3 d = r.l_hat - mean;
    var = var + Vec3{d.x * d.x, d.y * d.y, d.z * d.z};
  }
  var = var / (n - 1.0);
  if (mean_out) *mean_out = mean;
  return var;
}

/// CRB diagonal for M photons at one scene; nan + flag when the FI block is
/// singular (no matched filter for a parameter).
Vec3 crb_diag_at(const ChannelEvaluator& evaluator, const Vec3& l, const Vec3& s,
                 double photons, bool* singular) {
  const ChannelModel model = evaluator.derivatives({l, s});
  const FisherMatrix fi = classical_fi(model, photons);
  const Vec3 eig = eigenvalues_symmetric(fi.j_ll);
  if (eig.x <= 1e-10 * std::max(1.0, eig.z)) {
    *singular = true;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  *singular = false;
  return adjugate_inverse(fi.j_ll).diag();
}

}  // namespace

EstimationReport run_experiment(const SimulationConfig& config,
                                const PupilFunction& pupil,
                                const ZernikeBasis& basis) {
  config.validate();
  if (basis.n_modes() < config.n_channels)
    throw ConfigError("Zernike basis has fewer modes than n_channels");

  const ChannelEvaluator generator(pupil, basis, config.n_channels);
  const PupilFunction estimator_pupil =
      pupil.resampled(config.estimator_quadrature);
  const ChannelEvaluator estimator(estimator_pupil, basis, config.n_channels);

  const double photons = static_cast<double>(config.photons_per_frame);

  EstimationReport report;
  report.photons_per_frame = config.photons_per_frame;
  report.branch_note =
      "l -> -l likelihood ambiguity resolved toward the initialization point "
      "(init = true_l)";
  report.qcrb_diag = adjugate_inverse(compute_h_ll(pupil)).diag() / photons;
  report.crb_s0_diag = crb_diag_at(generator, config.true_l, Vec3{}, photons,
                                   &report.crb_s0_singular);

  Vec3 crb_avg;
  bool crb_avg_valid = true;

  for (int d = 0; d < config.n_centroid_draws; ++d) {
    DrawReport draw;
    draw.draw_index = d;
    Philox4x32 centroid_rng = centroid_stream(config.seed, static_cast<std::uint32_t>(d));
    draw.s = draw_centroid(config.sigma_s, centroid_rng);

    const std::vector<double> probs =
        generator.probabilities({config.true_l, draw.s});
    draw.crb_diag =
        crb_diag_at(generator, config.true_l, draw.s, photons, &draw.crb_singular);
    if (draw.crb_singular)
      crb_avg_valid = false;
    else
      crb_avg = crb_avg + draw.crb_diag;

    std::vector<FrameResult> results(
        static_cast<std::size_t>(config.frames_per_draw));
    auto run_frames = [&](int begin, int end) {
      for (int f = begin; f < end; ++f) {
        Philox4x32 rng = frame_stream(config.seed, static_cast<std::uint32_t>(d),
                                      static_cast<std::uint32_t>(f));
        const CountFrame frame =
            sample_frame(probs, config.photons_per_frame, rng);
        const MlEstimate est =
            ml_estimate(frame, estimator, config.true_l, config.estimator);
        results[static_cast<std::size_t>(f)] = {est.l_hat, est.converged};
      }
    };

    if (config.threads == 1) {
      run_frames(0, config.frames_per_draw);
    } else {
      std::vector<std::thread> workers;
      const int chunk =
          (config.frames_per_draw + config.threads - 1) / config.threads;
      for (int t = 0; t < config.threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(config.frames_per_draw, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back(run_frames, begin, end);
      }
      for (std::thread& w : workers) w.join();
    }

    for (const FrameResult& r : results)
      if (!r.converged) ++draw.flagged_frames;
    report.total_flagged += draw.flagged_frames;
    draw.estimate_variance = sample_variance(results, &draw.estimate_mean);
    report.draws.push_back(draw);
  }

  const double n_draws = static_cast<double>(config.n_centroid_draws);
  for (const DrawReport& draw : report.draws)
    report.variance_mean = report.variance_mean + draw.estimate_variance;
  report.variance_mean = report.variance_mean / n_draws;
  for (const DrawReport& draw : report.draws) {
    const Vec3 dvar = draw.estimate_variance - report.variance_mean;
    report.variance_std =
        report.variance_std + Vec3{dvar.x * dvar.x, dvar.y * dvar.y, dvar.z * dvar.z};
  }
  report.variance_std =
      (config.n_centroid_draws > 1)
          ? Vec3{std::sqrt(report.variance_std.x / (n_draws - 1.0)),
                 std::sqrt(report.variance_std.y / (n_draws - 1.0)),
                 std::sqrt(report.variance_std.z / (n_draws - 1.0))}
          : Vec3{};
  if (crb_avg_valid) {
    report.crb_draw_avg_diag = crb_avg / n_draws;
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.crb_draw_avg_diag = {nan, nan, nan};
  }
  return report;
}

}  // namespace pairqfi
