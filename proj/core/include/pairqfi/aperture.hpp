#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "pairqfi/errors.hpp"
#include "pairqfi/linalg.hpp"

namespace pairqfi {

/// Point in the pupil plane, in units of the pupil radius.
struct AperturePoint {
  double ux = 0.0;
  double uy = 0.0;
  double uu() const { return ux * ux + uy * uy; }
};

/// Product rule on the unit disk: Gauss-Legendre in radius (mapped to [0,1]
/// with the r Jacobian) times a uniform trapezoid rule in angle. The angular
/// rule is exact for trigonometric polynomials up to order n_angular/2; the
/// radial rule is exact for polynomials up to degree 2*n_radial - 1.
struct QuadratureSpec {
  int n_radial = 80;
  int n_angular = 160;
  int refinement_factor = 2;

  void validate() const {
    if (n_radial < 4) throw ConfigError("n_radial must be >= 4");
    if (n_angular < 8) throw ConfigError("n_angular must be >= 8");
    if (refinement_factor < 2) throw ConfigError("refinement_factor must be >= 2");
  }

  QuadratureSpec refined() const {
    return {n_radial * refinement_factor, n_angular * refinement_factor,
            refinement_factor};
  }
};

struct DiskQuadrature {
  std::vector<AperturePoint> nodes;
  std::vector<double> weights;  // sum to pi (area of the unit disk)
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

DiskQuadrature build_disk_quadrature(const QuadratureSpec& spec);

enum class PupilKind { ClearCircular, UserSupplied };

/// Complex pupil amplitude P(u) sampled on a disk quadrature, normalized so
/// that sum(w |P|^2) = 1. The amplitude callable is retained so the same
/// pupil can be resampled at a finer spec for convergence checks.
class PupilFunction {
 public:
  using Amplitude = std::function<Complex(AperturePoint)>;

  /// P(u) = 1/sqrt(pi) inside the unit disk.
  static PupilFunction clear_circular(const QuadratureSpec& spec = {});

  /// Arbitrary amplitude; rescaled to satisfy the normalization. The applied
  /// rescale factor is recorded so callers can warn when it departs from 1.
  static PupilFunction from_amplitude(Amplitude amplitude,
                                      const QuadratureSpec& spec = {});

  std::span<const AperturePoint> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const Complex> amplitude() const { return amp_; }
  /// w_k |P(u_k)|^2 — the aperture-average measure; sums to 1.
  std::span<const double> intensity_weights() const { return iw_; }

  PupilKind kind() const { return kind_; }
  const QuadratureSpec& spec() const { return spec_; }
  double normalization_rescale() const { return rescale_; }

  /// Same pupil sampled at the given spec (normalization reapplied).
  PupilFunction resampled(const QuadratureSpec& spec) const;
  PupilFunction refined() const { return resampled(spec_.refined()); }

  /// |P|^2-weighted average of f over the aperture. f may return double or
  /// Complex; the result type follows.
  template <typename F>
  auto average(F&& f) const {
    using R = std::invoke_result_t<F, AperturePoint>;
    R acc{};
    for (std::size_t k = 0; k < nodes_.size(); ++k) acc += iw_[k] * f(nodes_[k]);
    return acc;
  }

 private:
  PupilFunction() = default;

  QuadratureSpec spec_;
  PupilKind kind_ = PupilKind::ClearCircular;
  Amplitude amp_fn_;
  std::vector<AperturePoint> nodes_;
  std::vector<double> weights_;
  std::vector<Complex> amp_;
  std::vector<double> iw_;
  double rescale_ = 1.0;
};

/// Weighted aperture average with finiteness checking at every node.
Complex aperture_average(const PupilFunction& pupil,
                         const std::function<Complex(AperturePoint)>& f);

struct ConvergenceEstimate {
  Complex value;      // at the pupil's own spec
  double est_error;   // |value - value at refined spec|
};

/// Evaluates the aperture average at the pupil's spec and at the refined
/// spec and reports their difference. Callers decide what tolerance means.
ConvergenceEstimate check_convergence(
    const PupilFunction& pupil, const std::function<Complex(AperturePoint)>& f);

}  // namespace pairqfi
