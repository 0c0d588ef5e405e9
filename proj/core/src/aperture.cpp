#include "pairqfi/aperture.hpp"

#include <cmath>
#include <numbers>

namespace pairqfi {

namespace {
constexpr double kPi = std::numbers::pi;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  // Newton iteration on P_n, seeded with the Chebyshev-like estimate.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

DiskQuadrature build_disk_quadrature(const QuadratureSpec& spec) {
  spec.validate();
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(spec.n_radial, gl_nodes, gl_weights);

  DiskQuadrature q;
  const std::size_t count =
      static_cast<std::size_t>(spec.n_radial) * static_cast<std::size_t>(spec.n_angular);
  q.nodes.reserve(count);
  q.weights.reserve(count);

  const double dtheta = 2.0 * kPi / spec.n_angular;
  std::vector<double> ct(static_cast<std::size_t>(spec.n_angular));
  std::vector<double> st(static_cast<std::size_t>(spec.n_angular));
  for (int j = 0; j < spec.n_angular; ++j) {
    ct[static_cast<std::size_t>(j)] = std::cos(dtheta * j);
    st[static_cast<std::size_t>(j)] = std::sin(dtheta * j);
  }

  for (int i = 0; i < spec.n_radial; ++i) {
    const double r = 0.5 * (gl_nodes[static_cast<std::size_t>(i)] + 1.0);
    const double wr = 0.5 * gl_weights[static_cast<std::size_t>(i)] * r;
    for (int j = 0; j < spec.n_angular; ++j) {
      q.nodes.push_back({r * ct[static_cast<std::size_t>(j)],
                         r * st[static_cast<std::size_t>(j)]});
      q.weights.push_back(wr * dtheta);
    }
  }
  return q;
}

PupilFunction PupilFunction::clear_circular(const QuadratureSpec& spec) {
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  PupilFunction p = from_amplitude(
      [inv_sqrt_pi](AperturePoint) { return Complex(inv_sqrt_pi, 0.0); }, spec);
  p.kind_ = PupilKind::ClearCircular;
  return p;
}

PupilFunction PupilFunction::from_amplitude(Amplitude amplitude,
                                            const QuadratureSpec& spec) {
  DiskQuadrature q = build_disk_quadrature(spec);
  PupilFunction p;
  p.spec_ = spec;
  p.kind_ = PupilKind::UserSupplied;
  p.amp_fn_ = std::move(amplitude);
  p.nodes_ = std::move(q.nodes);
  p.weights_ = std::move(q.weights);

  p.amp_.resize(p.nodes_.size());
  double norm = 0.0;
  for (std::size_t k = 0; k < p.nodes_.size(); ++k) {
    const Complex a = p.amp_fn_(p.nodes_[k]);
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw Error("pupil amplitude is not finite at a quadrature node");
    p.amp_[k] = a;
    norm += p.weights_[k] * std::norm(a);
  }
  if (!(norm > 0.0))
    throw ConfigError("pupil amplitude is identically zero on the disk");

  p.rescale_ = 1.0 / std::sqrt(norm);
  p.iw_.resize(p.nodes_.size());
  for (std::size_t k = 0; k < p.nodes_.size(); ++k) {
    p.amp_[k] *= p.rescale_;
    p.iw_[k] = p.weights_[k] * std::norm(p.amp_[k]);
  }
  return p;
}

PupilFunction PupilFunction::resampled(const QuadratureSpec& spec) const {
  PupilFunction p = from_amplitude(amp_fn_, spec);
  p.kind_ = kind_;
  return p;
}

Complex aperture_average(const PupilFunction& pupil,
                         const std::function<Complex(AperturePoint)>& f) {
  Complex acc{};
  auto nodes = pupil.nodes();
  auto iw = pupil.intensity_weights();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Complex v = f(nodes[k]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error("aperture_average: integrand not finite at a quadrature node");
    acc += iw[k] * v;
  }
  return acc;
}

ConvergenceEstimate check_convergence(
    const PupilFunction& pupil, const std::function<Complex(AperturePoint)>& f) {
  const Complex coarse = aperture_average(pupil, f);
  const Complex fine = aperture_average(pupil.refined(), f);
  return {coarse, std::abs(fine - coarse)};
}

}  // namespace pairqfi
