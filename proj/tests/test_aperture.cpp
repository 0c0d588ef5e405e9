#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "pairqfi/aperture.hpp"
#include "pairqfi/zernike.hpp"

using namespace pairqfi;
using oracles::kPi;

TEST_SUITE("aperture") {

TEST_CASE("clear pupil is normalized and matches 1/pi intensity") {
  const PupilFunction pupil = PupilFunction::clear_circular({80, 160, 2});
  double norm = 0.0;
  for (double w : pupil.intensity_weights()) norm += w;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::norm(pupil.amplitude()[0]) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  CHECK(pupil.kind() == PupilKind::ClearCircular);
  for (const AperturePoint& p : pupil.nodes()) CHECK(p.uu() <= 1.0 + 1e-14);
  for (double w : pupil.weights()) CHECK(w > 0.0);
}

TEST_CASE("aperture averages reproduce analytic disk moments") {
  const PupilFunction pupil = PupilFunction::clear_circular();
  CHECK(pupil.average([](AperturePoint) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pupil.average([](AperturePoint p) { return p.ux * p.ux; }) ==
        doctest::Approx(0.25).epsilon(1e-9));
  CHECK(pupil.average([](AperturePoint p) { return p.uu() * p.uu(); }) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(pupil.average([](AperturePoint p) { return p.uu(); }) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(pupil.average([](AperturePoint p) { return p.ux; })) < 1e-10);
}

TEST_CASE("quadrature integrates polynomial moments to near machine precision") {
  const PupilFunction pupil = PupilFunction::clear_circular();
  for (int a = 0; a <= 12; a += 2) {
    for (int b = 0; b <= 12 - a; b += 2) {
      const double expected = oracles::disk_moment(a, b);
      const double got = pupil.average([a, b](AperturePoint p) {
        return std::pow(p.ux, a) * std::pow(p.uy, b);
      });
      CHECK(std::abs(got - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
  // spot-check a high even degree against the closed form
  const double high = pupil.average(
      [](AperturePoint p) { return std::pow(p.ux, 20) * std::pow(p.uy, 10); });
  CHECK(high == doctest::Approx(oracles::disk_moment(20, 10)).epsilon(1e-12));
}

TEST_CASE("odd integrands vanish by parity") {
  const PupilFunction pupil = PupilFunction::clear_circular();
  CHECK(std::abs(pupil.average([](AperturePoint p) { return p.ux * p.uu(); })) < 1e-10);
  CHECK(std::abs(pupil.average([](AperturePoint p) { return p.uy; })) < 1e-10);
  CHECK(std::abs(pupil.average(
            [](AperturePoint p) { return p.ux * p.ux * p.uy; })) < 1e-10);
}

TEST_CASE("invalid quadrature specs are rejected") {
  CHECK_THROWS_AS(PupilFunction::clear_circular({3, 160, 2}), ConfigError);
  CHECK_THROWS_AS(PupilFunction::clear_circular({80, 7, 2}), ConfigError);
  CHECK_THROWS_AS(PupilFunction::clear_circular({80, 160, 1}), ConfigError);
}

TEST_CASE("user-supplied pupil is renormalized with the factor recorded") {
  const PupilFunction pupil = PupilFunction::from_amplitude(
      [](AperturePoint p) { return Complex(std::exp(-p.uu()), 0.0); });
  double norm = 0.0;
  for (double w : pupil.intensity_weights()) norm += w;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pupil.kind() == PupilKind::UserSupplied);
  CHECK(std::abs(pupil.normalization_rescale() - 1.0) > 1e-6);
}

TEST_CASE("check_convergence flags only under-resolved integrands") {
  const PupilFunction pupil = PupilFunction::clear_circular();

  auto constant = [](AperturePoint) { return Complex(1.0, 0.0); };
  CHECK(check_convergence(pupil, constant).est_error < 1e-12);

  // moderately oscillatory: exp(i 4 pi u_x l) at l = 0.5 has the closed
  // form 2 J1(2 pi)/(2 pi); both specs nail it
  auto moderate = [](AperturePoint p) {
    const double phase = 4.0 * kPi * p.ux * 0.5;
    return Complex(std::cos(phase), std::sin(phase));
  };
  const ConvergenceEstimate mid = check_convergence(pupil, moderate);
  CHECK(mid.est_error < 1e-8);
  const double jinc = 2.0 * std::cyl_bessel_j(1, 2.0 * kPi) / (2.0 * kPi);
  CHECK(mid.value.real() == doctest::Approx(jinc).epsilon(1e-9));

  // wildly oscillatory: l = 20 is far beyond what (80,160) resolves
  auto fast = [](AperturePoint p) {
    const double phase = 4.0 * kPi * p.ux * 20.0;
    return Complex(std::cos(phase), std::sin(phase));
  };
  CHECK(check_convergence(pupil, fast).est_error > 1e-3);
}

TEST_CASE("aperture_average rejects non-finite integrands") {
  const PupilFunction pupil = PupilFunction::clear_circular({8, 16, 2});
  CHECK_THROWS_AS(aperture_average(pupil,
                                   [](AperturePoint p) {
                                     return Complex(1.0 / (p.uu() - p.uu()), 0.0);
                                   }),
                  Error);
}

}  // TEST_SUITE

TEST_SUITE("zernike") {

TEST_CASE("noll index mapping") {
  auto check_nm = [](int j, int n, int m) {
    const NollIndex nm = noll_to_nm(j);
    CHECK(nm.n == n);
    CHECK(nm.m == m);
  };
  check_nm(1, 0, 0);
  check_nm(2, 1, 1);
  check_nm(3, 1, -1);
  check_nm(4, 2, 0);
  check_nm(5, 2, -2);
  check_nm(6, 2, 2);
  check_nm(7, 3, -1);
  check_nm(8, 3, 1);
  check_nm(9, 3, -3);
  check_nm(10, 3, 3);
  check_nm(11, 4, 0);
}

TEST_CASE("low-order values match the published table") {
  const ZernikeBasis basis = ZernikeBasis::noll(11);
  CHECK(basis.eval(1, {0.3, -0.4}) == doctest::Approx(1.0));
  CHECK(basis.eval(4, {0.0, 0.0}) == doctest::Approx(-std::sqrt(3.0)));
  CHECK(basis.eval(2, {1.0, 0.0}) == doctest::Approx(2.0));

  for (int j = 1; j <= 11; ++j) {
    for (double r : {0.0, 0.3, 0.7, 1.0}) {
      for (double theta : {0.0, 0.9, 2.4, -1.3}) {
        const AperturePoint p{r * std::cos(theta), r * std::sin(theta)};
        CHECK(basis.eval(j, p) ==
              doctest::Approx(oracles::noll_table(j, r, theta)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("modes are orthonormal under the disk average") {
  const PupilFunction pupil = PupilFunction::clear_circular();
  const ZernikeBasis basis = ZernikeBasis::noll(6);
  // |P|^2 = 1/pi on the clear pupil, so this average is the (1/pi) integral.
  for (int j = 1; j <= 6; ++j) {
    for (int k = 1; k <= 6; ++k) {
      const double inner = pupil.average(
          [&](AperturePoint p) { return basis.eval(j, p) * basis.eval(k, p); });
      CHECK(std::abs(inner - (j == k ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("out-of-range indices throw") {
  const ZernikeBasis basis = ZernikeBasis::noll(4);
  CHECK_THROWS_AS(basis.eval(0, {0, 0}), ConfigError);
  CHECK_THROWS_AS(basis.eval(5, {0, 0}), ConfigError);
  CHECK_THROWS_AS(ZernikeBasis::noll(0), ConfigError);
}

}  // TEST_SUITE
