#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nbscatter/blowup.hpp"
#include "nbscatter/kepler.hpp"
#include "nbscatter/nbody.hpp"

using namespace nbs;

TEST_CASE("kepler orbit construction") {
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
  CHECK(orb.a == doctest::Approx(1.0));
  CHECK(orb.mu == doctest::Approx(1.0));
  CHECK(orb.omega == doctest::Approx(2.0));
  CHECK(orb.a * 2.0 * orb.h == doctest::Approx(orb.m1 * orb.m2));
  CHECK_THROWS_AS(KeplerOrbit::from_energy(1.0, 1.0, -1.0, 2.0), InvalidState);
  CHECK_THROWS_AS(KeplerOrbit::from_energy(1.0, 1.0, 1.0, 0.5), InvalidState);
}

TEST_CASE("perihelion state") {
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
  Eigen::Vector2d q = kepler_relative_position(orb, 0.0);
  CHECK(q.x() == doctest::Approx(orb.a * (orb.e - 1.0)));
  CHECK(q.y() == doctest::Approx(0.0));
  Eigen::Vector2d v = kepler_relative_velocity(orb, 0.0);
  CHECK(std::abs(v.x()) < 1e-14);  // radial velocity vanishes
  CHECK(kepler_time(orb, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("closed form satisfies Newton's equations") {
  KeplerOrbit orb = KeplerOrbit::from_energy(3.0, 1.0, 1.5, 2.5);
  MassSystem sys = kepler_system(orb);
  for (double tau : {-2.0, -0.5, 0.0, 0.8, 2.2}) {
    auto [q, xi] = kepler_state(orb, tau);
    // energy is conserved exactly
    CHECK(energy(q, xi, sys) == doctest::Approx(orb.h).epsilon(1e-12));
    // r = |q|_M
    CHECK(sys.norm(q) == doctest::Approx(kepler_radius(orb, tau)).epsilon(1e-12));
    // acceleration: finite difference of velocity in t against grad U
    double r = kepler_radius(orb, tau);
    double dtau = 1e-6;
    auto [qp, xip] = kepler_state(orb, tau + dtau);
    auto [qm, xim] = kepler_state(orb, tau - dtau);
    Vec accel = (xip - xim) / (kepler_time(orb, tau + dtau) -
                               kepler_time(orb, tau - dtau));
    Vec g = grad_potential(q, sys);
    CHECK((accel - g).cwiseAbs().maxCoeff() < 1e-6 / r);
    // velocity consistency: dq/dt = xi
    Vec dq = (qp - qm) / (kepler_time(orb, tau + dtau) -
                          kepler_time(orb, tau - dtau));
    CHECK((dq - xi).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("scattering closed forms") {
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
  MassSystem sys = kepler_system(orb);
  KeplerScattering ks = kepler_scattering(orb);

  CHECK(ks.A.x() == doctest::Approx(1.0));
  CHECK(ks.A.y() == doctest::Approx(std::sqrt(3.0)));
  CHECK(ks.C.x() == doctest::Approx(1.5));
  CHECK(ks.C.y() == doctest::Approx(-std::sqrt(3.0) / 2.0));

  // |A|^2_M = 2h, <A, C>_M = 0, |C| = |C'|
  Vec A = kepler_embed(orb, ks.A);
  Vec C = kepler_embed(orb, ks.C);
  Vec Cp = kepler_embed(orb, ks.Cp);
  CHECK(sys.inner(A, A) == doctest::Approx(2.0 * orb.h).epsilon(1e-12));
  CHECK(std::abs(sys.inner(A, C)) < 1e-12);
  CHECK(sys.norm(C) == doctest::Approx(sys.norm(Cp)).epsilon(1e-12));
  // equal lengths proportional to a sqrt(e^2 - 1)
  CHECK(sys.norm(C) == doctest::Approx(orb.a * std::sqrt(orb.e * orb.e - 1.0) *
                                       std::sqrt(orb.mu)).epsilon(1e-12));

  // C = s1 / rho1
  CHECK(((ks.s1 / ks.rho1) - ks.C).cwiseAbs().maxCoeff() < 1e-13);

  // asymptote directions: A is parallel to -s0 scaled by omega
  Vec s0 = kepler_embed(orb, ks.s0);
  CHECK(sys.norm(s0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((kepler_embed(orb, ks.A) + orb.omega * s0).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("closed form matches the asymptotic expansion of the orbit") {
  // q(t) - (A' t + B' log t + C' + ofs) -> 0 along the future branch. C' is
  // projected orthogonal to A', so the constant term carries an extra piece
  // along s0' fixed by the time-origin convention t(0) = perihelion:
  // ofs = (U(s0')/v0^2)(log(rho1 v0) - 1) s0'.
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
  MassSystem sys = kepler_system(orb);
  KeplerScattering ks = kepler_scattering(orb);
  Vec A = kepler_embed(orb, ks.Ap);
  Vec C = kepler_embed(orb, ks.Cp);
  Vec B = -grad_potential(A, sys);
  Vec s0p = kepler_embed(orb, ks.s0p);
  double v0 = orb.omega;
  double U = potential(s0p, sys);
  Vec ofs = (U / (v0 * v0)) * (std::log(ks.rho1 * v0) - 1.0) * s0p;
  double prev = 1e300;
  for (double tau : {6.0, 8.0, 10.0}) {
    auto [q, xi] = kepler_state(orb, tau);
    double t = kepler_time(orb, tau);
    double dev = sys.norm(q - (A * t + B * std::log(t) + C + ofs));
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("scattering angle sweeps toward pi as e -> 1") {
  double prev_angle = 0.0;
  for (double e : {8.0, 4.0, 2.0, 1.5, 1.2, 1.05, 1.01, 1.001}) {
    KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, e);
    KeplerScattering ks = kepler_scattering(orb);
    double cosang = ks.A.dot(ks.Ap) / (ks.A.norm() * ks.Ap.norm());
    double ang = std::acos(std::clamp(cosang, -1.0, 1.0));
    CHECK(ang > prev_angle);  // monotone toward pi
    CHECK(ang < std::numbers::pi);
    prev_angle = ang;
  }
  CHECK(prev_angle > 3.0);
}
