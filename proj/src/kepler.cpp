#include "nbscatter/kepler.hpp"

#include <cmath>

namespace nbs {

KeplerOrbit KeplerOrbit::from_energy(double m1, double m2, double h, double e) {
  if (!(h > 0.0)) throw InvalidState("KeplerOrbit: energy must be positive");
  if (!(e > 1.0)) throw InvalidState("KeplerOrbit: eccentricity must exceed 1");
  KeplerOrbit orb;
  orb.m1 = m1;
  orb.m2 = m2;
  orb.h = h;
  orb.e = e;
  orb.a = m1 * m2 / (2.0 * h);
  orb.mu = m1 * m2 / (m1 + m2);
  orb.omega = std::sqrt(2.0 * h);
  return orb;
}

Eigen::Vector2d kepler_relative_position(const KeplerOrbit& orb, double tau) {
  double ch = std::cosh(orb.omega * tau);
  double sh = std::sinh(orb.omega * tau);
  return {orb.a * orb.e - orb.a * ch,
          orb.a * std::sqrt(orb.e * orb.e - 1.0) * sh};
}

double kepler_radius(const KeplerOrbit& orb, double tau) {
  return orb.a * std::sqrt(orb.mu) *
         (orb.e * std::cosh(orb.omega * tau) - 1.0);
}

Eigen::Vector2d kepler_relative_velocity(const KeplerOrbit& orb, double tau) {
  // dq/dt = (dq/dtau) / (dt/dtau) with dt/dtau = r.
  double ch = std::cosh(orb.omega * tau);
  double sh = std::sinh(orb.omega * tau);
  Eigen::Vector2d dq_dtau{-orb.a * orb.omega * sh,
                          orb.a * std::sqrt(orb.e * orb.e - 1.0) * orb.omega * ch};
  return dq_dtau / kepler_radius(orb, tau);
}

double kepler_time(const KeplerOrbit& orb, double tau) {
  // dt/dtau = r = a sqrt(mu) (e cosh(w tau) - 1), t(0) = 0 at perihelion
  return (orb.a * std::sqrt(orb.mu) / orb.omega) *
         (orb.e * std::sinh(orb.omega * tau) - orb.omega * tau);
}

MassSystem kepler_system(const KeplerOrbit& orb) {
  return MassSystem({orb.m1, orb.m2}, 2);
}

Vec kepler_embed(const KeplerOrbit& orb, const Eigen::Vector2d& rel) {
  double M = orb.m1 + orb.m2;
  Vec q(4);
  q.segment(0, 2) = -(orb.m2 / M) * rel;
  q.segment(2, 2) = (orb.m1 / M) * rel;
  return q;
}

std::pair<Vec, Vec> kepler_state(const KeplerOrbit& orb, double tau) {
  return {kepler_embed(orb, kepler_relative_position(orb, tau)),
          kepler_embed(orb, kepler_relative_velocity(orb, tau))};
}

KeplerScattering kepler_scattering(const KeplerOrbit& orb) {
  double e = orb.e;
  double sq = std::sqrt(e * e - 1.0);
  double rmu = std::sqrt(orb.mu);
  KeplerScattering ks;
  ks.s0 = Eigen::Vector2d{-1.0, -sq} / (e * rmu);
  ks.s0p = Eigen::Vector2d{-1.0, sq} / (e * rmu);
  ks.A = (orb.omega / (e * rmu)) * Eigen::Vector2d{1.0, sq};
  ks.Ap = (orb.omega / (e * rmu)) * Eigen::Vector2d{-1.0, sq};
  ks.C = (orb.a / e) * Eigen::Vector2d{e * e - 1.0, -sq};
  ks.Cp = (orb.a / e) * Eigen::Vector2d{e * e - 1.0, sq};
  ks.s1 = (2.0 / (e * e * rmu)) * Eigen::Vector2d{e * e - 1.0, -sq};
  ks.s1p = (2.0 / (e * e * rmu)) * Eigen::Vector2d{e * e - 1.0, sq};
  ks.rho1 = 2.0 / (orb.a * e * rmu);
  return ks;
}

}  // namespace nbs
