#pragma once

#include <utility>

#include "nbscatter/types.hpp"

namespace nbs {

// Hyperbolic two-body orbit in closed form; the ground-truth oracle.
struct KeplerOrbit {
  double m1 = 1.0;
  double m2 = 1.0;
  double e = 2.0;   // eccentricity > 1
  double h = 1.0;   // energy > 0
  double a = 0.0;   // semimajor axis, a = m1 m2 / (2h)
  double mu = 0.0;  // reduced mass
  double omega = 0.0;  // sqrt(2h)

  static KeplerOrbit from_energy(double m1, double m2, double h, double e);
};

// Relative coordinates at parameter tau:
//   q_rel = (a e - a cosh(w tau), a sqrt(e^2-1) sinh(w tau)),
//   r = a sqrt(mu) (e cosh(w tau) - 1) = |q|_M.
Eigen::Vector2d kepler_relative_position(const KeplerOrbit& orb, double tau);
Eigen::Vector2d kepler_relative_velocity(const KeplerOrbit& orb, double tau);
double kepler_radius(const KeplerOrbit& orb, double tau);
double kepler_time(const KeplerOrbit& orb, double tau);

// Planar two-body system (d = 2) carrying the orbit.
MassSystem kepler_system(const KeplerOrbit& orb);

// Embed a relative vector as a zero-center-of-mass two-body configuration.
Vec kepler_embed(const KeplerOrbit& orb, const Eigen::Vector2d& rel);

// Full configuration-space state (q, xi) at tau.
std::pair<Vec, Vec> kepler_state(const KeplerOrbit& orb, double tau);

// Closed-form scattering data of the orbit, in relative coordinates
// (2-vectors); primed quantities are the future asymptotes.
struct KeplerScattering {
  Eigen::Vector2d s0, s0p;
  Eigen::Vector2d A, Ap;
  Eigen::Vector2d C, Cp;
  Eigen::Vector2d s1, s1p;
  double rho1 = 0.0;
};

KeplerScattering kepler_scattering(const KeplerOrbit& orb);

}  // namespace nbs
