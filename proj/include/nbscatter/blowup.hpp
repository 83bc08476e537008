#pragma once

#include <utility>

#include "nbscatter/types.hpp"

namespace nbs {

// State in the blown-up coordinates (rho, s, v, w): rho = 1/|q|_M, s = q/|q|,
// v the radial and w the tangential velocity component. rho = 0 is the
// manifold at infinity.
struct BlowupState {
  double rho = 0.0;
  Vec s;
  double v = 0.0;
  Vec w;

  int size() const { return 2 + 2 * static_cast<int>(s.size()); }
  Vec pack() const;
  static BlowupState unpack(const Vec& y, int nd);
};

// Rest point (0, s0, v0, 0) at infinity; v0 = +-sqrt(2h).
struct EquilibriumPoint {
  Vec s0;
  double v0 = 0.0;
};

// Equilibrium plus linearizing coordinates (s1, rho1) on its
// stable/unstable manifold.
struct ManifoldParams {
  EquilibriumPoint eq;
  Vec s1;
  double rho1 = 0.0;
};

BlowupState to_blowup(const Vec& q, const Vec& xi, const MassSystem& sys);
std::pair<Vec, Vec> from_blowup(const BlowupState& x, const MassSystem& sys);

// Energy 0.5 v^2 + 0.5 |w|^2 - rho U(s) of a blown-up state.
double blowup_energy(const BlowupState& x, const MassSystem& sys);

// tau-derivative of (rho, s, v, w).
BlowupState vector_field(const BlowupState& x, const MassSystem& sys);

// Closed-form heteroclinic flow on the infinity manifold through the great
// circle spanned by the mass-orthonormal frame (xi, eta):
//   v = sqrt(2h) tanh(sqrt(2h) tau), theta = atan(sinh(sqrt(2h) tau)),
//   s = xi sin(theta) + eta cos(theta),
//   w = sqrt(2h) sech(sqrt(2h) tau) (xi cos(theta) - eta sin(theta)).
BlowupState infinity_flow(const Vec& xi, const Vec& eta, double h, double tau,
                          const MassSystem& sys);

// Linearization of the field at an equilibrium, acting on the thickened
// space R x E x R x E with coordinate order (rho1, s1, v1, w1).
Mat linearization_matrix(const EquilibriumPoint& p, const MassSystem& sys);

// Closed form of exp(tau L(p)).
Mat linearized_flow_exact(const EquilibriumPoint& p, double tau,
                          const MassSystem& sys);

// The generalized eigenvector G = (1, 0, U(s0)/v0, -grad~U(s0)/v0) at -v0.
Vec generalized_eigenvector(const EquilibriumPoint& p, const MassSystem& sys);

// First-order chart of the (un)stable manifold: applies
//   (rho, s, v, w) = (rho1, s0 + s1, v0 + U(s0) rho1 / v0,
//                     -grad~U(s0) rho1 / v0 - v0 s1)
// then renormalizes s to the unit sphere and re-orthogonalizes w.
BlowupState seed_state(const ManifoldParams& mp, const MassSystem& sys);

// Flow in the linearizing coordinates: with u = exp(-v0 tau),
// s1 -> u s1 - tau u (grad~U(s0)/v0) rho1 and rho1 -> u rho1.
ManifoldParams linear_model_flow(const ManifoldParams& mp, double tau,
                                 const MassSystem& sys);

// Embedding of (s1, rho1) into the thickened space along the generalized
// eigenspace at (s0, v0): the column used to restrict linearized_flow_exact.
Vec embed_manifold_tangent(const ManifoldParams& mp, const MassSystem& sys);

}  // namespace nbs
