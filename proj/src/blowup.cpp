#include "nbscatter/blowup.hpp"

#include <cmath>

#include "nbscatter/nbody.hpp"

namespace nbs {

Vec BlowupState::pack() const {
  Vec y(size());
  y[0] = rho;
  y.segment(1, s.size()) = s;
  y[1 + s.size()] = v;
  y.segment(2 + s.size(), w.size()) = w;
  return y;
}

BlowupState BlowupState::unpack(const Vec& y, int nd) {
  BlowupState x;
  x.rho = y[0];
  x.s = y.segment(1, nd);
  x.v = y[1 + nd];
  x.w = y.segment(2 + nd, nd);
  return x;
}

BlowupState to_blowup(const Vec& q, const Vec& xi, const MassSystem& sys) {
  sys.check_size(q, "to_blowup");
  sys.check_size(xi, "to_blowup");
  double r = sys.norm(q);
  if (!(r > 0.0)) throw InvalidState("to_blowup: total collision (q = 0)");
  BlowupState x;
  x.rho = 1.0 / r;
  x.s = q / r;
  x.v = sys.inner(x.s, xi);
  x.w = xi - x.v * x.s;
  return x;
}

std::pair<Vec, Vec> from_blowup(const BlowupState& x, const MassSystem& sys) {
  if (!(x.rho > 0.0))
    throw InvalidState("from_blowup: state at infinity has no Cartesian image");
  return {x.s / x.rho, x.v * x.s + x.w};
}

double blowup_energy(const BlowupState& x, const MassSystem& sys) {
  return 0.5 * x.v * x.v + 0.5 * sys.inner(x.w, x.w) -
         x.rho * potential(x.s, sys);
}

BlowupState vector_field(const BlowupState& x, const MassSystem& sys) {
  BlowupState dx;
  double w2 = sys.inner(x.w, x.w);
  dx.rho = -x.v * x.rho;
  dx.s = x.w;
  if (x.rho != 0.0) {
    double u = potential(x.s, sys);
    dx.v = w2 - x.rho * u;
    dx.w = x.rho * (grad_potential(x.s, sys) + u * x.s) - x.v * x.w - w2 * x.s;
  } else {
    // On the infinity manifold the potential terms drop out entirely.
    dx.v = w2;
    dx.w = -x.v * x.w - w2 * x.s;
  }
  return dx;
}

BlowupState infinity_flow(const Vec& xi, const Vec& eta, double h, double tau,
                          const MassSystem& sys) {
  sys.check_size(xi, "infinity_flow");
  sys.check_size(eta, "infinity_flow");
  if (!(h > 0.0)) throw InvalidState("infinity_flow: energy must be positive");
  double tol = 1e-8;
  if (std::abs(sys.norm(xi) - 1.0) > tol || std::abs(sys.norm(eta) - 1.0) > tol ||
      std::abs(sys.inner(xi, eta)) > tol)
    throw InvalidState("infinity_flow: (xi, eta) must be mass-orthonormal");
  double om = std::sqrt(2.0 * h);
  double theta = std::atan(std::sinh(om * tau));
  BlowupState x;
  x.rho = 0.0;
  x.v = om * std::tanh(om * tau);
  x.s = std::sin(theta) * xi + std::cos(theta) * eta;
  x.w = (om / std::cosh(om * tau)) * (std::cos(theta) * xi - std::sin(theta) * eta);
  return x;
}

Mat linearization_matrix(const EquilibriumPoint& p, const MassSystem& sys) {
  const int nd = sys.nd();
  const int N = 2 + 2 * nd;
  double u0 = potential(p.s0, sys);
  Vec tg = tangential_grad(p.s0, sys);
  Mat L = Mat::Zero(N, N);
  L(0, 0) = -p.v0;                                    // rho1' = -v0 rho1
  L.block(1, 2 + nd, nd, nd).setIdentity();           // s1' = w1
  L(1 + nd, 0) = -u0;                                 // v1' = -U(s0) rho1
  L.block(2 + nd, 0, nd, 1) = tg;                     // w1' = grad~U rho1 ...
  L.block(2 + nd, 2 + nd, nd, nd) =
      -p.v0 * Mat::Identity(nd, nd);                  // ... - v0 w1
  return L;
}

Mat linearized_flow_exact(const EquilibriumPoint& p, double tau,
                          const MassSystem& sys) {
  const int nd = sys.nd();
  const int N = 2 + 2 * nd;
  double v0 = p.v0;
  double u = std::exp(-v0 * tau);
  double u0 = potential(p.s0, sys);
  Vec tg = tangential_grad(p.s0, sys);
  Mat E = Mat::Zero(N, N);
  E(0, 0) = u;
  E.block(1, 0, nd, 1) = ((1.0 - u) / (v0 * v0) - tau * u / v0) * tg;
  E.block(1, 1, nd, nd).setIdentity();
  E.block(1, 2 + nd, nd, nd) = ((1.0 - u) / v0) * Mat::Identity(nd, nd);
  E(1 + nd, 0) = u0 * (u - 1.0) / v0;
  E(1 + nd, 1 + nd) = 1.0;
  E.block(2 + nd, 0, nd, 1) = tau * u * tg;
  E.block(2 + nd, 2 + nd, nd, nd) = u * Mat::Identity(nd, nd);
  return E;
}

Vec generalized_eigenvector(const EquilibriumPoint& p, const MassSystem& sys) {
  const int nd = sys.nd();
  Vec g = Vec::Zero(2 + 2 * nd);
  g[0] = 1.0;
  g[1 + nd] = potential(p.s0, sys) / p.v0;
  g.segment(2 + nd, nd) = -tangential_grad(p.s0, sys) / p.v0;
  return g;
}

BlowupState seed_state(const ManifoldParams& mp, const MassSystem& sys) {
  const Vec& s0 = mp.eq.s0;
  double v0 = mp.eq.v0;
  if (std::abs(sys.inner(s0, mp.s1)) > 1e-8 * std::max(1.0, sys.norm(mp.s1)))
    throw InvalidState("seed_state: s1 must be mass-orthogonal to s0");
  double u0 = potential(s0, sys);
  Vec tg = tangential_grad(s0, sys);
  BlowupState x;
  x.rho = mp.rho1;
  x.s = s0 + mp.s1;
  x.v = v0 + u0 * mp.rho1 / v0;
  x.w = -(mp.rho1 / v0) * tg - v0 * mp.s1;
  // Project back onto the constraint set (an admissible second-order
  // correction to the first-order chart).
  double ns = sys.norm(x.s);
  x.s /= ns;
  x.w -= sys.inner(x.s, x.w) * x.s;
  return x;
}

ManifoldParams linear_model_flow(const ManifoldParams& mp, double tau,
                                 const MassSystem& sys) {
  double u = std::exp(-mp.eq.v0 * tau);
  Vec alpha = tangential_grad(mp.eq.s0, sys) / mp.eq.v0;
  ManifoldParams out = mp;
  out.s1 = u * mp.s1 - tau * u * mp.rho1 * alpha;
  out.rho1 = u * mp.rho1;
  return out;
}

Vec embed_manifold_tangent(const ManifoldParams& mp, const MassSystem& sys) {
  const int nd = sys.nd();
  Vec y = Vec::Zero(2 + 2 * nd);
  y[0] = mp.rho1;
  y.segment(1, nd) = mp.s1;
  y[1 + nd] = potential(mp.eq.s0, sys) * mp.rho1 / mp.eq.v0;
  y.segment(2 + nd, nd) =
      -(mp.rho1 / mp.eq.v0) * tangential_grad(mp.eq.s0, sys) -
      mp.eq.v0 * mp.s1;
  return y;
}

}  // namespace nbs
