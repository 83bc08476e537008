#pragma once

#include <utility>
#include <vector>

#include "nbscatter/integrator.hpp"

namespace nbs {

enum class Direction { Past, Future };

// Coefficients of the asymptotic expansion q(t) = A t + B log|t| + C + o(1).
struct ChazyParameters {
  Vec A;
  Vec B;
  Vec C;
  Direction direction = Direction::Future;
};

// A = v0 s0, B = -+ grad U(A), C = s1/rho1 - (log(rho1 |v0|)/v0^2) grad~U(s0),
// with C normalized to be mass-orthogonal to A. Requires rho1 > 0.
ChazyParameters chazy_from_manifold(const ManifoldParams& mp,
                                    const MassSystem& sys);

// Tail-regression estimate of (s0, s1, rho1) for a trajectory converging to
// eq. Also reports the fitted quadratic coefficient of rho (for checks
// against (rho1/v0)^2 U(s0)).
struct ExtractionDetail {
  ManifoldParams mp;
  double rho2 = 0.0;
  int window_samples = 0;
  double window_umax = 0.0;  // largest deviation scale used in the fit
};

ExtractionDetail extract_manifold_detail(const Trajectory& traj,
                                         const EquilibriumPoint& eq,
                                         const MassSystem& sys);

ManifoldParams extract_manifold_params(const Trajectory& traj,
                                       const EquilibriumPoint& eq,
                                       const MassSystem& sys);

// Truncated asymptotic predictors with u = exp(-v0 tau):
// order 1 keeps (rho1, s1) terms, order 2 adds the rho2 u^2 and the
// secular tau u cross term.
struct SeriesPrediction {
  double rho = 0.0;
  Vec s;
  double v = 0.0;
  double r = 0.0;
  Vec q;  // s / rho
};

SeriesPrediction series_predict(const ManifoldParams& mp, double tau,
                                int order, const MassSystem& sys);

// Leading terms of the tau <-> t change of variables:
//   t(tau) = e^{v0 tau}/(rho1 v0) - (U(s0)/v0^2) tau + c  (c = 0 here)
//   tau(t) = log(t)/v0 + log(rho1 |v0|)/v0 + (U(s0) rho1/v0^2) log(t)/t ...
double t_from_tau(const ManifoldParams& mp, double tau, const MassSystem& sys);
double tau_from_t(const ManifoldParams& mp, double t, const MassSystem& sys);

// Least-squares fit of q(t) = A t + B log|t| + C over a late-time window.
// Samples must have t of one sign and be inside the asymptotic regime.
ChazyParameters fit_chazy_cartesian(
    const std::vector<std::pair<double, Vec>>& samples, const MassSystem& sys);

// (s0, v0, s1, rho1) -> (s0, -v0, s1, rho1): the parameters of the
// time-reversed orbit. Involution; sends Chazy (A, C) to (-A, C).
ManifoldParams time_reverse_params(const ManifoldParams& mp);

}  // namespace nbs
