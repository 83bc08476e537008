#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nbscatter/blowup.hpp"

namespace nbs {

enum class Termination {
  SpanEnd,       // reached the end of the requested tau interval
  Converged,     // equilibrium convergence event fired
  Collision,     // pairwise distance in s fell below the collision tolerance
  StepUnderflow  // step size collapsed (near-singular passage)
};

const char* termination_name(Termination t);

struct TrajectorySample {
  double tau = 0.0;
  BlowupState state;
  double t = 0.0;  // Newtonian time; meaningful only while rho > 0
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::SpanEnd;
  ToleranceSet tol;
  double h = 0.0;             // conserved energy of the initial state
  double energy_drift = 0.0;  // max |H(tau) - H(0)| over accepted samples
  double max_rho = 0.0;
  double max_shape_potential = 0.0;  // max U(s) along the orbit
  double min_pair_distance = 0.0;    // min pairwise distance in s
  bool track_time = false;           // whether the t column is meaningful
  double converged_tau = 0.0;        // tau at which convergence fired
};

struct IntegrateOptions {
  ToleranceSet tol;
  double max_step = 0.1;
  double initial_step = 1e-3;
  // When set, stop once (rho, |w|, |v - sign*sqrt(2h)|) stay below the
  // equilibrium thresholds over a trailing window of width 2/sqrt(2h).
  bool detect_convergence = false;
  int convergence_sign = +1;  // expected sign of v at the limit
  // Fixed-step mode for order-of-accuracy studies; disables adaptivity.
  std::optional<double> fixed_step;
};

Trajectory integrate(const BlowupState& x0, double tau0, double tau1,
                     const MassSystem& sys, const IntegrateOptions& opts);

// First-order perturbation evolved with the analytic Jacobian of the field
// along the base trajectory.
struct VariationalState {
  BlowupState base;
  double drho = 0.0;
  Vec ds;
  double dv = 0.0;
  Vec dw;
};

struct VariationalSample {
  double tau = 0.0;
  VariationalState state;
};

std::vector<VariationalSample> integrate_variational(
    const VariationalState& x0, double tau0, double tau1,
    const MassSystem& sys, const IntegrateOptions& opts);

// Terminal equilibrium of a converged trajectory: s0 is the renormalized
// terminal s, v0 = sign(v) sqrt(2h) from the conserved energy. Absent when
// the terminal window does not satisfy the thresholds.
std::optional<EquilibriumPoint> detect_equilibrium(const Trajectory& traj,
                                                   const MassSystem& sys,
                                                   const ToleranceSet& tol);

// The accumulated Newtonian time column; throws if any sample has rho = 0.
std::vector<double> newtonian_time(const Trajectory& traj);

}  // namespace nbs
