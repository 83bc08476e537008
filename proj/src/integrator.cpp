#include "nbscatter/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbscatter/nbody.hpp"

namespace nbs {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::SpanEnd: return "span_end";
    case Termination::Converged: return "converged";
    case Termination::Collision: return "collision";
    case Termination::StepUnderflow: return "step_underflow";
  }
  return "unknown";
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Embedded 4th-order weights.
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

using Rhs = std::function<Vec(double, const Vec&)>;

struct StepOut {
  Vec y;       // 5th order solution
  double err;  // scaled error estimate
  Vec k_last;  // f at the new point (FSAL)
};

StepOut dp_step(const Rhs& f, double tau, const Vec& y, const Vec& k1, double h,
                double rtol, double atol) {
  Vec k2 = f(tau + c2 * h, y + h * (a21 * k1));
  Vec k3 = f(tau + c3 * h, y + h * (a31 * k1 + a32 * k2));
  Vec k4 = f(tau + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  Vec k5 = f(tau + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  Vec k6 = f(tau + h,
             y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Vec y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  Vec k7 = f(tau + h, y5);
  Vec y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  double err2 = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
    double d = (y5[i] - y4[i]) / sc;
    err2 += d * d;
  }
  return {std::move(y5), std::sqrt(err2 / y.size()), std::move(k7)};
}

// Generic adaptive driver. renorm is applied to accepted states; on_sample
// returning false stops the integration early.
template <class Renorm, class OnSample>
Termination drive(const Rhs& f, double tau0, double tau1, Vec y,
                  const IntegrateOptions& opts, Renorm renorm,
                  OnSample on_sample) {
  const double dir = tau1 >= tau0 ? 1.0 : -1.0;
  const double span = std::abs(tau1 - tau0);
  if (span == 0.0) return Termination::SpanEnd;
  double h = opts.fixed_step ? *opts.fixed_step
                             : std::min(opts.initial_step, opts.max_step);
  h = std::min(h, span);
  double tau = tau0;
  renorm(y);
  if (!on_sample(tau, y)) return Termination::Converged;
  Vec k1 = f(tau, y);
  const double hmin = span * 1e-14;
  while (dir * (tau1 - tau) > 0) {
    h = std::min(h, std::abs(tau1 - tau));
    StepOut out = dp_step(f, tau, y, k1, dir * h, opts.tol.rel, opts.tol.abs);
    if (opts.fixed_step || out.err <= 1.0) {
      tau += dir * h;
      y = std::move(out.y);
      renorm(y);
      k1 = f(tau, y);  // recompute after renormalization (FSAL forfeited)
      if (!on_sample(tau, y)) return Termination::Converged;
    }
    if (!opts.fixed_step) {
      double fac = std::isfinite(out.err)
                       ? 0.9 * std::pow(std::max(out.err, 1e-10), -0.2)
                       : 0.2;
      h = std::min(h * std::clamp(fac, 0.2, 5.0), opts.max_step);
      if (h < hmin) return Termination::StepUnderflow;
    }
  }
  return Termination::SpanEnd;
}

void renorm_blowup(Vec& y, int nd, const MassSystem& sys) {
  Vec s = y.segment(1, nd);
  Vec w = y.segment(2 + nd, nd);
  double ns = sys.norm(s);
  s /= ns;
  w -= sys.inner(s, w) * s;
  y.segment(1, nd) = s;
  y.segment(2 + nd, nd) = w;
}

}  // namespace

Trajectory integrate(const BlowupState& x0, double tau0, double tau1,
                     const MassSystem& sys, const IntegrateOptions& opts) {
  const int nd = sys.nd();
  sys.check_size(x0.s, "integrate");
  sys.check_size(x0.w, "integrate");
  if (x0.rho < 0.0) throw InvalidState("integrate: rho must be nonnegative");

  Trajectory traj;
  traj.tol = opts.tol;
  traj.h = blowup_energy(x0, sys);
  traj.track_time = x0.rho > 0.0;
  traj.min_pair_distance = std::numeric_limits<double>::infinity();

  // State vector: (rho, s, v, w[, t]). Newtonian time rides along via
  // dt/dtau = 1/rho whenever the orbit starts off the infinity manifold.
  const bool with_t = traj.track_time;
  const int N = 2 + 2 * nd + (with_t ? 1 : 0);
  Vec y0(N);
  y0.head(2 + 2 * nd) = x0.pack();
  if (with_t) y0[N - 1] = 0.0;

  bool collided = false;
  Rhs f = [&](double, const Vec& y) -> Vec {
    BlowupState x = BlowupState::unpack(y, nd);
    BlowupState dx = vector_field(x, sys);
    Vec dy(N);
    dy.head(2 + 2 * nd) = dx.pack();
    if (with_t) dy[N - 1] = 1.0 / x.rho;
    return dy;
  };

  const double om = std::sqrt(std::max(2.0 * traj.h, 0.0));
  const double window = om > 0 ? 2.0 / om : 2.0;
  double hold_start = std::numeric_limits<double>::quiet_NaN();
  const double dir = tau1 >= tau0 ? 1.0 : -1.0;

  auto on_sample = [&](double tau, const Vec& y) -> bool {
    BlowupState x = BlowupState::unpack(y, nd);
    TrajectorySample smp;
    smp.tau = tau;
    smp.state = x;
    smp.t = with_t ? y[N - 1] : 0.0;
    traj.samples.push_back(std::move(smp));

    double dist = min_pair_distance(x.s, sys);
    traj.min_pair_distance = std::min(traj.min_pair_distance, dist);
    traj.max_rho = std::max(traj.max_rho, x.rho);
    if (dist > opts.tol.collision) {
      traj.max_shape_potential =
          std::max(traj.max_shape_potential, potential(x.s, sys));
      traj.energy_drift = std::max(traj.energy_drift,
                                   std::abs(blowup_energy(x, sys) - traj.h));
    }
    if (dist <= opts.tol.collision) {
      collided = true;
      return false;
    }
    if (opts.detect_convergence && om > 0) {
      bool near = x.rho < opts.tol.rho_eq &&
                  sys.norm(x.w) < opts.tol.w_eq &&
                  std::abs(x.v - opts.convergence_sign * om) < opts.tol.v_eq;
      if (near) {
        if (std::isnan(hold_start)) hold_start = tau;
        if (dir * (tau - hold_start) >= window) {
          traj.converged_tau = tau;
          return false;
        }
      } else {
        hold_start = std::numeric_limits<double>::quiet_NaN();
      }
    }
    return true;
  };

  Termination term = Termination::SpanEnd;
  try {
    term = drive(f, tau0, tau1, y0, opts,
                 [&](Vec& y) { renorm_blowup(y, nd, sys); }, on_sample);
  } catch (const CollisionError&) {
    collided = true;  // a trial stage crossed the collision threshold
  }
  if (collided)
    traj.termination = Termination::Collision;
  else if (term == Termination::Converged)
    traj.termination = Termination::Converged;
  else
    traj.termination = term;
  return traj;
}

std::vector<VariationalSample> integrate_variational(
    const VariationalState& x0, double tau0, double tau1,
    const MassSystem& sys, const IntegrateOptions& opts) {
  const int nd = sys.nd();
  const int NB = 2 + 2 * nd;
  const int N = 2 * NB;
  Vec y0(N);
  y0.head(NB) = x0.base.pack();
  y0[NB] = x0.drho;
  y0.segment(NB + 1, nd) = x0.ds;
  y0[NB + 1 + nd] = x0.dv;
  y0.segment(NB + 2 + nd, nd) = x0.dw;

  Rhs f = [&](double, const Vec& y) -> Vec {
    BlowupState x = BlowupState::unpack(y.head(NB), nd);
    double drho = y[NB];
    Vec ds = y.segment(NB + 1, nd);
    double dv = y[NB + 1 + nd];
    Vec dw = y.segment(NB + 2 + nd, nd);

    BlowupState dx = vector_field(x, sys);
    double w2 = sys.inner(x.w, x.w);
    double wdw = sys.inner(x.w, dw);

    Vec out(N);
    out.head(NB) = dx.pack();
    if (x.rho != 0.0 || drho != 0.0) {
      double u = potential(x.s, sys);
      Vec g = grad_potential(x.s, sys);
      double du = sys.inner(g, ds);  // directional derivative of U
      Mat H = hessian_blocks(x.s, sys);
      Vec dtg = H * ds + du * x.s + u * ds;  // derivative of grad~U
      out[NB] = -dv * x.rho - x.v * drho;
      out.segment(NB + 1, nd) = dw;
      out[NB + 1 + nd] = 2.0 * wdw - drho * u - x.rho * du;
      out.segment(NB + 2 + nd, nd) = drho * (g + u * x.s) + x.rho * dtg -
                                     dv * x.w - x.v * dw - 2.0 * wdw * x.s -
                                     w2 * ds;
    } else {
      // Pure infinity-manifold variation: potential terms absent.
      out[NB] = -dv * x.rho - x.v * drho;
      out.segment(NB + 1, nd) = dw;
      out[NB + 1 + nd] = 2.0 * wdw;
      out.segment(NB + 2 + nd, nd) =
          -dv * x.w - x.v * dw - 2.0 * wdw * x.s - w2 * ds;
    }
    return out;
  };

  std::vector<VariationalSample> samples;
  auto on_sample = [&](double tau, const Vec& y) -> bool {
    VariationalSample smp;
    smp.tau = tau;
    smp.state.base = BlowupState::unpack(y.head(NB), nd);
    smp.state.drho = y[NB];
    smp.state.ds = y.segment(NB + 1, nd);
    smp.state.dv = y[NB + 1 + nd];
    smp.state.dw = y.segment(NB + 2 + nd, nd);
    samples.push_back(std::move(smp));
    return true;
  };

  try {
    drive(f, tau0, tau1, y0, opts,
          [&](Vec& y) {
            Vec base = y.head(NB);
            renorm_blowup(base, nd, sys);
            y.head(NB) = base;
          },
          on_sample);
  } catch (const CollisionError&) {
    // Near-collision passage: return the samples accumulated so far.
  }
  return samples;
}

std::optional<EquilibriumPoint> detect_equilibrium(const Trajectory& traj,
                                                   const MassSystem& sys,
                                                   const ToleranceSet& tol) {
  if (traj.samples.empty()) return std::nullopt;
  const BlowupState& x = traj.samples.back().state;
  double om = std::sqrt(std::max(2.0 * traj.h, 0.0));
  if (om == 0.0) return std::nullopt;
  double sign = x.v >= 0 ? 1.0 : -1.0;
  if (x.rho >= tol.rho_eq) return std::nullopt;
  if (sys.norm(x.w) >= tol.w_eq) return std::nullopt;
  if (std::abs(x.v - sign * om) >= tol.v_eq) return std::nullopt;
  EquilibriumPoint p;
  p.s0 = x.s / sys.norm(x.s);
  p.v0 = sign * om;
  return p;
}

std::vector<double> newtonian_time(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.samples.size());
  for (const auto& smp : traj.samples) {
    if (!(smp.state.rho > 0.0))
      throw InvalidState("newtonian_time: segment touches the infinity manifold");
    out.push_back(smp.t);
  }
  if (!traj.track_time)
    throw InvalidState("newtonian_time: time was not tracked for this orbit");
  return out;
}

}  // namespace nbs
