#include "nbscatter/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "nbscatter/blowup.hpp"
#include "nbscatter/chazy.hpp"
#include "nbscatter/integrator.hpp"
#include "nbscatter/kepler.hpp"
#include "nbscatter/nbody.hpp"
#include "nbscatter/scattering.hpp"

namespace nbs {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

Vec equilateral_s0(const MassSystem& sys) {
  // three unit masses on a circle of radius 1/sqrt(3): unit mass norm
  Vec s0(6);
  double r = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) {
    double ang = std::numbers::pi / 2 + 2.0 * std::numbers::pi * i / 3.0;
    s0[2 * i] = r * std::cos(ang);
    s0[2 * i + 1] = r * std::sin(ang);
  }
  s0 = sys.project_zero_momentum(s0);
  return s0 / sys.norm(s0);
}

Vec random_shape(std::mt19937& rng, const MassSystem& sys, double min_dist) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Vec s(sys.nd());
    for (int k = 0; k < s.size(); ++k) s[k] = gauss(rng);
    s = sys.project_zero_momentum(s);
    s /= sys.norm(s);
    if (min_pair_distance(s, sys) < min_dist) continue;
    // reject near-collinear shapes (in the first two coordinates)
    Mat diffs(2, sys.n() - 1);
    for (int i = 1; i < sys.n(); ++i)
      diffs.col(i - 1) = (sys.body(s, i) - sys.body(s, 0)).head(2);
    Eigen::JacobiSVD<Mat> svd(diffs);
    if (svd.singularValues()(1) < 0.2 * svd.singularValues()(0)) continue;
    return s;
  }
}

struct Check {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what, double value, double bound) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << "=" << fmt(value) << (ok ? "<" : "!<") << fmt(bound);
    if (!ok) pass = false;
  }
  void note(const std::string& what, double value) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << "=" << fmt(value);
  }
};

CriterionResult finish(int id, const std::string& name, Check& c) {
  return {id, name, c.pass, c.detail.str()};
}

// --- 1: Kepler pipeline closure ------------------------------------------

CriterionResult criterion_kepler_closure(double ts) {
  auto start = std::chrono::steady_clock::now();
  Check c;
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
  MassSystem sys = kepler_system(orb);
  auto [q, xi] = kepler_state(orb, 0.0);
  BlowupState x0 = to_blowup(q, xi, sys);

  IntegrateOptions opts;
  opts.max_step = 0.05;
  opts.detect_convergence = true;
  opts.convergence_sign = +1;
  Trajectory traj = integrate(x0, 0.0, 20.0, sys, opts);
  auto eq = detect_equilibrium(traj, sys, opts.tol);
  if (!eq) {
    c.require(false, "converged", 0.0, 1.0);
    return finish(1, "kepler_pipeline_closure", c);
  }
  ManifoldParams mp = extract_manifold_params(traj, *eq, sys);
  ChazyParameters cp = chazy_from_manifold(mp, sys);

  KeplerScattering ks = kepler_scattering(orb);
  Vec Ap = kepler_embed(orb, ks.Ap);
  Vec Cp = kepler_embed(orb, ks.Cp);
  double tol = 1e-6 * ts;
  c.require(sys.norm(cp.A - Ap) / sys.norm(Ap) < tol, "A_err",
            sys.norm(cp.A - Ap) / sys.norm(Ap), tol);
  c.require(sys.norm(cp.C - Cp) / sys.norm(Cp) < tol, "C_err",
            sys.norm(cp.C - Cp) / sys.norm(Cp), tol);
  c.require(std::abs(mp.rho1 - ks.rho1) / ks.rho1 < tol, "rho1_err",
            std::abs(mp.rho1 - ks.rho1) / ks.rho1, tol);
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  c.require(secs < 5.0, "runtime_s", secs, 5.0);
  return finish(1, "kepler_pipeline_closure", c);
}

// --- 2: closed-form flow on the infinity manifold ------------------------

CriterionResult criterion_infinity_flow(double ts) {
  Check c;
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  double h = 2.0;
  Vec s0 = equilateral_s0(sys);
  Vec xi = -s0;
  Vec eta = eta_nonplanar(xi, sys);

  BlowupState x0 = infinity_flow(xi, eta, h, -5.0, sys);
  IntegrateOptions opts;
  opts.max_step = 0.02;
  opts.tol.rel = 1e-13;
  opts.tol.abs = 1e-14;
  Trajectory traj = integrate(x0, -5.0, 5.0, sys, opts);

  double max_err = 0.0, max_energy = 0.0;
  for (const auto& smp : traj.samples) {
    BlowupState ref = infinity_flow(xi, eta, h, smp.tau, sys);
    double err = std::abs(smp.state.rho - ref.rho) +
                 sys.norm(smp.state.s - ref.s) +
                 std::abs(smp.state.v - ref.v) + sys.norm(smp.state.w - ref.w);
    max_err = std::max(max_err, err);
    double en = smp.state.v * smp.state.v +
                sys.inner(smp.state.w, smp.state.w);
    max_energy = std::max(max_energy, std::abs(en - 2.0 * h));
  }
  c.require(max_err < 1e-9 * ts, "orbit_err", max_err, 1e-9 * ts);
  c.require(max_energy < 1e-11 * ts, "energy_err", max_energy, 1e-11 * ts);
  return finish(2, "infinity_manifold_closed_form", c);
}

// --- 3: linearized flow vs generic matrix exponential ---------------------

CriterionResult criterion_linearization(double ts) {
  Check c;
  std::mt19937 rng(20260824);
  std::uniform_real_distribution<double> utau(-2.0, 2.0);
  double max_exp_err = 0.0, max_gen_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int d = trial % 2 == 0 ? 2 : 3;
    MassSystem sys({1.0, 1.0, 1.0}, d);
    Vec s0 = random_shape(rng, sys, 0.25);
    EquilibriumPoint p{s0, trial % 4 < 2 ? 2.0 : -2.0};
    double tau = utau(rng);

    Mat L = linearization_matrix(p, sys);
    Mat closed = linearized_flow_exact(p, tau, sys);
    Mat generic = (tau * L).exp();
    max_exp_err = std::max(max_exp_err,
                           (closed - generic).cwiseAbs().maxCoeff());

    Vec G = generalized_eigenvector(p, sys);
    Mat shifted = L + p.v0 * Mat::Identity(L.rows(), L.cols());
    max_gen_err = std::max(max_gen_err,
                           (shifted * (shifted * G)).cwiseAbs().maxCoeff());
  }
  c.require(max_exp_err < 1e-9 * ts, "expm_err", max_exp_err, 1e-9 * ts);
  c.require(max_gen_err < 1e-10 * ts, "gen_eigvec_err", max_gen_err,
            1e-10 * ts);
  return finish(3, "linearized_flow_exact_vs_expm", c);
}

// --- 4: Chazy coefficient law on 3-body runs ------------------------------

CriterionResult criterion_chazy_law(double ts) {
  Check c;
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(7);
  double h = 2.0;

  for (int run = 0; run < 2; ++run) {
    Vec s0 = run == 0 ? equilateral_s0(sys) : random_shape(rng, sys, 0.35);
    EquilibriumPoint p{s0, -std::sqrt(2.0 * h)};
    Vec eta = eta_nonplanar(s0, sys);
    ManifoldParams mp{p, 1e-3 * eta, 1e-3};
    BlowupState x0 = seed_state(mp, sys);

    IntegrateOptions opts;
    opts.max_step = 0.05;
    opts.detect_convergence = true;
    opts.tol.rho_eq = 1e-11;  // deep tail so the log-term fit is unbiased

    for (int dirn = 0; dirn < 2; ++dirn) {
      opts.convergence_sign = dirn == 0 ? +1 : -1;
      Trajectory traj =
          integrate(x0, 0.0, dirn == 0 ? 25.0 : -25.0, sys, opts);
      if (traj.termination != Termination::Converged) {
        c.require(false, "converged", 0.0, 1.0);
        continue;
      }
      double t_end = traj.samples.back().t;
      std::vector<std::pair<double, Vec>> fit_samples;
      for (const auto& smp : traj.samples)
        if (smp.state.rho > 0.0 && std::abs(smp.t) >= std::abs(t_end) / 1e3 &&
            smp.t * t_end > 0)
          fit_samples.push_back({smp.t, smp.state.s / smp.state.rho});
      ChazyParameters fit = fit_chazy_cartesian(fit_samples, sys);

      Vec gA = grad_potential(fit.A, sys);
      Vec expectB = fit.direction == Direction::Future ? Vec(-gA) : gA;
      double b_err = sys.norm(fit.B - expectB) / sys.norm(fit.B);
      c.require(b_err < 1e-4 * ts, "B_err", b_err, 1e-4 * ts);
      // compare |A|^2 against the orbit's actual conserved energy; the
      // nominal h differs from it at second order in the seed amplitude
      double a_err =
          std::abs(sys.inner(fit.A, fit.A) - 2.0 * traj.h) / (2.0 * traj.h);
      c.require(a_err < 1e-8 * ts, "A_norm_err", a_err, 1e-8 * ts);
    }
  }
  return finish(4, "chazy_coefficient_law", c);
}

// --- 5: truncation orders of the asymptotic series ------------------------

CriterionResult criterion_series_orders(double ts) {
  Check c;
  // e = 4: the u^3 coefficient of rho, rho1((2/e)^2 - 1), must not vanish
  // (it does at e = 2), or the order-2 residual would decay one order fast
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 4.0);
  MassSystem sys = kepler_system(orb);
  auto [q, xi] = kepler_state(orb, 0.0);
  BlowupState x0 = to_blowup(q, xi, sys);

  IntegrateOptions opts;
  opts.max_step = 0.05;
  opts.detect_convergence = true;
  opts.convergence_sign = +1;
  Trajectory traj = integrate(x0, 0.0, 20.0, sys, opts);
  auto eq = detect_equilibrium(traj, sys, opts.tol);
  ExtractionDetail det = extract_manifold_detail(traj, *eq, sys);
  const ManifoldParams& mp = det.mp;

  // rho2 recovered by the tail regression
  double u0 = potential(mp.eq.s0, sys);
  double rho2_pred = (mp.rho1 / mp.eq.v0) * (mp.rho1 / mp.eq.v0) * u0;
  double rho2_err = std::abs(det.rho2 - rho2_pred) / std::abs(rho2_pred);
  c.require(rho2_err < 0.01 * ts, "rho2_err", rho2_err, 0.01 * ts);

  // residual slopes across the decade u in [1e-2, 1e-1]
  for (int order = 1; order <= 2; ++order) {
    std::vector<double> lx, ly;
    for (const auto& smp : traj.samples) {
      double u = std::exp(-mp.eq.v0 * smp.tau);
      if (u < 1e-2 || u > 1e-1) continue;
      SeriesPrediction pred = series_predict(mp, smp.tau, order, sys);
      double res = std::abs(smp.state.rho - pred.rho);
      if (res <= 0) continue;
      lx.push_back(std::log(u));
      ly.push_back(std::log(res));
    }
    // least-squares slope
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double expect = order + 1.0;
    c.require(std::abs(slope - expect) < 0.2 * ts,
              "slope" + std::to_string(order), slope, expect + 0.2 * ts);
  }
  return finish(5, "series_truncation_orders", c);
}

// --- 6: first-order scattering formula ------------------------------------

CriterionResult criterion_first_order(double ts) {
  Check c;
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  double h = 2.0;
  double om = std::sqrt(2.0 * h);
  Vec s0 = equilateral_s0(sys);
  Vec xi = -s0;
  Vec eta = eta_nonplanar(xi, sys);

  // quadrature vs planar closed form
  double dr = 1e-3;
  Vec dq = delta_A(xi, h, eta, dr, sys);
  Vec dp = delta_A_planar(xi, h, dr, sys);
  // the planar closed form carries a fixed orientation; compare against the
  // quadrature with eta the matching rotation direction
  Vec eta_or = perp(xi, sys);
  eta_or /= sys.norm(eta_or);
  Vec dq_or = delta_A(xi, h, eta_or, dr, sys);
  c.require(sys.norm(dq_or - dp) < 1e-9 * ts, "quad_vs_planar",
            sys.norm(dq_or - dp), 1e-9 * ts);
  (void)dq;

  // variational cross-check along the great-circle orbit
  {
    double T = 12.0;
    VariationalState v0s;
    v0s.base = infinity_flow(xi, eta_or, h, -T, sys);
    v0s.drho = dr / std::cosh(om * T);
    v0s.ds = Vec::Zero(sys.nd());
    v0s.dv = 0.0;
    v0s.dw = Vec::Zero(sys.nd());
    IntegrateOptions opts;
    opts.max_step = 0.05;
    auto var = integrate_variational(v0s, -T, T, sys, opts);
    const auto& first = var.front().state;
    const auto& last = var.back().state;
    auto dA = [&](const VariationalState& v) -> Vec {
      return v.dv * v.base.s + v.base.v * v.ds + v.dw;
    };
    Vec delta_num = dA(last) - dA(first);
    Vec delta_pred = delta_A(xi, h, eta_or, dr, sys);
    c.require(sys.norm(delta_num - delta_pred) < 1e-8 * ts, "variational_err",
              sys.norm(delta_num - delta_pred), 1e-8 * ts);
  }

  // halving test: err(kappa) = |(A' - A) - DeltaA| should scale as kappa^2
  {
    EquilibriumPoint p{s0, -om};
    Vec A = p.v0 * s0;
    auto err_at = [&](double kappa) {
      ManifoldParams mp{p, kappa * eta_or, kappa * kappa};
      ScatteringResult res = scattering_map(mp, sys, {});
      if (res.status != ScatterStatus::Ok)
        throw InvalidState("halving test: scattering failed");
      // exact ray slope and direction of this seed; along great-circle
      // orbits rho1/|s1| = drho(0), with s1 = 2 eta absorbing the factor
      OrbitParameter g = orbit_parameter(mp, sys);
      double slope = g.rho1 / sys.norm(g.shifted_s1);
      Vec dir = g.shifted_s1 / sys.norm(g.shifted_s1);
      Vec pred = delta_A(xi, h, dir, slope, sys);
      Vec Ap = res.future.eq.v0 * res.future.eq.s0;
      return sys.norm((Ap - A) - pred);
    };
    double e1 = err_at(1e-3);
    double e2 = err_at(5e-4);
    double ratio = e1 / e2;
    c.note("err_1e-3", e1);
    c.require(ratio > 3.0 && ratio < 5.0, "halving_ratio", ratio, 5.0);
  }
  return finish(6, "first_order_scattering", c);
}

// --- 7: kernel of the integrated Hessian ----------------------------------

CriterionResult criterion_kernel(double ts) {
  Check c;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> umass(0.5, 2.0);
  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_resid = 0.0;
  bool dims_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    int n = trial % 2 == 0 ? 3 : 4;
    std::vector<double> masses;
    for (int i = 0; i < n; ++i) masses.push_back(umass(rng));
    MassSystem sys(masses, 2);
    Vec xi = random_shape(rng, sys, 0.2);
    KernelReport rep = dbar_kernel(xi, sys);
    if (rep.dimension != 3 || rep.collinear) dims_ok = false;
    int nd = sys.nd();
    double gap = rep.singular_values(nd - 4) / rep.singular_values(nd - 3);
    worst_gap = std::min(worst_gap, gap);

    Mat Dbar = build_dbar_planar(xi, sys);
    double dnorm = Dbar.cwiseAbs().maxCoeff();
    std::vector<Vec> kernel_vectors;
    kernel_vectors.push_back(xi);
    Vec tx = Vec::Zero(nd), ty = Vec::Zero(nd);
    for (int i = 0; i < n; ++i) {
      tx[2 * i] = 1.0;
      ty[2 * i + 1] = 1.0;
    }
    kernel_vectors.push_back(tx);
    kernel_vectors.push_back(ty);
    for (const Vec& kv : kernel_vectors) {
      double resid = (Dbar * kv).cwiseAbs().maxCoeff() /
                     (dnorm * kv.cwiseAbs().maxCoeff());
      worst_resid = std::max(worst_resid, resid);
    }
  }
  c.require(dims_ok, "kernel_dim_3", dims_ok ? 1.0 : 0.0, 1.0);
  c.require(worst_gap >= 1e6 / ts, "svd_gap", worst_gap, 1e6 / ts);
  c.require(worst_resid < 1e-9 * ts, "kernel_resid", worst_resid, 1e-9 * ts);

  // collinear shapes are flagged, not asserted
  {
    MassSystem sys({1.0, 1.0, 1.0}, 2);
    Vec xi = Vec::Zero(6);
    xi[0] = -1.0;
    xi[4] = 1.0;  // bodies at -1, 0, 1 on the x axis
    xi = sys.project_zero_momentum(xi);
    xi /= sys.norm(xi);
    KernelReport rep = dbar_kernel(xi, sys);
    c.require(rep.collinear && rep.dimension > 3, "collinear_flagged",
              rep.collinear ? 1.0 : 0.0, 1.0);
  }
  return finish(7, "dbar_kernel_dimension", c);
}

// --- 8: rank of the image Jacobian ----------------------------------------

CriterionResult criterion_image_rank(double ts) {
  Check c;
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(12);
  double h = 2.0;
  for (int run = 0; run < 2; ++run) {
    Vec s0 = run == 0 ? equilateral_s0(sys) : random_shape(rng, sys, 0.35);
    EquilibriumPoint p{s0, -std::sqrt(2.0 * h)};
    Vec eta = eta_nonplanar(s0, sys);
    Mat J = image_jacobian(p, eta, 1e-3, 1e-3, sys);
    Eigen::JacobiSVD<Mat> svd(J);
    int D = sys.d() * (sys.n() - 1);
    double gap = svd.singularValues()(0) / svd.singularValues()(D - 2);
    bool full = svd.singularValues()(D - 2) >
                1e-6 / ts * svd.singularValues()(0);
    c.require(full, "full_rank_ratio", gap, 1e6 * ts);
  }
  return finish(8, "image_jacobian_rank", c);
}

// --- 9: symmetry properties of the scattering relation --------------------

CriterionResult criterion_relation_symmetries(double ts) {
  Check c;
  std::vector<std::pair<MassSystem, std::vector<ManifoldParams>>> suites;

  // Kepler family
  {
    std::vector<ManifoldParams> seeds;
    KeplerOrbit orb0 = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
    MassSystem sys = kepler_system(orb0);
    for (double e : {1.3, 1.6, 2.0, 2.5, 3.0, 4.0, 6.0, 9.0}) {
      KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, e);
      KeplerScattering ks = kepler_scattering(orb);
      EquilibriumPoint p{kepler_embed(orb, ks.s0), -orb.omega};
      OrbitParameter g{1.0, kepler_embed(orb, ks.C)};
      double k = 5e-4 / std::max(1.0, sys.norm(g.shifted_s1));
      seeds.push_back(manifold_from_parameter(p, g, k, sys));
    }
    suites.push_back({sys, seeds});
  }

  // 3-body near-infinity seeds
  {
    MassSystem sys({1.0, 1.0, 1.0}, 2);
    std::mt19937 rng(314);
    std::vector<ManifoldParams> seeds;
    double om = std::sqrt(4.0);
    for (int i = 0; i < 12; ++i) {
      Vec s0 = i == 0 ? equilateral_s0(sys) : random_shape(rng, sys, 0.35);
      EquilibriumPoint p{s0, -om};
      Vec eta = eta_nonplanar(s0, sys);
      Mat B = slice_basis(s0, eta, sys);
      Vec dir = eta + 0.1 * (i % 3 - 1) * B.col(i % B.cols());
      dir /= sys.norm(dir);
      double slope = i % 2 == 0 ? 1e-3 : 5e-4;
      seeds.push_back(ManifoldParams{p, 1e-3 * dir, 1e-3 * slope});
    }
    suites.push_back({sys, seeds});
  }

  int tested = 0;
  double worst = 0.0;
  bool all = true;
  std::string failures;
  for (auto& [sys, seeds] : suites) {
    PropertyReport rep = check_relation_properties(seeds, sys, 1e-6 * ts);
    tested += rep.orbits_tested;
    for (const auto& it : rep.items) {
      worst = std::max(worst, it.max_deviation);
      if (!it.pass) {
        all = false;
        failures += (failures.empty() ? "" : ",") + it.name;
      }
    }
  }
  c.require(tested >= 20, "orbits", tested, 20);
  c.require(all, failures.empty() ? "max_dev" : "failed:" + failures, worst,
            1e-6 * ts);
  return finish(9, "scattering_relation_symmetries", c);
}

// --- 10: contraction of the image near the boundary -----------------------

CriterionResult criterion_near_infinity(double ts) {
  Check c;
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  double om = 2.0;
  Vec s0 = equilateral_s0(sys);
  EquilibriumPoint p{s0, -om};
  Vec A = p.v0 * s0;

  SweepGrid grid;
  grid.perturbations = {-0.1, -0.05, 0.0, 0.05, 0.1};
  grid.seed_scale = 1e-3;
  grid.eta = eta_nonplanar(s0, sys);

  std::vector<double> scales{1e-2, 1e-3, 1e-4};
  std::vector<double> dispersion;
  bool recorded = true;
  for (double scale : scales) {
    grid.ray_scales = {scale};
    auto results = sweep_image(p, grid, sys, {}, 1);
    double disp = 0.0;
    for (const auto& res : results) {
      if (res.status != ScatterStatus::Ok) {
        recorded = false;
        continue;
      }
      Vec Ap = res.future.eq.v0 * res.future.eq.s0;
      disp = std::max(disp, sys.norm(Ap - A) / sys.norm(A));
      if (!(res.diagnostics.max_rho > 0.0) ||
          !(res.diagnostics.max_shape_potential > 0.0))
        recorded = false;
    }
    dispersion.push_back(disp);
  }
  c.require(recorded, "diagnostics_recorded", recorded ? 1.0 : 0.0, 1.0);
  c.note("disp_1e-2", dispersion[0]);
  c.note("disp_1e-3", dispersion[1]);
  c.note("disp_1e-4", dispersion[2]);
  // at least linear contraction per decade (50% slack)
  c.require(dispersion[1] <= 0.15 * ts * dispersion[0], "ratio_32",
            dispersion[1] / dispersion[0], 0.15 * ts);
  c.require(dispersion[2] <= 0.15 * ts * dispersion[1], "ratio_43",
            dispersion[2] / dispersion[1], 0.15 * ts);
  return finish(10, "near_infinity_contraction", c);
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(double tolerance_scale) {
  double ts = tolerance_scale;
  std::vector<CriterionResult> out;
  out.push_back(criterion_kepler_closure(ts));
  out.push_back(criterion_infinity_flow(ts));
  out.push_back(criterion_linearization(ts));
  out.push_back(criterion_chazy_law(ts));
  out.push_back(criterion_series_orders(ts));
  out.push_back(criterion_first_order(ts));
  out.push_back(criterion_kernel(ts));
  out.push_back(criterion_image_rank(ts));
  out.push_back(criterion_relation_symmetries(ts));
  out.push_back(criterion_near_infinity(ts));
  return out;
}

bool report_acceptance(std::ostream& os,
                       const std::vector<CriterionResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name
       << ": " << r.detail << "\n";
    if (!r.pass) all = false;
  }
  os << (all ? "ALL CRITERIA PASS" : "CRITERIA FAILED") << "\n";
  return all;
}

}  // namespace nbs
