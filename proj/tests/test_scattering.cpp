#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "nbscatter/blowup.hpp"
#include "nbscatter/chazy.hpp"
#include "nbscatter/kepler.hpp"
#include "nbscatter/nbody.hpp"
#include "nbscatter/scattering.hpp"

using namespace nbs;
using nbs::testing::equilateral_s0;
using nbs::testing::random_shape;

TEST_CASE("orbit parameter normalization and ray invariance") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  Vec s0 = equilateral_s0(sys);
  EquilibriumPoint p{s0, -2.0};
  Vec eta = eta_nonplanar(s0, sys);

  // boundary ray: rho1 = 0
  OrbitParameter bd = orbit_parameter({p, 0.5 * eta, 0.0}, sys);
  CHECK(bd.rho1 == 0.0);
  CHECK(sys.norm(bd.shifted_s1 - eta) < 1e-13);

  // interior ray is normalized to rho1 = 1, invariant under the model flow
  ManifoldParams mp{p, 1e-3 * eta, 2e-3};
  OrbitParameter g = orbit_parameter(mp, sys);
  CHECK(g.rho1 == 1.0);
  for (double tau : {-1.0, 0.7, 2.3}) {
    OrbitParameter gf = orbit_parameter(linear_model_flow(mp, tau, sys), sys);
    CHECK(ray_distance(g, gf, sys) < 1e-10);
  }

  // zero input is rejected
  CHECK_THROWS_AS(orbit_parameter({p, Vec::Zero(6), 0.0}, sys), InvalidState);

  // inverse at a chosen amplitude
  ManifoldParams back = manifold_from_parameter(p, g, 1e-3, sys);
  CHECK(ray_distance(orbit_parameter(back, sys), g, sys) < 1e-12);
}

TEST_CASE("kepler scattering map closes against the closed form") {
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
  MassSystem sys = kepler_system(orb);
  KeplerScattering ks = kepler_scattering(orb);
  EquilibriumPoint p{kepler_embed(orb, ks.s0), -orb.omega};
  OrbitParameter gamma{1.0, kepler_embed(orb, ks.C)};
  ManifoldParams seed = manifold_from_parameter(p, gamma, 2e-4, sys);

  ScatteringResult res = scattering_map(seed, sys, {});
  REQUIRE(res.status == ScatterStatus::Ok);
  // the seed chart matches the orbit's energy only to second order in the
  // seed amplitude, so v0' = sqrt(2h_actual) carries an O(k^2) offset
  CHECK(res.future.eq.v0 == doctest::Approx(orb.omega).epsilon(1e-6));
  CHECK(sys.norm(res.future.eq.s0 - kepler_embed(orb, ks.s0p)) < 1e-6);
  // future gamma lies on the C' ray
  OrbitParameter expect{1.0, kepler_embed(orb, ks.Cp)};
  CHECK(ray_distance(res.future_gamma, expect, sys) < 1e-6);
  // Chazy A' matches
  REQUIRE(res.future_chazy.has_value());
  CHECK(sys.norm(res.future_chazy->A - kepler_embed(orb, ks.Ap)) < 1e-6);
  // energy equality of |A| across past and future: the past A uses the
  // nominal seed equilibrium, off from the actual orbit at O(k^2)
  double apast = sys.inner(res.past_chazy->A, res.past_chazy->A);
  double afut = sys.inner(res.future_chazy->A, res.future_chazy->A);
  CHECK(std::abs(apast - afut) < 1e-5 * 2.0 * orb.h);
}

TEST_CASE("scattering at the infinity boundary") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  Vec s0 = equilateral_s0(sys);
  EquilibriumPoint p{s0, -2.0};
  Vec eta = eta_nonplanar(s0, sys);

  ScatteringResult closed = infinity_scattering(p, eta, sys);
  CHECK(closed.status == ScatterStatus::Ok);
  CHECK(sys.norm(closed.future.eq.s0 + s0) < 1e-14);
  CHECK(closed.future.eq.v0 == doctest::Approx(2.0));
  // Chazy-A form is the identity; s1 = 2 eta on both sides
  Vec A_past = closed.past.eq.v0 * closed.past.eq.s0;
  Vec A_fut = closed.future.eq.v0 * closed.future.eq.s0;
  CHECK(sys.norm(A_past - A_fut) < 1e-14);
  CHECK(sys.norm(closed.past.s1 - 2.0 * eta) < 1e-14);
  CHECK(sys.norm(closed.future.s1 - 2.0 * eta) < 1e-14);

  // integration path through scattering_map agrees at rho1 = 0
  ManifoldParams mp{p, 1e-3 * eta, 0.0};
  ScatteringResult num = scattering_map(mp, sys, {});
  REQUIRE(num.status == ScatterStatus::Ok);
  CHECK(sys.norm(num.future.eq.s0 + s0) < 1e-7);
  CHECK(num.future.rho1 < 1e-9);
  CHECK(ray_distance(num.future_gamma, closed.future_gamma, sys) < 1e-6);
}

TEST_CASE("scattering map input validation") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  Vec s0 = equilateral_s0(sys);
  Vec eta = eta_nonplanar(s0, sys);

  // seed scale bound
  ScatteringResult big =
      scattering_map({{s0, -2.0}, 0.5 * eta, 0.5}, sys, {});
  CHECK(big.status == ScatterStatus::SeedScale);

  // past equilibrium must have v0 < 0
  CHECK_THROWS_AS(scattering_map({{s0, 2.0}, 1e-3 * eta, 1e-3}, sys, {}),
                  InvalidState);
}

TEST_CASE("first-order change of A") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  double h = 2.0;
  std::mt19937 rng(30);
  Vec xi = random_shape(rng, sys, 0.35);

  CHECK(sys.norm(delta_A(xi, h, eta_nonplanar(xi, sys), 0.0, sys)) == 0.0);

  // planar closed form vs quadrature with the oriented perpendicular frame
  Vec eta = perp(xi, sys);
  eta /= sys.norm(eta);
  Vec quad = delta_A(xi, h, eta, 1e-3, sys);
  Vec closed = delta_A_planar(xi, h, 1e-3, sys);
  CHECK(sys.norm(quad - closed) < 1e-9);

  // each block of the closed form is the rotated gradient block
  Vec g = grad_potential(xi, sys);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(closed.segment(2 * i, 2).dot(g.segment(2 * i, 2))) < 1e-12);
}

TEST_CASE("image curve tangent at the boundary") {
  // d s'(0)/d(ray slope) direction: A'(kappa) - A ~ delta_A at slope kappa
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  Vec s0 = equilateral_s0(sys);
  EquilibriumPoint p{s0, -2.0};
  Vec xi = -s0;
  Vec eta = perp(xi, sys);
  eta /= sys.norm(eta);

  double kappa = 1e-3;
  ManifoldParams mp{p, kappa * eta, kappa * kappa};
  ScatteringResult res = scattering_map(mp, sys, {});
  REQUIRE(res.status == ScatterStatus::Ok);
  Vec A = p.v0 * s0;
  Vec Ap = res.future.eq.v0 * res.future.eq.s0;
  OrbitParameter g = orbit_parameter(mp, sys);
  // along great-circle orbits rho ~ 2 drho0 e^{-om|tau|} and s1 = 2 eta,
  // so the ray slope rho1/|s1| equals drho0 itself
  double slope = g.rho1 / sys.norm(g.shifted_s1);
  Vec pred = delta_A_planar(xi, 2.0, slope, sys);
  CHECK(sys.norm((Ap - A) - pred) / sys.norm(pred) < 5e-2);
  // equivalently s'(0) = (1/h) grad U(-s0)^perp in the shape sphere
  Vec spred = perp(grad_potential(xi, sys), sys) / 2.0;
  Vec sdot = (res.future.eq.s0 - xi) / slope;
  CHECK(sys.norm(sdot - spred) / sys.norm(spred) < 5e-2);
}

TEST_CASE("integrated hessian") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(31);
  Vec xi = random_shape(rng, sys, 0.35);
  Vec eta = perp(xi, sys);
  eta /= sys.norm(eta);

  Mat quad = build_dbar(xi, eta, sys);
  Mat closed = build_dbar_planar(xi, sys);
  CHECK((quad - closed).cwiseAbs().maxCoeff() < 1e-9);

  // Dbar eta = -2 grad U(xi)^perp (the quadrature fixes the sign)
  Vec lhs = closed * eta;
  Vec rhs = -2.0 * perp(grad_potential(xi, sys), sys);
  CHECK(sys.norm(lhs - rhs) < 1e-12);
  CHECK(sys.norm(Vec(quad * eta) - rhs) < 1e-9);

  // quadratic form: beta^T M Dbar beta = 2 sum (m_i m_j / r^3)(beta_ij.v_ij)^2
  for (int trial = 0; trial < 3; ++trial) {
    Vec beta = random_shape(rng, sys, 0.0);
    Vec Mb = sys.apply_mass(Vec(closed * beta));
    double direct = beta.dot(Mb);
    double formula = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        Vec dq = sys.body(xi, j) - sys.body(xi, i);
        double r = dq.norm();
        Vec v(2);
        v << -dq.y() / r, dq.x() / r;
        Vec db = sys.body(beta, i) - sys.body(beta, j);
        double proj = db.dot(v);
        formula += 2.0 * (sys.mass(i) * sys.mass(j) / (r * r * r)) * proj * proj;
      }
    CHECK(direct == doctest::Approx(formula).epsilon(1e-10));
  }
}

TEST_CASE("kernel of the integrated hessian") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  KernelReport rep = dbar_kernel(equilateral_s0(sys), sys);
  CHECK(rep.dimension == 3);
  CHECK(!rep.collinear);
  CHECK(rep.restricted_rank == rep.expected_rank);
  CHECK(rep.expected_rank == 3);  // D - 1 with D = 2*(3-1)

  // random planar non-collinear four bodies
  MassSystem four({1.0, 0.8, 1.2, 0.6}, 2);
  std::mt19937 rng(32);
  KernelReport rep4 = dbar_kernel(random_shape(rng, four, 0.3), four);
  CHECK(rep4.dimension == 3);

  // collinear three bodies: flagged, not asserted
  Vec line = Vec::Zero(6);
  line[0] = -1.0;
  line[4] = 1.0;
  line = sys.project_zero_momentum(line);
  line /= sys.norm(line);
  KernelReport repc = dbar_kernel(line, sys);
  CHECK(repc.collinear);
  CHECK(repc.dimension > 3);
}

TEST_CASE("eta construction") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(33);
  Vec s0 = random_shape(rng, sys, 0.3);
  Vec eta = eta_nonplanar(s0, sys);
  CHECK(std::abs(sys.norm(eta) - 1.0) < 1e-12);
  CHECK(std::abs(sys.inner(s0, eta)) < 1e-12);
  // planar case recovers the rotated configuration direction
  Vec pl = perp(s0, sys);
  pl /= sys.norm(pl);
  CHECK(std::abs(std::abs(sys.inner(eta, pl)) - 1.0) < 1e-12);

  // spatial configuration
  MassSystem sp({1.0, 1.0, 1.0}, 3);
  Vec s3 = random_shape(rng, sp, 0.3);
  Vec eta3 = eta_nonplanar(s3, sp);
  CHECK(std::abs(sp.norm(eta3) - 1.0) < 1e-12);
  CHECK(std::abs(sp.inner(s3, eta3)) < 1e-12);

  // all bodies on the transverse axis: projections vanish
  Vec axis = Vec::Zero(9);
  axis[2] = 1.0;
  axis[5] = -2.0;
  axis[8] = 1.0;
  axis = sp.project_zero_momentum(axis);
  axis /= sp.norm(axis);
  CHECK_THROWS_AS(eta_nonplanar(axis, sp), InvalidState);
}

TEST_CASE("relation property harness on a small suite") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(34);
  std::vector<ManifoldParams> seeds;
  for (int i = 0; i < 2; ++i) {
    Vec s0 = i == 0 ? equilateral_s0(sys) : random_shape(rng, sys, 0.35);
    Vec eta = eta_nonplanar(s0, sys);
    seeds.push_back({{s0, -2.0}, 1e-3 * eta, 1e-3});
  }
  PropertyReport rep = check_relation_properties(seeds, sys, 1e-6);
  CHECK(rep.orbits_tested == 2);
  for (const auto& item : rep.items) {
    INFO(item.name, " deviation ", item.max_deviation);
    CHECK(item.pass);
  }
}

TEST_CASE("sweeps are deterministic and grid-shaped") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  Vec s0 = equilateral_s0(sys);
  EquilibriumPoint p{s0, -2.0};
  SweepGrid grid;
  grid.ray_scales = {1e-2, 1e-3};
  grid.perturbations = {-0.1, 0.0, 0.1};
  grid.seed_scale = 1e-3;
  grid.eta = eta_nonplanar(s0, sys);

  auto seeds = sweep_seeds(p, grid, sys);
  CHECK(seeds.size() == 6);

  auto r1 = sweep_image(p, grid, sys, {}, 2);
  auto r2 = sweep_image(p, grid, sys, {}, 1);
  REQUIRE(r1.size() == 6);
  REQUIRE(r2.size() == 6);
  for (size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].status == r2[i].status);
    CHECK(sys.norm(r1[i].future.eq.s0 - r2[i].future.eq.s0) == 0.0);
  }

  SweepGrid empty;
  empty.eta = grid.eta;
  CHECK(sweep_image(p, empty, sys, {}, 2).empty());
}

TEST_CASE("numerical rank helper") {
  Mat m = Mat::Zero(4, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-3;
  m(2, 2) = 1e-12;
  CHECK(numerical_rank(m, 1e-8) == 2);
  CHECK(numerical_rank(m, 1e-14) == 3);
}
