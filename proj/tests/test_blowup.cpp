#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "nbscatter/blowup.hpp"
#include "nbscatter/kepler.hpp"
#include "nbscatter/nbody.hpp"
#include "nbscatter/scattering.hpp"

using namespace nbs;
using nbs::testing::equilateral_s0;
using nbs::testing::random_config;
using nbs::testing::random_shape;

namespace {

BlowupState random_state(std::mt19937& rng, const MassSystem& sys,
                         double rho) {
  BlowupState x;
  x.rho = rho;
  x.s = random_shape(rng, sys, 0.3);
  std::normal_distribution<double> gauss;
  x.v = gauss(rng);
  Vec w = random_config(rng, sys);
  w -= sys.inner(x.s, w) * x.s;
  x.w = w;
  return x;
}

}  // namespace

TEST_CASE("to_blowup and from_blowup") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(10);
  Vec s = random_shape(rng, sys, 0.3);

  BlowupState x = to_blowup(s, 2.0 * s, sys);
  CHECK(x.rho == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x.v == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sys.norm(x.w) < 1e-13);
  CHECK((x.s - s).cwiseAbs().maxCoeff() < 1e-14);

  Vec q = random_config(rng, sys, 0.3);
  Vec xi = random_config(rng, sys);
  BlowupState y = to_blowup(q, xi, sys);
  CHECK(std::abs(sys.inner(y.s, y.s) - 1.0) < 1e-13);
  CHECK(std::abs(sys.inner(y.s, y.w)) < 1e-13);
  auto [q2, xi2] = from_blowup(y, sys);
  CHECK((q - q2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((xi - xi2).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(to_blowup(Vec::Zero(6), xi, sys), InvalidState);
  BlowupState at_inf = y;
  at_inf.rho = 0.0;
  CHECK_THROWS_AS(from_blowup(at_inf, sys), InvalidState);
}

TEST_CASE("perihelion maps to v = 0") {
  KeplerOrbit orb = KeplerOrbit::from_energy(2.0, 2.0, 2.0, 2.0);
  MassSystem sys = kepler_system(orb);
  auto [q, xi] = kepler_state(orb, 0.0);
  BlowupState x = to_blowup(q, xi, sys);
  CHECK(std::abs(x.v) < 1e-13);
}

TEST_CASE("blowup energy matches cartesian energy") {
  MassSystem sys({1.0, 2.0, 0.5}, 2);
  std::mt19937 rng(11);
  BlowupState x = random_state(rng, sys, 0.7);
  auto [q, xi] = from_blowup(x, sys);
  CHECK(blowup_energy(x, sys) ==
        doctest::Approx(energy(q, xi, sys)).epsilon(1e-12));
}

TEST_CASE("vector field vanishes at equilibria and conserves energy") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(12);
  BlowupState eq;
  eq.rho = 0.0;
  eq.s = equilateral_s0(sys);
  eq.v = -2.0;
  eq.w = Vec::Zero(6);
  BlowupState f = vector_field(eq, sys);
  CHECK(std::abs(f.rho) + sys.norm(f.s) + std::abs(f.v) + sys.norm(f.w) <
        1e-14);

  for (int trial = 0; trial < 5; ++trial) {
    BlowupState x = random_state(rng, sys, 0.5);
    BlowupState d = vector_field(x, sys);
    // dH/dtau = v v' + <w,w'> - rho' U - rho <grad U, s'>
    double u = potential(x.s, sys);
    double dH = x.v * d.v + sys.inner(x.w, d.w) - d.rho * u -
                x.rho * sys.inner(grad_potential(x.s, sys), d.s);
    CHECK(std::abs(dH) < 1e-12);
    // constraint derivatives vanish
    CHECK(std::abs(sys.inner(x.s, d.s)) < 1e-12);
  }
}

TEST_CASE("infinity flow closed form") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  double h = 2.0;
  Vec xi = equilateral_s0(sys);
  Vec eta = eta_nonplanar(xi, sys);

  BlowupState mid = infinity_flow(xi, eta, h, 0.0, sys);
  CHECK(mid.rho == 0.0);
  CHECK(std::abs(mid.v) < 1e-14);
  CHECK((mid.s - eta).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((mid.w - 2.0 * xi).cwiseAbs().maxCoeff() < 1e-13);

  // field residual against a 4th-order finite difference of the closed form
  for (double tau : {-2.0, -0.5, 0.3, 1.7}) {
    BlowupState x = infinity_flow(xi, eta, h, tau, sys);
    CHECK(std::abs(x.v * x.v + sys.inner(x.w, x.w) - 2.0 * h) < 1e-12);
    BlowupState f = vector_field(x, sys);
    double eps = 1e-3;
    auto at = [&](double t) { return infinity_flow(xi, eta, h, t, sys); };
    Vec p1 = at(tau + eps).pack(), m1 = at(tau - eps).pack();
    Vec p2 = at(tau + 2 * eps).pack(), m2 = at(tau - 2 * eps).pack();
    Vec fd = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * eps);
    CHECK((fd - f.pack()).cwiseAbs().maxCoeff() < 1e-10);
  }

  Vec bad = 1.1 * eta;
  CHECK_THROWS_AS(infinity_flow(xi, bad, h, 0.0, sys), InvalidState);
}

TEST_CASE("linearization matrix structure") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(13);
  Vec s0 = random_shape(rng, sys, 0.3);
  EquilibriumPoint p{s0, -2.0};
  Mat L = linearization_matrix(p, sys);
  const int nd = 6;

  // (0, s1, v1, 0) directions are in the kernel
  Vec z = Vec::Zero(2 * nd + 2);
  z.segment(1, nd) = random_config(rng, sys);
  z[nd + 1] = 0.7;
  CHECK((L * z).cwiseAbs().maxCoeff() < 1e-13);

  // generalized eigenvector: (L + v0)^2 G = 0 but (L + v0) G != 0
  Vec G = generalized_eigenvector(p, sys);
  Mat S = L + p.v0 * Mat::Identity(L.rows(), L.cols());
  CHECK((S * (S * G)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((S * G).cwiseAbs().maxCoeff() > 1e-6);

  // finite-difference Jacobian of the field in the thickened space
  BlowupState base;
  base.rho = 0.0;
  base.s = s0;
  base.v = p.v0;
  base.w = Vec::Zero(nd);
  Vec y0 = base.pack();
  double eps = 1e-6;
  for (int k = 0; k < y0.size(); ++k) {
    Vec yp = y0, ym = y0;
    yp[k] += eps;
    ym[k] -= eps;
    Vec fp = vector_field(BlowupState::unpack(yp, nd), sys).pack();
    Vec fm = vector_field(BlowupState::unpack(ym, nd), sys).pack();
    Vec fd = (fp - fm) / (2 * eps);
    for (int r = 0; r < y0.size(); ++r)
      CHECK(L(r, k) == doctest::Approx(fd[r]).epsilon(1e-5));
  }
}

TEST_CASE("exact linearized flow") {
  MassSystem sys({1.0, 1.3, 0.6}, 2);
  std::mt19937 rng(14);
  Vec s0 = random_shape(rng, sys, 0.3);
  EquilibriumPoint p{s0, 2.0};

  Mat E0 = linearized_flow_exact(p, 0.0, sys);
  CHECK((E0 - Mat::Identity(E0.rows(), E0.cols())).cwiseAbs().maxCoeff() <
        1e-14);

  Mat E1 = linearized_flow_exact(p, 0.7, sys);
  Mat E2 = linearized_flow_exact(p, -0.4, sys);
  Mat E12 = linearized_flow_exact(p, 0.3, sys);
  CHECK((E1 * E2 - E12).cwiseAbs().maxCoeff() < 1e-9);

  // the zero eigenspace is pointwise fixed
  Vec z = Vec::Zero(14);
  z.segment(1, 6) = random_config(rng, sys);
  z[7] = -1.1;
  CHECK((E1 * z - z).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("seed state") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  Vec s0 = equilateral_s0(sys);
  EquilibriumPoint p{s0, -2.0};
  Vec eta = eta_nonplanar(s0, sys);

  BlowupState at_eq = seed_state({p, Vec::Zero(6), 0.0}, sys);
  CHECK(at_eq.rho == 0.0);
  CHECK((at_eq.s - s0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(at_eq.v == doctest::Approx(-2.0));
  CHECK(sys.norm(at_eq.w) < 1e-14);

  double k = 1e-3;
  BlowupState on_sigma = seed_state({p, k * eta, 0.0}, sys);
  CHECK(on_sigma.rho == 0.0);
  CHECK(sys.norm(on_sigma.w - (-p.v0 * k) * eta) < 5.0 * k * k);

  // energy defect quarters when the seed scale halves
  auto defect = [&](double scale) {
    BlowupState x = seed_state({p, scale * eta, scale}, sys);
    return std::abs(blowup_energy(x, sys) - 2.0);
  };
  double ratio = defect(1e-3) / defect(5e-4);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);

  // non-orthogonal s1 is rejected
  CHECK_THROWS_AS(seed_state({p, s0, 1e-3}, sys), InvalidState);
}

TEST_CASE("linear model flow matches restricted exact flow") {
  MassSystem sys({1.0, 1.0, 1.0}, 2);
  std::mt19937 rng(15);
  Vec s0 = random_shape(rng, sys, 0.3);
  EquilibriumPoint p{s0, -2.0};
  Vec eta = eta_nonplanar(s0, sys);
  ManifoldParams mp{p, 1e-3 * eta, 2e-3};

  ManifoldParams id = linear_model_flow(mp, 0.0, sys);
  CHECK(id.rho1 == doctest::Approx(mp.rho1));
  CHECK((id.s1 - mp.s1).cwiseAbs().maxCoeff() < 1e-16);

  // composition law
  ManifoldParams a = linear_model_flow(linear_model_flow(mp, 0.4, sys), 0.3, sys);
  ManifoldParams b = linear_model_flow(mp, 0.7, sys);
  CHECK(std::abs(a.rho1 - b.rho1) < 1e-15);
  CHECK((a.s1 - b.s1).cwiseAbs().maxCoeff() < 1e-15);

  // rho1 = 0: pure exponential decay of s1
  ManifoldParams bd{p, 1e-3 * eta, 0.0};
  ManifoldParams bd2 = linear_model_flow(bd, 0.5, sys);
  double u = std::exp(-p.v0 * 0.5);
  CHECK((bd2.s1 - u * bd.s1).cwiseAbs().maxCoeff() < 1e-15);

  // embed -> exact flow -> compare with model flow -> embed
  for (double tau : {-0.6, 0.9}) {
    Vec emb = embed_manifold_tangent(mp, sys);
    Vec flowed = linearized_flow_exact(p, tau, sys) * emb;
    Vec model = embed_manifold_tangent(linear_model_flow(mp, tau, sys), sys);
    CHECK((flowed - model).cwiseAbs().maxCoeff() < 1e-12);
  }
}
