#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nbscatter/chazy.hpp"

namespace nbs {

// Ray-normalized orbit label gamma = (rho1, s1 - (rho1 log(rho1 |v0|)/v0^2)
// grad~U(s0)): if rho1 > 0 it is scaled so rho1 = 1 (shifted_s1 is then the
// Chazy C), otherwise shifted_s1 has unit mass norm.
struct OrbitParameter {
  double rho1 = 0.0;
  Vec shifted_s1;
};

OrbitParameter orbit_parameter(const ManifoldParams& mp, const MassSystem& sys);

// Inverse of orbit_parameter at a chosen amplitude: reconstructs
// ManifoldParams on the ray of gamma with scale k (rho1 = k * gamma.rho1).
ManifoldParams manifold_from_parameter(const EquilibriumPoint& eq,
                                       const OrbitParameter& gamma, double k,
                                       const MassSystem& sys);

// Distance between rays: minimum over positive scalings, relative.
double ray_distance(const OrbitParameter& a, const OrbitParameter& b,
                    const MassSystem& sys);

enum class ScatterStatus {
  Ok,
  Singular,       // collision event during integration
  NoConvergence,  // tau budget exhausted without reaching an equilibrium
  SeedScale       // seed outside the admissible scale bound
};

const char* scatter_status_name(ScatterStatus s);

struct ScatteringDiagnostics {
  double min_pair_distance = 0.0;
  double max_rho = 0.0;
  double max_shape_potential = 0.0;
  double energy_drift = 0.0;
  double tau_end = 0.0;
};

struct ScatteringResult {
  ScatterStatus status = ScatterStatus::Ok;
  ManifoldParams past;
  ManifoldParams future;
  OrbitParameter past_gamma;
  OrbitParameter future_gamma;
  std::optional<ChazyParameters> past_chazy;
  std::optional<ChazyParameters> future_chazy;
  ScatteringDiagnostics diagnostics;
  std::string message;
};

struct ScatterOptions {
  ToleranceSet tol;
  double tau_budget = 0.0;  // 0 means 50/sqrt(2h)
};

// The scattering map F: seed the unstable-manifold orbit of `past`
// (v0 < 0), integrate forward until convergence to an attracting
// equilibrium, and extract the future parameters.
ScatteringResult scattering_map(const ManifoldParams& past,
                                const MassSystem& sys,
                                const ScatterOptions& opts = {});

// Scattering of orbits inside the infinity manifold: closed form,
// (s0, v0, [0, s1]) -> (-s0, -v0, [0, s1]) with s1 = 2 eta.
ScatteringResult infinity_scattering(const EquilibriumPoint& p, const Vec& eta,
                                     const MassSystem& sys);

// Per-body 90 degree rotation in the first two coordinates.
Vec perp(const Vec& q, const MassSystem& sys);

// First-order change of the Chazy A across the near-infinity passage:
// (drho0 / sqrt(2h)) * integral of grad U over the half great circle.
Vec delta_A(const Vec& xi, double h, const Vec& eta, double drho0,
            const MassSystem& sys, double quad_tol = 1e-10);

// Planar closed form (2 drho0 / sqrt(2h)) * perp(grad U(xi)).
Vec delta_A_planar(const Vec& xi, double h, double drho0,
                   const MassSystem& sys);

// Cos-weighted great-circle integral of the Hessian of grad U.
Mat build_dbar(const Vec& xi, const Vec& eta, const MassSystem& sys,
               double quad_tol = 1e-10);

// Closed form for planar xi with eta = perp(xi)/|..|: parallel blocks
// -2 (m_j/r^3) v v^T (v the rotated unit separation) and, for d > 2,
// transverse blocks 2 (m_j/r^3) I.
Mat build_dbar_planar(const Vec& xi, const MassSystem& sys);

struct KernelReport {
  int dimension = 0;      // numerical kernel dimension of Dbar
  Mat basis;              // right singular vectors spanning the kernel
  Vec singular_values;
  bool collinear = false;  // flagged; kernel statements do not apply
  int restricted_rank = 0;  // rank of [Dbar B | Dbar eta] on the slice
  int expected_rank = 0;    // D - 1
};

KernelReport dbar_kernel(const Vec& xi, const MassSystem& sys,
                         double svd_threshold = 1e-8);

// Orthonormal (mass metric) tangent direction for non-planar shapes:
// project each body to the first two coordinates, rotate 90 degrees,
// project to zero momentum and orthogonalize against s0.
Vec eta_nonplanar(const Vec& s0, const MassSystem& sys);

// Symmetry checks of the scattering relation on a set of past seeds.
struct PropertyReport {
  struct Item {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::vector<int> failed_seeds;
  };
  std::vector<Item> items;
  int orbits_tested = 0;
  bool all_pass() const;
};

PropertyReport check_relation_properties(const std::vector<ManifoldParams>& seeds,
                                         const MassSystem& sys,
                                         double tol = 1e-6,
                                         const ScatterOptions& opts = {});

// Grid of unstable-manifold seeds around a past equilibrium: ray scales
// times perturbations of the s1 direction.
struct SweepGrid {
  std::vector<double> ray_scales;      // rho1 amplitudes relative to |s1|
  std::vector<double> perturbations;   // coefficients along a slice direction
  int pert_direction = 0;              // which slice basis vector to perturb
  double seed_scale = 1e-3;            // |s1| of the emitted seeds
  Vec eta;                             // base s1 direction (unit, ⊥ s0)
};

std::vector<ManifoldParams> sweep_seeds(const EquilibriumPoint& p,
                                        const SweepGrid& grid,
                                        const MassSystem& sys);

std::vector<ScatteringResult> sweep_image(const EquilibriumPoint& p,
                                          const SweepGrid& grid,
                                          const MassSystem& sys,
                                          const ScatterOptions& opts = {},
                                          int workers = 1);

// Mass-orthonormal basis of {zero momentum} ∩ {⊥ s0} ∩ {⊥ eta}.
Mat slice_basis(const Vec& s0, const Vec& eta, const MassSystem& sys);

// Central-difference Jacobian of the future A with respect to the
// restricted (D-1)-dimensional seed slice (rho1 amplitude plus slice
// directions), Richardson-extrapolated from two step sizes.
Mat image_jacobian(const EquilibriumPoint& p, const Vec& eta, double rho1,
                   double seed_scale, const MassSystem& sys,
                   const ScatterOptions& opts = {});

// Number of singular values within `gap` of the largest.
int numerical_rank(const Mat& m, double gap);

}  // namespace nbs
