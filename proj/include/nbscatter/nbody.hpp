#pragma once

#include "nbscatter/types.hpp"

namespace nbs {

// Newtonian potential U(q) = sum_{i<j} m_i m_j / |q_i - q_j|.
double potential(const Vec& q, const MassSystem& sys,
                 double collision_tol = 1e-8);

// Gradient with respect to the mass metric: block i is
// sum_{j != i} m_j (q_j - q_i) / |q_i - q_j|^3. Lies in the zero-momentum
// subspace.
Vec grad_potential(const Vec& q, const MassSystem& sys,
                   double collision_tol = 1e-8);

// Tangential component along the unit sphere: grad U(s) + U(s) s.
Vec tangential_grad(const Vec& s, const MassSystem& sys,
                    double collision_tol = 1e-8);

// Total energy 0.5 |xi|_M^2 - U(q).
double energy(const Vec& q, const Vec& xi, const MassSystem& sys);

// Derivative of grad_potential: nd x nd block matrix with
// D_ij = (m_j / r_ij^3)(I - 3 u u^T) for i != j and D_ii = -sum_j D_ij.
Mat hessian_blocks(const Vec& xi, const MassSystem& sys,
                   double collision_tol = 1e-8);

// Smallest pairwise distance between bodies.
double min_pair_distance(const Vec& q, const MassSystem& sys);

}  // namespace nbs
