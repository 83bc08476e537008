#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct CollisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All tolerances in one injectable bundle. Defaults are the values the
// acceptance suite is calibrated against.
struct ToleranceSet {
  double rel = 1e-11;          // integrator relative tolerance
  double abs = 1e-12;          // integrator absolute tolerance
  double energy = 1e-9;        // admissible energy drift along a trajectory
  double rho_eq = 1e-9;        // rho threshold for equilibrium detection
  double w_eq = 1e-8;          // |w| threshold for equilibrium detection
  double v_eq = 1e-8;          // |v -+ sqrt(2h)| threshold
  double collision = 1e-8;     // pairwise distance below this is a collision
  double constraint = 1e-10;   // |s|^2-1 and <s,w> drift bound
  double seed_scale = 1e-3;    // max(rho1, |s1|) bound for manifold seeds
  double quadrature = 1e-10;   // absolute tolerance for great-circle integrals
  double svd_gap = 1e-8;       // relative singular-value threshold for ranks

  ToleranceSet scaled(double factor) const {
    ToleranceSet t = *this;
    t.rel *= factor;
    t.abs *= factor;
    t.energy *= factor;
    t.rho_eq *= factor;
    t.w_eq *= factor;
    t.v_eq *= factor;
    return t;
  }
};

// Masses plus spatial dimension; owns the mass metric. Configurations are
// flat vectors of length n*d, body-major.
class MassSystem {
 public:
  MassSystem(std::vector<double> masses, int d);

  int n() const { return static_cast<int>(masses_.size()); }
  int d() const { return d_; }
  int nd() const { return n() * d_; }
  double mass(int i) const { return masses_[static_cast<size_t>(i)]; }
  const std::vector<double>& masses() const { return masses_; }
  double total_mass() const { return total_; }

  Eigen::VectorBlock<const Vec> body(const Vec& q, int i) const {
    return q.segment(i * d_, d_);
  }

  // mass inner product <v, Mw>
  double inner(const Vec& v, const Vec& w) const;
  double norm(const Vec& v) const { return std::sqrt(inner(v, v)); }

  // multiply by M / M^{-1} (diagonal per body)
  Vec apply_mass(const Vec& v) const;
  Vec apply_mass_inverse(const Vec& v) const;

  // remove the mass-weighted mean (projection onto zero-momentum subspace)
  Vec project_zero_momentum(const Vec& v) const;
  double momentum_defect(const Vec& v) const;

  void check_size(const Vec& v, const char* what) const;

 private:
  std::vector<double> masses_;
  int d_;
  double total_;
};

}  // namespace nbs
