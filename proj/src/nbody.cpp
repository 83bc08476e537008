#include "nbscatter/nbody.hpp"

#include <cmath>
#include <limits>

namespace nbs {

MassSystem::MassSystem(std::vector<double> masses, int d)
    : masses_(std::move(masses)), d_(d), total_(0.0) {
  if (masses_.size() < 2) throw DimensionError("need at least two bodies");
  if (d_ < 2) throw DimensionError("spatial dimension must be at least 2");
  for (double m : masses_) {
    if (!(m > 0.0)) throw InvalidState("masses must be strictly positive");
    total_ += m;
  }
}

void MassSystem::check_size(const Vec& v, const char* what) const {
  if (v.size() != nd())
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(nd()) + ", got " +
                         std::to_string(v.size()));
}

double MassSystem::inner(const Vec& v, const Vec& w) const {
  check_size(v, "inner");
  check_size(w, "inner");
  double acc = 0.0;
  for (int i = 0; i < n(); ++i)
    acc += mass(i) * body(v, i).dot(body(w, i));
  return acc;
}

Vec MassSystem::apply_mass(const Vec& v) const {
  check_size(v, "apply_mass");
  Vec out(v.size());
  for (int i = 0; i < n(); ++i)
    out.segment(i * d_, d_) = mass(i) * body(v, i);
  return out;
}

Vec MassSystem::apply_mass_inverse(const Vec& v) const {
  check_size(v, "apply_mass_inverse");
  Vec out(v.size());
  for (int i = 0; i < n(); ++i)
    out.segment(i * d_, d_) = body(v, i) / mass(i);
  return out;
}

Vec MassSystem::project_zero_momentum(const Vec& v) const {
  check_size(v, "project_zero_momentum");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d_);
  for (int i = 0; i < n(); ++i) mean += mass(i) * body(v, i);
  mean /= total_;
  Vec out(v.size());
  for (int i = 0; i < n(); ++i) out.segment(i * d_, d_) = body(v, i) - mean;
  return out;
}

double MassSystem::momentum_defect(const Vec& v) const {
  check_size(v, "momentum_defect");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d_);
  for (int i = 0; i < n(); ++i) sum += mass(i) * body(v, i);
  return sum.norm();
}

double min_pair_distance(const Vec& q, const MassSystem& sys) {
  sys.check_size(q, "min_pair_distance");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sys.n(); ++i)
    for (int j = i + 1; j < sys.n(); ++j) {
      double r = (sys.body(q, i) - sys.body(q, j)).norm();
      if (r < best) best = r;
    }
  return best;
}

namespace {
void check_collision(const Vec& q, const MassSystem& sys, double tol) {
  if (min_pair_distance(q, sys) <= tol)
    throw CollisionError("pairwise distance below collision tolerance");
}
}  // namespace

double potential(const Vec& q, const MassSystem& sys, double collision_tol) {
  sys.check_size(q, "potential");
  check_collision(q, sys, collision_tol);
  double u = 0.0;
  for (int i = 0; i < sys.n(); ++i)
    for (int j = i + 1; j < sys.n(); ++j)
      u += sys.mass(i) * sys.mass(j) / (sys.body(q, i) - sys.body(q, j)).norm();
  return u;
}

Vec grad_potential(const Vec& q, const MassSystem& sys, double collision_tol) {
  sys.check_size(q, "grad_potential");
  check_collision(q, sys, collision_tol);
  Vec g = Vec::Zero(q.size());
  const int d = sys.d();
  for (int i = 0; i < sys.n(); ++i)
    for (int j = i + 1; j < sys.n(); ++j) {
      Eigen::VectorXd diff = sys.body(q, j) - sys.body(q, i);
      double r3 = std::pow(diff.norm(), 3);
      g.segment(i * d, d) += sys.mass(j) * diff / r3;
      g.segment(j * d, d) -= sys.mass(i) * diff / r3;
    }
  return g;
}

Vec tangential_grad(const Vec& s, const MassSystem& sys, double collision_tol) {
  double u = potential(s, sys, collision_tol);
  return grad_potential(s, sys, collision_tol) + u * s;
}

double energy(const Vec& q, const Vec& xi, const MassSystem& sys) {
  return 0.5 * sys.inner(xi, xi) - potential(q, sys);
}

Mat hessian_blocks(const Vec& xi, const MassSystem& sys, double collision_tol) {
  sys.check_size(xi, "hessian_blocks");
  check_collision(xi, sys, collision_tol);
  const int d = sys.d();
  Mat H = Mat::Zero(sys.nd(), sys.nd());
  for (int i = 0; i < sys.n(); ++i)
    for (int j = 0; j < sys.n(); ++j) {
      if (i == j) continue;
      Eigen::VectorXd diff = sys.body(xi, j) - sys.body(xi, i);
      double r = diff.norm();
      Eigen::VectorXd u = diff / r;
      Mat block = (sys.mass(j) / (r * r * r)) *
                  (Mat::Identity(d, d) - 3.0 * u * u.transpose());
      H.block(i * d, j * d, d, d) = block;
      H.block(i * d, i * d, d, d) -= block;
    }
  return H;
}

}  // namespace nbs
