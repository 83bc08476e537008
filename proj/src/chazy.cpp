#include "nbscatter/chazy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbscatter/nbody.hpp"

namespace nbs {

ChazyParameters chazy_from_manifold(const ManifoldParams& mp,
                                    const MassSystem& sys) {
  if (!(mp.rho1 > 0.0))
    throw InvalidState(
        "chazy_from_manifold: rho1 = 0 (orbit at infinity, C undefined)");
  double v0 = mp.eq.v0;
  ChazyParameters cp;
  cp.direction = v0 > 0 ? Direction::Future : Direction::Past;
  cp.A = v0 * mp.eq.s0;
  Vec gA = grad_potential(cp.A, sys);
  cp.B = cp.direction == Direction::Future ? Vec(-gA) : gA;
  Vec tg = tangential_grad(mp.eq.s0, sys);
  cp.C = mp.s1 / mp.rho1 -
         (std::log(mp.rho1 * std::abs(v0)) / (v0 * v0)) * tg;
  cp.C -= (sys.inner(cp.A, cp.C) / sys.inner(cp.A, cp.A)) * cp.A;
  return cp;
}

namespace {

// Columns u^k (tau - tau_c)^j, j <= k, k = 1..3, optionally with the
// constant column prepended. The triangular degree bound is exactly the
// structure of the invariant-manifold expansion in (u, tau u).
Mat tail_design(const std::vector<double>& us, const std::vector<double>& dts,
                bool with_intercept) {
  const int K = static_cast<int>(us.size());
  int cols = (with_intercept ? 1 : 0) + 2 + 3 + 4;
  // columns: [1,] u, u t, u^2, u^2 t, u^2 t^2, u^3, u^3 t, u^3 t^2, u^3 t^3
  Mat X(K, cols);
  for (int r = 0; r < K; ++r) {
    int c = 0;
    double u = us[static_cast<size_t>(r)];
    double t = dts[static_cast<size_t>(r)];
    if (with_intercept) X(r, c++) = 1.0;
    X(r, c++) = u;
    X(r, c++) = u * t;
    double u2 = u * u;
    X(r, c++) = u2;
    X(r, c++) = u2 * t;
    X(r, c++) = u2 * t * t;
    double u3 = u2 * u;
    X(r, c++) = u3;
    X(r, c++) = u3 * t;
    X(r, c++) = u3 * t * t;
    X(r, c++) = u3 * t * t * t;
  }
  return X;
}

Mat solve_scaled(const Mat& X, const Mat& rhs) {
  Vec scale(X.cols());
  Mat Xs = X;
  for (int c = 0; c < X.cols(); ++c) {
    double nrm = X.col(c).norm();
    scale[c] = nrm > 0 ? nrm : 1.0;
    Xs.col(c) /= scale[c];
  }
  Mat coef = Xs.colPivHouseholderQr().solve(rhs);
  for (int c = 0; c < X.cols(); ++c) coef.row(c) /= scale[c];
  return coef;
}

}  // namespace

ExtractionDetail extract_manifold_detail(const Trajectory& traj,
                                         const EquilibriumPoint& eq,
                                         const MassSystem& sys) {
  const int nd = sys.nd();
  const double v0 = eq.v0;
  const auto& smp = traj.samples;
  if (smp.size() < 16)
    throw InvalidState("extract_manifold_params: too few samples");

  auto deviation = [&](const TrajectorySample& p) {
    return p.state.rho + sys.norm(p.state.s - eq.s0);
  };

  // Tail window selected by deviation amplitude: large enough that the
  // signal dominates accumulated integration error (which scales like the
  // reciprocal of the amplitude when divided through by u), small enough
  // that the truncated model bias is negligible.
  double lo = 3e-6, hi = 3e-4;
  std::vector<int> idx;
  auto collect = [&](double l, double h) {
    idx.clear();
    int end = static_cast<int>(smp.size()) - 1;
    // walk back over the converged tail, keep the contiguous run in [l, h]
    int i = end;
    while (i >= 0 && deviation(smp[static_cast<size_t>(i)]) < l) --i;
    for (; i >= 0; --i) {
      double dev = deviation(smp[static_cast<size_t>(i)]);
      if (dev > h) break;
      if (dev >= l) idx.push_back(i);
    }
    std::reverse(idx.begin(), idx.end());
  };
  collect(lo, hi);
  if (idx.size() < 30) collect(1e-7, 3e-3);
  if (idx.size() < 12)
    throw InvalidState(
        "extract_manifold_params: trajectory not converged deeply enough");

  const double tau_c =
      0.5 * (smp[static_cast<size_t>(idx.front())].tau +
             smp[static_cast<size_t>(idx.back())].tau);
  std::vector<double> us, dts;
  us.reserve(idx.size());
  dts.reserve(idx.size());
  for (int i : idx) {
    double dtau = smp[static_cast<size_t>(i)].tau - tau_c;
    us.push_back(std::exp(-v0 * dtau));
    dts.push_back(dtau);
  }
  const int K = static_cast<int>(idx.size());

  // rho fit (no intercept): leading coefficients give rho1, rho2.
  Mat Xr = tail_design(us, dts, false);
  Mat rr(K, 1);
  for (int r = 0; r < K; ++r)
    rr(r, 0) = smp[static_cast<size_t>(idx[static_cast<size_t>(r)])].state.rho;
  Mat cr = solve_scaled(Xr, rr);
  double shift = std::exp(v0 * tau_c);
  double rho1 = cr(0, 0) * shift;
  double rho2 = cr(2, 0) * shift * shift;
  if (rho1 < 0.0 && rho1 > -1e-12) rho1 = 0.0;

  // s fit (with intercept): intercept is s0, the u column carries s1 mixed
  // with the secular tangential-gradient term.
  Mat Xs = tail_design(us, dts, true);
  Mat rs(K, nd);
  for (int r = 0; r < K; ++r)
    rs.row(r) =
        smp[static_cast<size_t>(idx[static_cast<size_t>(r)])].state.s.transpose();
  Mat cs = solve_scaled(Xs, rs);

  Vec s0 = cs.row(0).transpose();
  s0 /= sys.norm(s0);
  Vec tg = tangential_grad(s0, sys);
  Vec s1 = cs.row(1).transpose() * shift + (rho1 * tau_c / v0) * tg;
  s1 -= sys.inner(s0, s1) * s0;
  s1 = sys.project_zero_momentum(s1);

  ExtractionDetail out;
  out.mp.eq.s0 = s0;
  out.mp.eq.v0 = v0;
  out.mp.s1 = s1;
  out.mp.rho1 = rho1;
  out.rho2 = rho2;
  out.window_samples = K;
  out.window_umax = deviation(smp[static_cast<size_t>(idx.front())]);
  return out;
}

ManifoldParams extract_manifold_params(const Trajectory& traj,
                                       const EquilibriumPoint& eq,
                                       const MassSystem& sys) {
  return extract_manifold_detail(traj, eq, sys).mp;
}

SeriesPrediction series_predict(const ManifoldParams& mp, double tau,
                                int order, const MassSystem& sys) {
  if (order != 1 && order != 2)
    throw InvalidState("series_predict: order must be 1 or 2");
  const double v0 = mp.eq.v0;
  const double u = std::exp(-v0 * tau);
  const double u0 = potential(mp.eq.s0, sys);
  const double rho2 = (mp.rho1 / v0) * (mp.rho1 / v0) * u0;
  SeriesPrediction p;
  p.rho = mp.rho1 * u + (order >= 2 ? rho2 * u * u : 0.0);
  Vec tg = tangential_grad(mp.eq.s0, sys);
  p.s = mp.eq.s0 + u * mp.s1 - (mp.rho1 / v0) * u * tau * tg;
  p.v = v0 + (order >= 2 ? (u0 * mp.rho1 / v0) * u : 0.0);
  if (mp.rho1 > 0.0) {
    p.r = std::exp(v0 * tau) / mp.rho1 - (order >= 2 ? u0 / (v0 * v0) : 0.0);
    p.q = p.s / p.rho;
  } else {
    p.r = std::numeric_limits<double>::infinity();
    p.q = Vec();
  }
  return p;
}

double t_from_tau(const ManifoldParams& mp, double tau, const MassSystem& sys) {
  if (!(mp.rho1 > 0.0))
    throw InvalidState("t_from_tau: rho1 must be positive");
  const double v0 = mp.eq.v0;
  const double u0 = potential(mp.eq.s0, sys);
  return std::exp(v0 * tau) / (mp.rho1 * v0) - (u0 / (v0 * v0)) * tau;
}

double tau_from_t(const ManifoldParams& mp, double t, const MassSystem& sys) {
  if (!(mp.rho1 > 0.0))
    throw InvalidState("tau_from_t: rho1 must be positive");
  const double v0 = mp.eq.v0;
  if (!(t * v0 > 0.0))
    throw InvalidState("tau_from_t: t has the wrong sign for this branch");
  const double u0 = potential(mp.eq.s0, sys);
  double tau = std::log(std::abs(t) * mp.rho1 * std::abs(v0)) / v0;
  for (int it = 0; it < 8; ++it) {
    double f = std::exp(v0 * tau) / (mp.rho1 * v0) - (u0 / (v0 * v0)) * tau - t;
    double df = std::exp(v0 * tau) / mp.rho1 - u0 / (v0 * v0);
    tau -= f / df;
  }
  return tau;
}

ChazyParameters fit_chazy_cartesian(
    const std::vector<std::pair<double, Vec>>& samples, const MassSystem& sys) {
  const int K = static_cast<int>(samples.size());
  if (K < 4) throw InvalidState("fit_chazy_cartesian: too few samples");
  const int nd = sys.nd();
  double sign = samples.front().first > 0 ? 1.0 : -1.0;
  for (const auto& [t, q] : samples)
    if (!(t * sign > 0.0))
      throw InvalidState("fit_chazy_cartesian: t must have one sign");

  Mat X(K, 3);
  Mat rhs(K, nd);
  for (int r = 0; r < K; ++r) {
    double t = samples[static_cast<size_t>(r)].first;
    X(r, 0) = t;
    X(r, 1) = std::log(std::abs(t));
    X(r, 2) = 1.0;
    rhs.row(r) = samples[static_cast<size_t>(r)].second.transpose();
  }
  // Condition check on the column-scaled design: a too-short window makes
  // log|t| indistinguishable from the constant.
  Mat Xs = X;
  for (int c = 0; c < 3; ++c) Xs.col(c) /= Xs.col(c).norm();
  Eigen::JacobiSVD<Mat> svd(Xs);
  double cond = svd.singularValues()(0) / svd.singularValues()(2);
  if (!(cond < 1e8))
    throw InvalidState("fit_chazy_cartesian: ill-conditioned window");

  Mat coef = solve_scaled(X, rhs);
  ChazyParameters cp;
  cp.A = coef.row(0).transpose();
  cp.B = coef.row(1).transpose();
  cp.C = coef.row(2).transpose();
  cp.direction = sign > 0 ? Direction::Future : Direction::Past;
  cp.C -= (sys.inner(cp.A, cp.C) / sys.inner(cp.A, cp.A)) * cp.A;
  return cp;
}

ManifoldParams time_reverse_params(const ManifoldParams& mp) {
  ManifoldParams out = mp;
  out.eq.v0 = -mp.eq.v0;
  return out;
}

}  // namespace nbs
