#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "nbscatter/types.hpp"

namespace nbs::testing {

// three unit masses on a circle of radius 1/sqrt(3): unit mass norm, side 1
inline Vec equilateral_s0(const MassSystem& sys) {
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

inline Vec random_config(std::mt19937& rng, const MassSystem& sys,
                         double min_dist = 0.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Vec q(sys.nd());
    for (int k = 0; k < q.size(); ++k) q[k] = gauss(rng);
    q = sys.project_zero_momentum(q);
    double closest = 1e300;
    for (int i = 0; i < sys.n(); ++i)
      for (int j = i + 1; j < sys.n(); ++j)
        closest = std::min(closest, (sys.body(q, i) - sys.body(q, j)).norm());
    if (closest > min_dist) return q;
  }
}

inline Vec random_shape(std::mt19937& rng, const MassSystem& sys,
                        double min_dist = 0.2) {
  Vec s = random_config(rng, sys, 0.0);
  s /= sys.norm(s);
  for (;;) {
    double closest = 1e300;
    for (int i = 0; i < sys.n(); ++i)
      for (int j = i + 1; j < sys.n(); ++j)
        closest = std::min(closest, (sys.body(s, i) - sys.body(s, j)).norm());
    if (closest > min_dist) return s;
    s = random_config(rng, sys, 0.0);
    s /= sys.norm(s);
  }
}

}  // namespace nbs::testing
