// Independent oracles used to freeze expected values: plain-loop finite
// differences, the dense normal-equations projector, grid-refinement argmin
// searches, and Monte Carlo quantiles from the standard library generator.
// None of these share code with the paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "casefit/types.hpp"

namespace oracle {

using casefit::Index;
using casefit::Matrix;
using casefit::Vector;

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& theta) {
  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  Vector base = f(theta);
  Matrix jac(base.size(), theta.size());
  for (Index j = 0; j < theta.size(); ++j) {
    const double h = cbrt_eps * (1.0 + std::abs(theta(j)));
    Vector lo = theta, hi = theta;
    lo(j) -= h;
    hi(j) += h;
    jac.col(j) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return jac;
}

// dense projector U (U^T U)^{-1} U^T, the textbook formula; only for
// well-conditioned full-rank bases
inline Matrix dense_projector(const Matrix& u) {
  return u * (u.transpose() * u).inverse() * u.transpose();
}

// bracketed grid refinement of a 1-d function: shrink around the best cell
// until the cell width drops below `resolution`
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi,
                          double resolution) {
  double best = lo;
  while ((hi - lo) / 200.0 > resolution / 2.0) {
    double best_val = std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / 200.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = lo + i * step;
      const double v = f(t);
      if (v < best_val) {
        best_val = v;
        best = t;
      }
    }
    lo = best - 2.0 * step;
    hi = best + 2.0 * step;
  }
  double best_val = std::numeric_limits<double>::infinity();
  const double step = resolution / 2.0;
  for (double t = lo; t <= hi; t += step) {
    const double v = f(t);
    if (v < best_val) {
      best_val = v;
      best = t;
    }
  }
  return best;
}

// coarse-to-fine 2-d grid argmin, refining the winning cell each pass
inline Vector grid_argmin_2d(const std::function<double(const Vector&)>& f, Vector lo, Vector hi,
                             double resolution) {
  Vector best = lo;
  const int cells = 60;
  while (std::max(hi(0) - lo(0), hi(1) - lo(1)) / cells > resolution / 2.0) {
    double best_val = std::numeric_limits<double>::infinity();
    const double step0 = (hi(0) - lo(0)) / cells;
    const double step1 = (hi(1) - lo(1)) / cells;
    for (int i = 0; i <= cells; ++i)
      for (int j = 0; j <= cells; ++j) {
        Vector t(2);
        t << lo(0) + i * step0, lo(1) + j * step1;
        const double v = f(t);
        if (v < best_val) {
          best_val = v;
          best = t;
        }
      }
    Vector margin(2);
    margin << 2.0 * step0, 2.0 * step1;
    lo = best - margin;
    hi = best + margin;
  }
  return best;
}

// empirical p-quantile of R draws of `draw`, seeded independently of the
// library's generator
template <typename Draw>
double mc_quantile(Draw draw, std::size_t count, double p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> samples(count);
  for (auto& s : samples) s = draw(gen);
  std::sort(samples.begin(), samples.end());
  return samples[static_cast<std::size_t>(p * (count - 1))];
}

inline double chi2_draw(std::mt19937_64& gen, int dof) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double s = 0.0;
  for (int i = 0; i < dof; ++i) {
    const double z = normal(gen);
    s += z * z;
  }
  return s;
}

}  // namespace oracle
