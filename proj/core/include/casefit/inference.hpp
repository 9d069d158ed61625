#pragma once

#include <optional>

#include "casefit/distributions.hpp"
#include "casefit/estimate.hpp"
#include "casefit/model.hpp"
#include "casefit/types.hpp"

namespace casefit {

/// Error / flaw / residual split of one observation against a known truth.
/// residual = x_obs - x_hat and flaw = x_hat - x_star are the defining
/// subtractions; error is assembled as flaw + residual so that additivity
/// holds bit-exactly (it agrees with x_obs - x_star to rounding).
struct Decomposition {
  Vector error;     // deviation of the observation from the true state
  Vector residual;  // observable deviation from the fitted prediction
  Vector flaw;      // unobservable deviation of the fit from the true state

  double error_norm2 = 0.0;
  double flaw_norm2 = 0.0;
  double residual_norm2 = 0.0;
  double sigma2 = 0.0;  // noise variance used for scaling
};

Decomposition decompose(const Vector& x_obs, const Vector& x_hat, const Vector& x_star,
                        double sigma2);

/// Normalized flaw-to-residual ratio; `value` follows the F distribution
/// with (q, n-q) degrees under the linear-Gaussian hypotheses. The raw,
/// unnormalized ratio is carried alongside.
struct FlawStatistic {
  double value = 0.0;      // (flaw_norm2 / q) / (residual_norm2 / (n - q))
  double raw_ratio = 0.0;  // flaw_norm2 / residual_norm2
};

FlawStatistic flaw_statistic(const Decomposition& decomp, int q, int n);

/// (1-alpha) upper bound on the flaw norm inferred from the residual:
/// B = sqrt( q/(n-q) * F_quantile(q, n-q, 1-alpha) * residual_norm2 ).
double flaw_bound(double residual_norm2, int q, int n, double alpha);

/// Ellipsoid { theta : (theta - center)^T shape (theta - center) <= radius2 }.
struct ConfidenceRegion {
  Parameter center;
  Matrix shape_matrix;  // J^T J
  double radius2 = 0.0;
  double alpha = 0.0;
  double s2 = 0.0;  // variance estimate sse / (n - q), or the known variance

  bool contains(const Parameter& theta) const;
  /// Extreme of coordinate j over the ellipsoid, as [lo, hi].
  std::pair<double, double> marginal_interval(Index j) const;
};

/// Linearization confidence region: radius2 = q * s^2 * F_quantile(q, n-q, 1-alpha)
/// with s^2 = sse/(n-q). Exact for linear models, first-order for nonlinear
/// ones. Passing a known variance switches to the chi-square threshold
/// radius2 = sigma2 * chi2_quantile(q, 1-alpha).
ConfidenceRegion parameter_region(const TangentFrame& frame, const Estimate& estimate, double alpha,
                                  std::optional<double> known_sigma2 = std::nullopt);

/// Scale-free normal curvature of the prediction surface at the frame:
/// max over sampled unit directions d of ||(I - P_T)(d^T xdd d)|| / ||J d||^2.
/// Zero for linear models; large values invalidate tangent-plane regions.
double curvature_diagnostic(const ModelFunction& model, const TangentFrame& frame);

}  // namespace casefit
