#pragma once

#include <string>
#include <vector>

#include "casefit/model.hpp"
#include "casefit/projection.hpp"
#include "casefit/types.hpp"

namespace casefit {

struct FitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  double step_tolerance = 1e-12;
  double damping_init = 1e-3;
  double damping_factor = 10.0;
  /// Extra starting points; when non-empty these replace the single start
  /// and the best basin wins (ties broken by lexicographically smaller
  /// parameter).
  std::vector<Parameter> multistart;
};

/// One local minimum reached from one starting point.
struct Basin {
  Parameter theta_hat;
  double sse = 0.0;
  bool converged = false;
};

struct Estimate {
  Parameter theta_hat;
  Vector x_hat;
  Vector residual;  // x_obs - x_hat
  double sse = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string termination;  // "projection", "gradient", "step", "max_iterations", "stalled"

  bool rank_warning = false;          // design or Jacobian rank deficient
  bool underdetermined_warning = false;  // fewer cases than parameters
  std::vector<double> sse_trace;      // sse at each accepted iterate

  std::vector<Basin> basins;          // one per start when multistarting
  bool non_isolated_minimum = false;  // two basins tie in sse but differ in theta
};

/// Local linearization at the estimate: Jacobian plus the rotated frame
/// whose first block spans the Jacobian columns.
struct TangentFrame {
  Parameter theta_hat;
  Vector x_hat;
  Matrix jacobian;        // n x q
  Matrix tangent_onb;     // n x q
  Matrix complement_onb;  // n x (n-q)
  Index rank = 0;
};

/// Exact least squares for predictions linear in theta: the estimate is the
/// orthogonal projection of the observation onto the design column span.
Estimate fit_linear(const Matrix& design_columns, const Vector& x_obs);

/// Damped Gauss-Newton descent on ||x(theta) - x_obs||^2. Convergence is the
/// first-order orthogonality test ||J^T e|| <= tol * (1 + ||x_obs||); an
/// iteration cap returns the best iterate with converged = false.
Estimate fit_nonlinear(const ModelFunction& model, const Vector& x_obs, const Parameter& theta0,
                       const FitOptions& opts = {});

/// Centered model y(zeta) = x(zeta + theta_hat) - x(theta_hat); y(0) = 0 and
/// the Jacobian at 0 equals the original Jacobian at theta_hat.
ModelFunction reparametrize(const ModelFunction& model, const Parameter& theta_hat);

TangentFrame tangent_frame(const ModelFunction& model, const Parameter& theta_hat);

struct TangentProjection {
  Vector projection;  // onto the affine tangent space x_hat + span(J)
  Vector eta;         // coefficients in the Jacobian basis
};

TangentProjection tangent_project(const TangentFrame& frame, const Vector& x_obs);

}  // namespace casefit
