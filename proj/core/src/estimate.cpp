#include "casefit/estimate.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace casefit {

namespace {

bool lexicographically_less(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

// Solve the damped least-squares subproblem min || [J; sqrt(lambda) I] d - [e; 0] ||
// by QR of the stacked system.
Vector damped_step(const Matrix& jac, const Vector& residual, double lambda) {
  const Index n = jac.rows(), q = jac.cols();
  Matrix stacked(n + q, q);
  stacked.topRows(n) = jac;
  stacked.bottomRows(q) = std::sqrt(lambda) * Matrix::Identity(q, q);
  Vector rhs = Vector::Zero(n + q);
  rhs.head(n) = residual;
  return stacked.householderQr().solve(rhs);
}

Estimate single_fit(const ModelFunction& model, const Vector& x_obs, const Parameter& theta0,
                    const FitOptions& opts) {
  Estimate est;
  est.underdetermined_warning = model.n() < model.q;

  Vector theta = theta0.values;
  Vector x = evaluate(model, Parameter(theta));
  Vector residual = x_obs - x;
  double sse = residual.squaredNorm();
  est.sse_trace.push_back(sse);

  const double grad_scale = 1.0 + x_obs.norm();
  double lambda = opts.damping_init;
  int iter = 0;
  est.termination = "max_iterations";

  for (; iter < opts.max_iterations; ++iter) {
    Matrix jac = jacobian(model, Parameter(theta));
    if (jac.norm() == 0.0) throw RankError("Jacobian vanished during fit of '" + model.name + "'");
    est.rank_warning =
        est.rank_warning || SubspaceBasis::from_columns(jac).rank < std::min(model.n(), model.q);

    const double grad_norm = (jac.transpose() * residual).norm();
    if (grad_norm <= opts.gradient_tolerance * grad_scale) {
      est.termination = "gradient";
      est.converged = true;
      break;
    }

    // Try steps with increasing damping until one reduces the objective;
    // iterates are clipped into the admissible box first.
    bool accepted = false;
    Vector theta_new, x_new;
    double sse_new = 0.0, step_norm = 0.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Vector delta = damped_step(jac, residual, lambda);
      theta_new = model.domain.clip(theta + delta);
      step_norm = (theta_new - theta).norm();
      x_new = evaluate(model, Parameter(theta_new));
      sse_new = (x_obs - x_new).squaredNorm();
      if (sse_new < sse && step_norm > 0.0) {
        accepted = true;
        lambda = std::max(lambda / opts.damping_factor, 1e-12);
        break;
      }
      lambda *= opts.damping_factor;
      if (lambda > 1e14) break;
    }

    if (!accepted) {
      // no descent direction left at any damping: either we are at the
      // optimum (caught by the gradient test next round) or stuck
      est.termination = "stalled";
      break;
    }

    theta = theta_new;
    x = x_new;
    residual = x_obs - x;
    sse = sse_new;
    est.sse_trace.push_back(sse);

    if (step_norm <= opts.step_tolerance * (1.0 + theta.norm())) {
      est.termination = "step";
      est.converged = true;
      ++iter;
      break;
    }
  }

  // a stall at first-order optimality still counts as convergence
  if (!est.converged) {
    Matrix jac = jacobian(model, Parameter(theta));
    if ((jac.transpose() * residual).norm() <= opts.gradient_tolerance * grad_scale) {
      est.termination = "gradient";
      est.converged = true;
    }
  }

  est.theta_hat = Parameter(theta);
  est.x_hat = x;
  est.residual = residual;
  est.sse = sse;
  est.iterations = iter;
  return est;
}

}  // namespace

Estimate fit_linear(const Matrix& design_columns, const Vector& x_obs) {
  if (design_columns.rows() != x_obs.size())
    throw ShapeError("design rows do not match observation length");
  if (!x_obs.allFinite()) throw ShapeError("observations must be finite");

  SubspaceBasis basis = SubspaceBasis::from_columns(design_columns);
  ProjectionResult proj = project_subspace(basis, x_obs);

  Estimate est;
  est.theta_hat = Parameter(proj.coefficients);
  est.x_hat = proj.projection;
  est.residual = x_obs - proj.projection;
  est.sse = est.residual.squaredNorm();
  est.converged = true;
  est.iterations = 0;
  est.termination = "projection";
  est.rank_warning = proj.rank_deficient;
  est.underdetermined_warning = design_columns.rows() < design_columns.cols();
  return est;
}

Estimate fit_nonlinear(const ModelFunction& model, const Vector& x_obs, const Parameter& theta0,
                       const FitOptions& opts) {
  if (x_obs.size() != model.n()) throw ShapeError("observation length does not match model cases");
  if (!x_obs.allFinite()) throw ShapeError("observations must be finite");
  if (!model.domain.contains(theta0))
    throw DomainError("starting point outside the admissible box");

  std::vector<Parameter> starts = opts.multistart;
  if (starts.empty()) starts.push_back(theta0);

  Estimate best;
  bool have_best = false;
  std::vector<Basin> basins;
  for (const Parameter& start : starts) {
    if (!model.domain.contains(start))
      throw DomainError("multistart point outside the admissible box");
    Estimate e = single_fit(model, x_obs, start, opts);
    basins.push_back(Basin{e.theta_hat, e.sse, e.converged});
    const bool better =
        !have_best || e.sse < best.sse ||
        (e.sse == best.sse && lexicographically_less(e.theta_hat.values, best.theta_hat.values));
    if (better) {
      best = std::move(e);
      have_best = true;
    }
  }

  // flag ties in objective that sit at distinct parameters
  for (std::size_t i = 0; i < basins.size(); ++i)
    for (std::size_t j = i + 1; j < basins.size(); ++j)
      if (std::abs(basins[i].sse - basins[j].sse) <= 1e-8 &&
          (basins[i].theta_hat.values - basins[j].theta_hat.values).norm() > 1e-4)
        best.non_isolated_minimum = true;

  best.basins = std::move(basins);
  return best;
}

ModelFunction reparametrize(const ModelFunction& model, const Parameter& theta_hat) {
  if (!model.domain.contains(theta_hat))
    throw DomainError("center point outside the admissible box");
  const Vector center = theta_hat.values;
  const Vector x_hat = evaluate(model, theta_hat);

  ModelFunction centered;
  centered.name = model.name + "_centered";
  centered.design = model.design;
  centered.q = model.q;
  centered.domain = model.domain.shifted(center);

  auto base_eval = model.evaluator;
  centered.evaluator = [base_eval, center, x_hat](const Parameter& zeta) {
    return Vector(base_eval(Parameter(Vector(zeta.values + center))) - x_hat);
  };
  if (model.analytic_jacobian) {
    auto base_jac = model.analytic_jacobian;
    centered.analytic_jacobian = [base_jac, center](const Parameter& zeta) {
      return base_jac(Parameter(Vector(zeta.values + center)));
    };
  }
  if (model.analytic_second) {
    auto base_second = model.analytic_second;
    centered.analytic_second = [base_second, center](const Parameter& zeta) {
      return base_second(Parameter(Vector(zeta.values + center)));
    };
  }
  if (model.linear_design) centered.linear_design = model.linear_design;
  return centered;
}

TangentFrame tangent_frame(const ModelFunction& model, const Parameter& theta_hat) {
  TangentFrame frame;
  frame.theta_hat = theta_hat;
  frame.x_hat = evaluate(model, theta_hat);
  frame.jacobian = jacobian(model, theta_hat);

  SubspaceBasis basis = SubspaceBasis::from_columns(frame.jacobian);
  frame.rank = basis.rank;
  SplitBasis split = split_basis(basis);  // RankError when deficient
  frame.tangent_onb = split.tangent_onb;
  frame.complement_onb = split.complement_onb;
  return frame;
}

TangentProjection tangent_project(const TangentFrame& frame, const Vector& x_obs) {
  if (x_obs.size() != frame.x_hat.size())
    throw ShapeError("observation length does not match frame dimension");
  SubspaceBasis basis = SubspaceBasis::from_columns(frame.jacobian);
  if (basis.rank < 1) throw RankError("tangent frame has rank zero");
  ProjectionResult onto_directions = project_subspace(basis, x_obs - frame.x_hat);
  TangentProjection out;
  out.projection = frame.x_hat + onto_directions.projection;
  out.eta = onto_directions.coefficients;
  return out;
}

}  // namespace casefit
