#include "casefit/validate.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "casefit/distributions.hpp"
#include "casefit/estimate.hpp"
#include "casefit/inference.hpp"
#include "casefit/model.hpp"
#include "casefit/projection.hpp"
#include "casefit/rng.hpp"
#include "casefit/sampling.hpp"
#include "casefit/types.hpp"

namespace casefit {

namespace {

struct Harness {
  ValidationOptions options;
  std::vector<CheckResult>* out;

  void run(const std::string& name, const std::function<std::string()>& body) {
    CheckResult r;
    r.name = name;
    try {
      r.detail = body();  // empty detail means pass
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    out->push_back(std::move(r));
  }
};

std::string fail(const std::string& msg, double value) {
  std::ostringstream os;
  os << msg << " (got " << value << ")";
  return os.str();
}

// Independent central-difference oracle, deliberately separate from the
// production difference path.
Matrix fd_oracle(const std::function<Vector(const Vector&)>& f, const Vector& theta) {
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

// interior sampling window: inside the declared box, clipped to moderate
// magnitudes so exp-type models stay finite
Vector sample_theta(const ModelFunction& model, CounterRng& rng) {
  Vector lo = model.domain.lower.cwiseMax(Vector::Constant(model.q, -2.0));
  Vector hi = model.domain.upper.cwiseMin(Vector::Constant(model.q, 2.0));
  Vector t(model.q);
  for (Index j = 0; j < model.q; ++j) t(j) = 0.05 + 0.9 * rng.next_uniform();
  return lo + t.cwiseProduct(hi - lo);
}

std::vector<ModelFunction> registry_models() {
  std::vector<ModelFunction> models;
  for (const auto& name : model_names()) models.push_back(make_model(name, default_design(name)));
  return models;
}

// -- model checks -----------------------------------------------------------

std::string check_fd_agreement(const ValidationOptions& options) {
  CounterRng rng(options.seed, 1);
  for (const ModelFunction& model : registry_models()) {
    for (int trial = 0; trial < 100; ++trial) {
      Parameter theta(sample_theta(model, rng));
      Matrix analytic = jacobian(model, theta);
      if (options.sabotage == "jacobian") analytic(0, 0) = -analytic(0, 0);
      auto f = [&model](const Vector& t) { return evaluate(model, Parameter(t)); };
      Matrix numeric = fd_oracle(f, theta.values);
      const double err =
          ((analytic - numeric).cwiseAbs().array() / (1.0 + numeric.cwiseAbs().array()))
              .maxCoeff();
      if (err > 1e-6)
        return "analytic vs difference-oracle Jacobian mismatch for '" + model.name + "': " +
               fail("relative error above 1e-6", err);
    }
  }
  return {};
}

std::string check_linear_jacobian_constant(const ValidationOptions&) {
  ModelFunction model = make_linear(default_design("linear"));
  Matrix j1 = jacobian(model, Parameter{0.0, 0.0});
  Matrix j2 = jacobian(model, Parameter{3.5, -2.0});
  if (j1 != j2) return "linear Jacobian varies with theta";
  return {};
}

std::string check_second_symmetry(const ValidationOptions& options) {
  CounterRng rng(options.seed, 2);
  for (const ModelFunction& model : registry_models()) {
    for (int trial = 0; trial < 20; ++trial) {
      Parameter theta(sample_theta(model, rng));
      SecondDerivativeArray arr = second_derivative(model, theta);
      for (Index i = 0; i < arr.cases(); ++i) {
        const double asym = (arr.slice(i) - arr.slice(i).transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-8) return fail("Hessian slice asymmetry above 1e-8 for " + model.name, asym);
      }
    }
  }
  return {};
}

std::string check_slice_identity(const ValidationOptions& options) {
  CounterRng rng(options.seed, 3);
  SliceArray arr(2, 3, 4);
  for (Index i = 0; i < 3; ++i)
    for (Index a = 0; a < 2; ++a)
      for (Index b = 0; b < 4; ++b) arr.at(a, i, b) = rng.next_normal();
  SliceArray out = slice_multiply(Matrix::Identity(2, 2), arr, Matrix::Identity(4, 4));
  for (Index i = 0; i < 3; ++i)
    if (out.slice(i) != arr.slice(i)) return "identity factors changed the array";
  return {};
}

std::string check_component_rule(const ValidationOptions& options) {
  // row i of the Jacobian must equal the gradient of the scalar map
  // theta -> x_i(theta), differenced independently
  CounterRng rng(options.seed, 4);
  for (const ModelFunction& model : registry_models()) {
    Parameter theta(sample_theta(model, rng));
    Matrix jac = jacobian(model, theta);
    for (Index i = 0; i < model.n(); ++i) {
      auto scalar = [&model, i](const Vector& t) {
        return Vector::Constant(1, evaluate(model, Parameter(t))(i));
      };
      Matrix grad = fd_oracle(scalar, theta.values);  // 1 x q
      const double err = ((jac.row(i) - grad.row(0)).cwiseAbs().array() /
                          (1.0 + grad.row(0).cwiseAbs().array()))
                             .maxCoeff();
      if (err > 1e-6)
        return fail("Jacobian row differs from scalar gradient for " + model.name, err);
    }
  }
  return {};
}

// -- projection checks --------------------------------------------------------

Matrix random_matrix(CounterRng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

std::string check_projection_idempotence(const ValidationOptions& options) {
  CounterRng rng(options.seed, 5);
  for (int trial = 0; trial < 200; ++trial) {
    auto basis = SubspaceBasis::from_columns(random_matrix(rng, 6, 2));
    Vector x = random_matrix(rng, 6, 1);
    Vector once = project_subspace(basis, x).projection;
    Vector twice = project_subspace(basis, once).projection;
    if ((twice - once).norm() > 1e-12 * (1.0 + once.norm()))
      return fail("projector not idempotent", (twice - once).norm());
  }
  return {};
}

std::string check_projection_contraction(const ValidationOptions& options) {
  CounterRng rng(options.seed, 6);
  for (int trial = 0; trial < 200; ++trial) {
    auto basis = SubspaceBasis::from_columns(random_matrix(rng, 5, 2));
    Vector x = random_matrix(rng, 5, 1);
    const double pn = project_subspace(basis, x).projection.norm();
    if (pn > x.norm() + 1e-12) return fail("projection grew the norm", pn - x.norm());
  }
  return {};
}

std::string check_projection_self_adjoint(const ValidationOptions& options) {
  CounterRng rng(options.seed, 7);
  for (int trial = 0; trial < 200; ++trial) {
    auto basis = SubspaceBasis::from_columns(random_matrix(rng, 5, 2));
    Vector x = random_matrix(rng, 5, 1);
    Vector y = random_matrix(rng, 5, 1);
    const double lhs = project_subspace(basis, x).projection.dot(y);
    const double rhs = x.dot(project_subspace(basis, y).projection);
    if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs)))
      return fail("projector not self-adjoint", std::abs(lhs - rhs));
  }
  return {};
}

std::string check_projection_pythagoras(const ValidationOptions& options) {
  CounterRng rng(options.seed, 8);
  for (int trial = 0; trial < 200; ++trial) {
    auto basis = SubspaceBasis::from_columns(random_matrix(rng, 7, 3));
    Vector x = random_matrix(rng, 7, 1);
    Vector p = project_subspace(basis, x).projection;
    const double lhs = x.squaredNorm();
    const double rhs = p.squaredNorm() + (x - p).squaredNorm();
    if (std::abs(lhs - rhs) > 1e-10 * (1.0 + lhs))
      return fail("Pythagoras identity violated", std::abs(lhs - rhs));
  }
  return {};
}

std::string check_affine_reduction(const ValidationOptions& options) {
  CounterRng rng(options.seed, 9);
  for (int trial = 0; trial < 200; ++trial) {
    AffineSubspace space{random_matrix(rng, 5, 1),
                         SubspaceBasis::from_columns(random_matrix(rng, 5, 2))};
    Vector x = random_matrix(rng, 5, 1);
    // same code path: the affine result is literally anchor + translated projection
    Vector via_affine = project_affine(space, x);
    Vector via_subspace =
        space.anchor + project_subspace(space.directions, x - space.anchor).projection;
    if (via_affine != via_subspace) return "affine projection differs from translated projection";
  }
  return {};
}

// -- estimate checks ----------------------------------------------------------

std::string check_residual_orthogonality(const ValidationOptions& options) {
  CounterRng rng(options.seed, 10);
  Matrix design = default_design("linear").matrix;
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = random_matrix(rng, design.rows(), 1);
    Estimate est = fit_linear(design, x);
    for (Index j = 0; j < design.cols(); ++j) {
      const double ip = std::abs(est.residual.dot(design.col(j)));
      if (ip > 1e-10 * x.norm() * design.col(j).norm())
        return fail("residual not orthogonal to design column", ip);
    }
  }
  return {};
}

std::string check_global_minimum(const ValidationOptions& options) {
  CounterRng rng(options.seed, 11);
  Matrix design = default_design("linear").matrix;
  Vector x = random_matrix(rng, design.rows(), 1);
  Estimate est = fit_linear(design, x);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector theta = est.theta_hat.values + random_matrix(rng, design.cols(), 1);
    const double loss = (design * theta - x).squaredNorm();
    if (loss < est.sse - 1e-12) return fail("found a point below the projection loss", loss);
  }
  return {};
}

std::string check_monotone_sse(const ValidationOptions& options) {
  CounterRng rng(options.seed, 12);
  ModelFunction model = make_expdecay(default_design("expdecay"));
  for (int trial = 0; trial < 20; ++trial) {
    Vector truth = evaluate(model, Parameter{2.0, 0.7});
    Vector x_obs = truth + 0.05 * random_matrix(rng, truth.size(), 1);
    Estimate est = fit_nonlinear(model, x_obs, Parameter{1.0, 0.2});
    for (std::size_t i = 1; i < est.sse_trace.size(); ++i)
      if (est.sse_trace[i] > est.sse_trace[i - 1])
        return fail("accepted step increased the objective", est.sse_trace[i]);
  }
  return {};
}

std::string check_reparametrization_commutes(const ValidationOptions&) {
  ModelFunction model = make_sine(default_design("sine"));
  Parameter center{0.3};
  ModelFunction centered = reparametrize(model, center);
  for (double zeta = -0.25; zeta <= 0.3; zeta += 0.05) {
    Vector lhs = evaluate(centered, Parameter{zeta});
    Vector rhs = evaluate(model, Parameter{zeta + 0.3}) - evaluate(model, center);
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-12)
      return fail("centered model differs from shifted difference", (lhs - rhs).norm());
  }
  return {};
}

std::string check_tangent_idempotent(const ValidationOptions& options) {
  CounterRng rng(options.seed, 13);
  ModelFunction model = make_sine(default_design("sine"));
  TangentFrame frame = tangent_frame(model, Parameter{0.5});
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = random_matrix(rng, model.n(), 1);
    Vector once = tangent_project(frame, x).projection;
    Vector twice = tangent_project(frame, once).projection;
    if ((twice - once).norm() > 1e-12 * (1.0 + once.norm()))
      return fail("tangent projection not idempotent", (twice - once).norm());
  }
  return {};
}

// -- inference checks ---------------------------------------------------------

std::string check_additivity(const ValidationOptions& options) {
  CounterRng rng(options.seed, 14);
  for (int trial = 0; trial < 200; ++trial) {
    Vector a = random_matrix(rng, 6, 1), b = random_matrix(rng, 6, 1),
           c = random_matrix(rng, 6, 1);
    Decomposition d = decompose(a, b, c, 1.0);
    if (d.error != d.flaw + d.residual) return "error != flaw + residual";
  }
  return {};
}

std::string check_linear_orthogonality(const ValidationOptions& options) {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                         options.seed};
  const Vector x_star = evaluate(rv.model, rv.theta_star);
  for (std::uint64_t r = 0; r < 1000; ++r) {
    Vector x_obs = sample_outcome(rv, r);
    Estimate est = fit_linear(*rv.model.linear_design, x_obs);
    Decomposition d = decompose(x_obs, est.x_hat, x_star, 1.0);
    const double ip = std::abs(d.flaw.dot(d.residual));
    if (ip > 1e-10 * d.flaw.norm() * d.residual.norm())
      return fail("flaw not orthogonal to residual", ip);
  }
  return {};
}

std::string check_chi2_closed_form(const ValidationOptions&) {
  for (double x = 0.0; x <= 40.0; x += 0.25) {
    const double closed = 1.0 - std::exp(-0.5 * x);
    if (std::abs(chi2_cdf(2, x) - closed) > 1e-12)
      return fail("two-dof chi-square cdf differs from closed form at x", x);
  }
  const double median = chi2_quantile(2, 0.5);
  if (std::abs(median - 2.0 * std::log(2.0)) > 1e-8)
    return fail("two-dof chi-square median off", median);
  return {};
}

std::string check_f_quantile_roundtrip(const ValidationOptions&) {
  for (int d1 : {1, 2, 5, 10})
    for (int d2 : {2, 4, 8, 20})
      for (double p : {0.05, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99}) {
        const double x = f_quantile(d1, d2, p);
        if (std::abs(f_cdf(d1, d2, x) - p) > 1e-8)
          return fail("f_cdf(f_quantile(p)) != p", f_cdf(d1, d2, x) - p);
        if (std::abs(chi2_cdf(d1, chi2_quantile(d1, p)) - p) > 1e-8)
          return fail("chi2 roundtrip failed", p);
      }
  return {};
}

std::string check_flaw_bound_coverage(const ValidationOptions& options) {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                         options.seed};
  MonteCarloReport report = monte_carlo_study(rv, 20000, 0.05);
  if (report.coverage < 0.944 || report.coverage > 0.956)
    return fail("flaw bound coverage outside [0.944, 0.956]", report.coverage);
  return {};
}

std::string check_rotated_frame(const ValidationOptions& options) {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                         options.seed};
  const Vector x_star = evaluate(rv.model, rv.theta_star);
  TangentFrame frame = tangent_frame(rv.model, rv.theta_star);
  for (std::uint64_t r = 0; r < 1000; ++r) {
    Vector x_obs = sample_outcome(rv, r);
    Estimate est = fit_linear(*rv.model.linear_design, x_obs);
    Decomposition d = decompose(x_obs, est.x_hat, x_star, 1.0);
    const double resid_in_tangent = (frame.tangent_onb.transpose() * d.residual).cwiseAbs().maxCoeff();
    const double flaw_in_complement =
        (frame.complement_onb.transpose() * d.flaw).cwiseAbs().maxCoeff();
    if (resid_in_tangent > 1e-10)
      return fail("residual leaks into the tangent block", resid_in_tangent);
    if (flaw_in_complement > 1e-10)
      return fail("flaw leaks into the complement block", flaw_in_complement);
  }
  return {};
}

// -- sampling checks ----------------------------------------------------------

std::string check_determinism(const ValidationOptions& options) {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                         options.seed};
  for (std::uint64_t r : {0ull, 7ull, 123ull}) {
    if (sample_outcome(rv, r) != sample_outcome(rv, r)) return "sample_outcome not reproducible";
  }
  MonteCarloReport a = monte_carlo_study(rv, 200, 0.05);
  MonteCarloReport b = monte_carlo_study(rv, 200, 0.05);
  if (a.mean_error_norm2_scaled != b.mean_error_norm2_scaled || a.coverage != b.coverage ||
      a.ks_residual != b.ks_residual)
    return "study rerun differs";
  return {};
}

std::string check_coherence(const ValidationOptions& options) {
  RandomVariableModel rv{make_sine(default_design("sine")), Parameter{0.5}, 0.01, options.seed};
  for (std::uint64_t r : {0ull, 3ull}) {
    Vector x_obs = realize(rv, XObsTag{}, r);
    Vector x_star = realize(rv, XStarTag{}, r);
    Vector x_hat = realize(rv, XHatTag{}, r);
    Vector eps = realize(rv, EpsilonTag{}, r);
    Vector res = realize(rv, ResidualTag{}, r);
    Vector flaw = realize(rv, FlawTag{}, r);
    if (x_obs != sample_outcome(rv, r)) return "x_obs differs from the sampler";
    if (res != x_obs - x_hat) return "residual identity broken";
    if (flaw != x_hat - x_star) return "flaw identity broken";
    if (eps != flaw + res) return "additive decomposition broken";
    if (x_star != realize(rv, XAtTag{rv.theta_star}, r)) return "x_at(theta_star) mismatch";
    Vector anchor = realize(rv, TangentTag{Vector::Zero(1)}, r);
    if (anchor != x_hat) return "tangent anchor differs from x_hat";
  }
  return {};
}

std::string check_replicate_streams(const ValidationOptions& options) {
  // consecutive replicate streams should look unrelated: lag-1 correlation
  // of first draws within four standard errors of zero, all draws distinct
  const int count = 4000;
  std::vector<double> first(count);
  for (int r = 0; r < count; ++r) {
    CounterRng rng(options.seed, static_cast<std::uint64_t>(r));
    first[static_cast<std::size_t>(r)] = rng.next_normal();
  }
  double mean = 0.0;
  for (double v : first) mean += v;
  mean /= count;
  double cov = 0.0, var = 0.0;
  for (int r = 0; r + 1 < count; ++r) {
    cov += (first[r] - mean) * (first[r + 1] - mean);
    var += (first[r] - mean) * (first[r] - mean);
  }
  var += (first[count - 1] - mean) * (first[count - 1] - mean);
  const double corr = cov / var;
  if (std::abs(corr) > 4.0 / std::sqrt(static_cast<double>(count)))
    return fail("adjacent replicate streams correlate", corr);
  for (int r = 1; r < count; ++r)
    if (first[r] == first[r - 1]) return "adjacent streams repeated a draw";
  return {};
}

std::string check_empirical_orthogonality(const ValidationOptions& options) {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                         options.seed};
  const std::uint64_t reps = 20000;
  TangentFrame frame = tangent_frame(rv.model, rv.theta_star);
  Vector eta(2);
  eta << 0.7, -0.2;
  const Vector direction = frame.jacobian * eta;
  double mean = 0.0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    Vector x_obs = sample_outcome(rv, r);
    Estimate est = fit_linear(*rv.model.linear_design, x_obs);
    mean += (x_obs - est.x_hat).dot(direction);
  }
  mean /= static_cast<double>(reps) * rv.sigma * direction.norm();
  if (std::abs(mean) > 4.0 / std::sqrt(static_cast<double>(reps)))
    return fail("residual correlates with a tangent direction", mean);
  return {};
}

struct NamedCheck {
  const char* name;
  std::string (*body)(const ValidationOptions&);
};

const NamedCheck kChecks[] = {
    {"model.fd_agreement", check_fd_agreement},
    {"model.linear_jacobian_constant", check_linear_jacobian_constant},
    {"model.second_symmetry", check_second_symmetry},
    {"model.slice_identity", check_slice_identity},
    {"model.component_rule", check_component_rule},
    {"projection.idempotence", check_projection_idempotence},
    {"projection.contraction", check_projection_contraction},
    {"projection.self_adjoint", check_projection_self_adjoint},
    {"projection.pythagoras", check_projection_pythagoras},
    {"projection.affine_reduction", check_affine_reduction},
    {"estimate.residual_orthogonality", check_residual_orthogonality},
    {"estimate.global_minimum", check_global_minimum},
    {"estimate.monotone_sse", check_monotone_sse},
    {"estimate.reparametrization_commutes", check_reparametrization_commutes},
    {"estimate.tangent_idempotent", check_tangent_idempotent},
    {"inference.additivity", check_additivity},
    {"inference.linear_orthogonality", check_linear_orthogonality},
    {"inference.chi2_closed_form", check_chi2_closed_form},
    {"inference.f_quantile_roundtrip", check_f_quantile_roundtrip},
    {"inference.flaw_bound_coverage", check_flaw_bound_coverage},
    {"inference.rotated_frame", check_rotated_frame},
    {"sampling.determinism", check_determinism},
    {"sampling.coherence", check_coherence},
    {"sampling.replicate_streams", check_replicate_streams},
    {"sampling.empirical_orthogonality", check_empirical_orthogonality},
};

}  // namespace

std::vector<std::string> validation_check_names() {
  std::vector<std::string> names;
  for (const auto& check : kChecks) names.emplace_back(check.name);
  return names;
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report;
  Harness harness{options, &report.checks};
  for (const auto& check : kChecks)
    harness.run(check.name, [&]() { return check.body(options); });
  report.all_passed = true;
  for (const auto& r : report.checks) report.all_passed = report.all_passed && r.passed;
  return report;
}

}  // namespace casefit
