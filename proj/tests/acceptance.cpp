// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned in code next to the check it gates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "casefit/csv.hpp"
#include "casefit/distributions.hpp"
#include "casefit/estimate.hpp"
#include "casefit/inference.hpp"
#include "casefit/model.hpp"
#include "casefit/projection.hpp"
#include "casefit/rng.hpp"
#include "casefit/sampling.hpp"
#include "test_support.hpp"

using namespace casefit;

namespace {

constexpr std::uint64_t kStudySeed = 42;

struct Failures {
  std::vector<std::string> items;

  void require(bool ok, const std::string& what) {
    if (!ok) items.push_back(what);
  }
  template <typename T>
  void in_range(T value, T lo, T hi, const std::string& what) {
    if (!(value >= lo && value <= hi)) {
      std::ostringstream os;
      os << what << " = " << value << " outside [" << lo << ", " << hi << "]";
      items.push_back(os.str());
    }
  }
  template <typename T>
  void at_most(T value, T bound, const std::string& what) {
    if (!(value <= bound)) {
      std::ostringstream os;
      os << what << " = " << value << " above " << bound;
      items.push_back(os.str());
    }
  }
};

Matrix random_matrix(CounterRng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

const MonteCarloReport& linear_study() {
  static const MonteCarloReport report = [] {
    RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                           kStudySeed};
    return monte_carlo_study(rv, 20000, 0.05);
  }();
  return report;
}

// 1. scaled norm means and shapes against their chi-square laws
Failures criterion_chi2_decomposition() {
  Failures f;
  const auto start = std::chrono::steady_clock::now();
  const MonteCarloReport& report = linear_study();
  f.in_range(report.mean_error_norm2_scaled, 9.85, 10.15, "mean error norm2 / sigma2");
  f.in_range(report.mean_flaw_norm2_scaled, 1.92, 2.08, "mean flaw norm2 / sigma2");
  f.in_range(report.mean_residual_norm2_scaled, 7.85, 8.15, "mean residual norm2 / sigma2");
  f.at_most(report.ks_error, 0.015, "KS vs chi-square(10)");
  f.at_most(report.ks_flaw, 0.015, "KS vs chi-square(2)");
  f.at_most(report.ks_residual, 0.015, "KS vs chi-square(8)");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.at_most(seconds, 10.0, "study runtime (s)");
  return f;
}

// 2. the flaw bound covers at its stated level
Failures criterion_flaw_coverage() {
  Failures f;
  f.in_range(linear_study().coverage, 0.944, 0.956, "flaw bound coverage");
  return f;
}

// 3. tangent-plane parameter regions cover approximately for a low-curvature model
Failures criterion_nonlinear_region_coverage() {
  Failures f;
  const auto start = std::chrono::steady_clock::now();
  RandomVariableModel rv{make_sine(default_design("sine")), Parameter{0.5}, 0.01, kStudySeed};
  const std::uint64_t replicates = 5000;
  const Parameter start_theta{0.55};  // truth plus ten percent
  std::uint64_t covered = 0, used = 0;
  for (std::uint64_t r = 0; r < replicates; ++r) {
    Vector x_obs = sample_outcome(rv, r);
    Estimate est = fit_nonlinear(rv.model, x_obs, start_theta);
    if (!est.converged) continue;
    ++used;
    TangentFrame frame = tangent_frame(rv.model, est.theta_hat);
    ConfidenceRegion region = parameter_region(frame, est, 0.05);
    if (region.contains(rv.theta_star)) ++covered;
  }
  f.require(used >= replicates * 99 / 100, "too many non-converged replicates");
  const double coverage = static_cast<double>(covered) / static_cast<double>(used);
  f.in_range(coverage, 0.92, 0.97, "parameter region coverage");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.at_most(seconds, 60.0, "study runtime (s)");
  return f;
}

// 4. subspace projection: orthogonality, dense-formula agreement, Pythagoras
Failures criterion_projection_exactness() {
  Failures f;
  CounterRng rng(kStudySeed, 100);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 4 + trial % 5;
    const Index k = 1 + trial % 3;
    Matrix cols = random_matrix(rng, n, k);
    Vector point = random_matrix(rng, n, 1);
    auto basis = SubspaceBasis::from_columns(cols);
    if (basis.rank < k) continue;  // Gaussian columns: essentially never
    ProjectionResult res = project_subspace(basis, point);

    for (Index j = 0; j < k; ++j)
      f.at_most(std::abs((point - res.projection).dot(cols.col(j))) /
                    (point.norm() * cols.col(j).norm()),
                1e-10, "orthogonality residual");
    Vector dense = oracle::dense_projector(cols) * point;
    f.at_most((res.projection - dense).cwiseAbs().maxCoeff(), 1e-10, "dense-oracle gap");
    f.at_most(std::abs(point.squaredNorm() - res.projection.squaredNorm() -
                       (point - res.projection).squaredNorm()) /
                  point.squaredNorm(),
              1e-10, "Pythagoras defect");
    if (!f.items.empty()) break;
  }
  return f;
}

// 5. affine projection: minimality against a grid oracle plus orthogonality
Failures criterion_affine_projection() {
  Failures f;
  CounterRng rng(kStudySeed, 101);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 3 + trial % 3;
    AffineSubspace line;
    line.anchor = random_matrix(rng, n, 1);
    Matrix dir = random_matrix(rng, n, 1);
    line.directions = SubspaceBasis::from_columns(dir);
    Vector point = random_matrix(rng, n, 1);

    Vector p = project_affine(line, point);
    const double t_star = oracle::grid_argmin(
        [&](double t) { return (point - line.anchor - t * dir.col(0)).squaredNorm(); }, -30.0,
        30.0, 1e-8);
    f.at_most((p - (line.anchor + t_star * dir.col(0))).cwiseAbs().maxCoeff(), 1e-6,
              "gap to grid minimizer");
    f.at_most(std::abs((point - p).dot(dir.col(0))) / (point.norm() * dir.col(0).norm()), 1e-10,
              "affine orthogonality");
    if (!f.items.empty()) break;
  }
  return f;
}

// 6. fits agree with brute-force grid argmin on one- and two-parameter models
Failures criterion_fit_vs_grid() {
  Failures f;
  CounterRng rng(kStudySeed, 102);

  ModelFunction sine = make_sine(default_design("sine"));
  for (int inst = 0; inst < 20 && f.items.empty(); ++inst) {
    const double truth = 0.15 + 0.35 * rng.next_uniform();
    Vector x_obs = evaluate(sine, Parameter{truth}) + 0.01 * rng.normal_vector(sine.n());
    Estimate est = fit_nonlinear(sine, x_obs, Parameter{0.3});
    const double grid = oracle::grid_argmin(
        [&](double t) { return (evaluate(sine, Parameter{t}) - x_obs).squaredNorm(); }, 0.01,
        0.62, 1e-6);
    f.at_most(std::abs(est.theta_hat[0] - grid), 1e-5, "sine fit vs grid argmin");
  }

  ModelFunction decay = make_expdecay(default_design("expdecay"));
  for (int inst = 0; inst < 20 && f.items.empty(); ++inst) {
    Parameter truth{1.5 + rng.next_uniform(), 0.4 + 0.5 * rng.next_uniform()};
    Vector x_obs = evaluate(decay, truth) + 0.01 * rng.normal_vector(decay.n());
    Estimate est = fit_nonlinear(decay, x_obs, Parameter{1.0, 0.3});
    Vector grid = oracle::grid_argmin_2d(
        [&](const Vector& t) { return (evaluate(decay, Parameter(t)) - x_obs).squaredNorm(); },
        Vector{{0.5, 0.1}}, Vector{{3.5, 1.5}}, 1e-6);
    f.at_most((est.theta_hat.values - grid).cwiseAbs().maxCoeff(), 1e-5,
              "expdecay fit vs grid argmin");
  }
  return f;
}

// 7. analytic derivatives against the difference oracle; centered-model identity
Failures criterion_derivative_consistency() {
  Failures f;
  CounterRng rng(kStudySeed, 103);
  for (const auto& name : model_names()) {
    ModelFunction model = make_model(name, default_design(name));
    for (int trial = 0; trial < 100 && f.items.empty(); ++trial) {
      Vector lo = model.domain.lower.cwiseMax(Vector::Constant(model.q, -2.0));
      Vector hi = model.domain.upper.cwiseMin(Vector::Constant(model.q, 2.0));
      Vector theta(model.q);
      for (Index j = 0; j < model.q; ++j)
        theta(j) = lo(j) + (0.05 + 0.9 * rng.next_uniform()) * (hi(j) - lo(j));
      Matrix analytic = jacobian(model, Parameter(theta));
      Matrix numeric = oracle::fd_jacobian(
          [&model](const Vector& t) { return evaluate(model, Parameter(t)); }, theta);
      f.at_most(
          ((analytic - numeric).cwiseAbs().array() / (1.0 + numeric.cwiseAbs().array())).maxCoeff(),
          1e-6, "difference-oracle gap for " + name);
    }
  }

  ModelFunction sine = make_sine(default_design("sine"));
  Parameter center{0.4};
  ModelFunction centered = reparametrize(sine, center);
  f.at_most((jacobian(centered, Parameter{0.0}) - jacobian(sine, center)).cwiseAbs().maxCoeff(),
            1e-10, "centered-model Jacobian identity");
  return f;
}

// 8. quantiles: closed form plus million-draw Monte Carlo oracles
Failures criterion_quantiles() {
  Failures f;
  for (double x = 0.0; x <= 40.0; x += 0.5)
    f.at_most(std::abs(chi2_cdf(2, x) - (1.0 - std::exp(-0.5 * x))), 1e-8,
              "two-dof chi-square closed form");
  f.at_most(std::abs(chi2_quantile(2, 0.5) - 2.0 * std::log(2.0)), 1e-8,
            "two-dof chi-square median");

  const double chi2_mc = oracle::mc_quantile(
      [](std::mt19937_64& gen) { return oracle::chi2_draw(gen, 8); }, 1000000, 0.95, 2024);
  f.at_most(std::abs(chi2_quantile(8, 0.95) - chi2_mc), 0.02, "chi-square quantile vs oracle");

  const double f_mc = oracle::mc_quantile(
      [](std::mt19937_64& gen) {
        return (oracle::chi2_draw(gen, 2) / 2.0) / (oracle::chi2_draw(gen, 8) / 8.0);
      },
      1000000, 0.95, 4096);
  f.at_most(std::abs(f_quantile(2, 8, 0.95) - f_mc), 0.05, "F quantile vs oracle");
  return f;
}

// 9. realization coherence and byte-identical reruns
Failures criterion_outcome_map() {
  Failures f;
  RandomVariableModel rv{make_sine(default_design("sine")), Parameter{0.5}, 0.01, kStudySeed};
  for (std::uint64_t r : {0ull, 5ull, 17ull}) {
    Vector x_obs = realize(rv, XObsTag{}, r);
    Vector x_star = realize(rv, XStarTag{}, r);
    Vector x_hat = realize(rv, XHatTag{}, r);
    Vector eps = realize(rv, EpsilonTag{}, r);
    Vector residual = realize(rv, ResidualTag{}, r);
    Vector flaw = realize(rv, FlawTag{}, r);
    f.require(x_obs == sample_outcome(rv, r), "x_obs differs from the sampler");
    f.require(residual == x_obs - x_hat, "residual identity");
    f.require(flaw == x_hat - x_star, "flaw identity");
    f.require(eps == flaw + residual, "additive identity");
    f.require(realize(rv, XAtTag{rv.theta_star}, r) == x_star, "x_at identity");
    f.require(realize(rv, TangentTag{Vector::Zero(1)}, r) == x_hat, "tangent anchor");

    Vector eta1 = Vector::Constant(1, 0.3), eta2 = Vector::Constant(1, -1.1);
    const double a = 0.8, b = 0.5;
    Vector combined = realize(rv, TangentTag{a * eta1 + b * eta2}, r);
    Vector split = a * realize(rv, TangentTag{eta1}, r) + b * realize(rv, TangentTag{eta2}, r) +
                   (1.0 - a - b) * x_hat;
    f.at_most((combined - split).cwiseAbs().maxCoeff(), 1e-12, "tangent linearity");
  }

  // rerunning the study must produce byte-identical serialized records
  auto serialize = [](const MonteCarloReport& report) {
    std::string out;
    char buf[192];
    for (const auto& rec : report.per_replicate) {
      std::snprintf(buf, sizeof buf, "%llu %.17g %.17g %.17g %.17g %.17g\n",
                    static_cast<unsigned long long>(rec.index), rec.theta_hat.values(0), rec.sse,
                    rec.error_norm2, rec.flaw_norm2, rec.residual_norm2);
      out += buf;
    }
    return out;
  };
  RandomVariableModel lin{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                          kStudySeed};
  f.require(serialize(monte_carlo_study(lin, 300, 0.05)) ==
                serialize(monte_carlo_study(lin, 300, 0.05)),
            "study rerun not byte-identical");
  return f;
}

// 10. rotated-basis block structure for the linear model
Failures criterion_rotated_basis() {
  Failures f;
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0,
                         kStudySeed};
  const Vector x_star = evaluate(rv.model, rv.theta_star);
  TangentFrame frame = tangent_frame(rv.model, rv.theta_star);
  for (std::uint64_t r = 0; r < 1000 && f.items.empty(); ++r) {
    Vector x_obs = sample_outcome(rv, r);
    Estimate est = fit_linear(*rv.model.linear_design, x_obs);
    Decomposition d = decompose(x_obs, est.x_hat, x_star, 1.0);
    f.at_most((frame.tangent_onb.transpose() * d.residual).cwiseAbs().maxCoeff(), 1e-10,
              "residual component in the tangent block");
    f.at_most((frame.complement_onb.transpose() * d.flaw).cwiseAbs().maxCoeff(), 1e-10,
              "flaw component in the complement block");
  }
  return f;
}

struct Criterion {
  int id;
  const char* label;
  std::function<Failures()> body;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "chi-square decomposition of the scaled norms", criterion_chi2_decomposition},
      {2, "flaw bound coverage at the 95 percent level", criterion_flaw_coverage},
      {3, "nonlinear tangent-plane region coverage", criterion_nonlinear_region_coverage},
      {4, "subspace projection exactness", criterion_projection_exactness},
      {5, "affine projection minimality and orthogonality", criterion_affine_projection},
      {6, "fits match brute-force grid argmin", criterion_fit_vs_grid},
      {7, "derivative consistency", criterion_derivative_consistency},
      {8, "chi-square and F quantile correctness", criterion_quantiles},
      {9, "outcome-map coherence and reproducibility", criterion_outcome_map},
      {10, "rotated-basis block structure", criterion_rotated_basis},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    Failures f;
    try {
      f = criterion.body();
    } catch (const std::exception& e) {
      f.items.push_back(std::string("exception: ") + e.what());
    }
    if (f.items.empty()) {
      std::cout << "PASS  criterion " << criterion.id << ": " << criterion.label << "\n";
    } else {
      ++failed;
      std::cout << "FAIL  criterion " << criterion.id << ": " << criterion.label << "\n";
      for (const auto& item : f.items) std::cout << "      - " << item << "\n";
    }
  }
  if (failed) std::cout << failed << " criterion(s) failed\n";
  return failed == 0 ? 0 : 1;
}
