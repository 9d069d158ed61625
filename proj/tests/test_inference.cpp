#include <doctest.h>

#include <cmath>

#include "casefit/inference.hpp"
#include "casefit/rng.hpp"
#include "casefit/sampling.hpp"
#include "test_support.hpp"

using namespace casefit;

TEST_CASE("decompose splits exactly") {
  SUBCASE("perfect world gives three zero vectors") {
    Vector x = Vector::Constant(4, 2.5);
    Decomposition d = decompose(x, x, x, 1.0);
    CHECK(d.error.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.flaw.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.residual.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("additivity holds bit-exactly for arbitrary inputs") {
    CounterRng rng(0xdead, 0);
    for (int trial = 0; trial < 100; ++trial) {
      Vector a = rng.normal_vector(6), b = rng.normal_vector(6), c = rng.normal_vector(6);
      Decomposition d = decompose(a, b, c, 1.0);
      CHECK(d.error == d.flaw + d.residual);
      // definitional subtractions for the two observable pieces
      CHECK(d.residual == a - b);
      CHECK(d.flaw == b - c);
      // assembled error agrees with the direct subtraction to rounding
      CHECK((d.error - (a - c)).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.norm() + c.norm()));
    }
  }
  SUBCASE("mismatched shapes and bad variance are rejected") {
    CHECK_THROWS_AS(decompose(Vector::Zero(3), Vector::Zero(4), Vector::Zero(3), 1.0), ShapeError);
    CHECK_THROWS_AS(decompose(Vector::Zero(3), Vector::Zero(3), Vector::Zero(3), 0.0), DomainError);
  }
}

TEST_CASE("linear-model decomposition is Pythagorean") {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0, 77};
  const Vector x_star = evaluate(rv.model, rv.theta_star);
  for (std::uint64_t r = 0; r < 100; ++r) {
    Vector x_obs = sample_outcome(rv, r);
    Estimate est = fit_linear(*rv.model.linear_design, x_obs);
    Decomposition d = decompose(x_obs, est.x_hat, x_star, 1.0);
    CHECK(std::abs(d.error_norm2 - (d.flaw_norm2 + d.residual_norm2)) <= 1e-10 * d.error_norm2);
    CHECK(std::abs(d.flaw.dot(d.residual)) <= 1e-10 * d.error_norm2);
  }
}

TEST_CASE("flaw statistic normalization") {
  Decomposition d;
  d.flaw = Vector::Zero(3);
  d.residual = Vector::Constant(3, 1.0);
  d.flaw_norm2 = 0.0;
  d.residual_norm2 = 3.0;
  CHECK(flaw_statistic(d, 2, 10).value == 0.0);

  d.flaw_norm2 = 2.0;  // q
  d.residual_norm2 = 8.0;  // n - q
  FlawStatistic s = flaw_statistic(d, 2, 10);
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.raw_ratio == doctest::Approx(0.25).epsilon(1e-14));

  d.residual_norm2 = 0.0;
  CHECK_THROWS_AS(flaw_statistic(d, 2, 10), DegenerateError);
  d.residual_norm2 = 1.0;
  CHECK_THROWS_AS(flaw_statistic(d, 3, 3), DomainError);
}

TEST_CASE("the empirical flaw statistic follows the F law") {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0, 42};
  MonteCarloReport report = monte_carlo_study(rv, 20000, 0.05);
  // 95th percentile of the normalized statistic vs the F quantile
  const double expected = f_quantile(2, 8, 0.95);
  const double observed = report.f_stat_quantiles.back();
  CHECK(std::abs(observed - expected) <= 0.05 * expected);
}

TEST_CASE("flaw bound basics") {
  CHECK(flaw_bound(0.0, 2, 10, 0.05) == 0.0);
  const double b01 = flaw_bound(8.0, 2, 10, 0.01);
  const double b05 = flaw_bound(8.0, 2, 10, 0.05);
  const double b10 = flaw_bound(8.0, 2, 10, 0.10);
  CHECK(b01 > b05);
  CHECK(b05 > b10);
  CHECK_THROWS_AS(flaw_bound(1.0, 2, 2, 0.05), DomainError);
  CHECK_THROWS_AS(flaw_bound(1.0, 2, 10, 0.0), DomainError);
}

TEST_CASE("flaw bound covers at its stated level") {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0, 42};
  MonteCarloReport report = monte_carlo_study(rv, 20000, 0.05);
  CHECK(report.coverage >= 0.944);
  CHECK(report.coverage <= 0.956);
}

TEST_CASE("parameter region degenerates at a perfect fit") {
  Matrix u = default_design("linear").matrix;
  Vector truth{{1.0, 0.5}};
  Estimate est = fit_linear(u, u * truth);
  ModelFunction model = make_linear(default_design("linear"));
  TangentFrame frame = tangent_frame(model, est.theta_hat);
  ConfidenceRegion region = parameter_region(frame, est, 0.05);
  CHECK(region.radius2 <= 1e-18);
  CHECK(region.contains(est.theta_hat));
}

TEST_CASE("one-parameter region endpoints match the t-type interval") {
  Matrix u = default_design("proportional").matrix;
  CounterRng rng(0xabcd, 0);
  Vector x_obs = 2.0 * u.col(0) + 0.5 * rng.normal_vector(u.rows());
  Estimate est = fit_linear(u, x_obs);

  ModelFunction model = make_proportional(default_design("proportional"));
  TangentFrame frame = tangent_frame(model, est.theta_hat);
  ConfidenceRegion region = parameter_region(frame, est, 0.05);
  auto [lo, hi] = region.marginal_interval(0);

  const int n = static_cast<int>(u.rows());
  const double s2 = est.sse / (n - 1);
  const double t_crit = std::sqrt(f_quantile(1, n - 1, 0.95));  // F(1,k) = t(k)^2
  const double half = t_crit * std::sqrt(s2 / u.col(0).squaredNorm());
  CHECK(lo == doctest::Approx(est.theta_hat[0] - half).epsilon(1e-8));
  CHECK(hi == doctest::Approx(est.theta_hat[0] + half).epsilon(1e-8));
}

TEST_CASE("known-variance regions use the chi-square threshold") {
  Matrix u = default_design("linear").matrix;
  CounterRng rng(0xabcd, 1);
  Vector x_obs = u * Vector{{1.0, 0.5}} + rng.normal_vector(u.rows());
  Estimate est = fit_linear(u, x_obs);
  ModelFunction model = make_linear(default_design("linear"));
  TangentFrame frame = tangent_frame(model, est.theta_hat);
  ConfidenceRegion region = parameter_region(frame, est, 0.05, 1.0);
  CHECK(region.radius2 == doctest::Approx(chi2_quantile(2, 0.95)).epsilon(1e-12));
  CHECK(region.s2 == 1.0);
}

TEST_CASE("curvature diagnostic") {
  SUBCASE("linear models are flat") {
    ModelFunction model = make_linear(default_design("linear"));
    TangentFrame frame = tangent_frame(model, Parameter{1.0, 0.5});
    CHECK(curvature_diagnostic(model, frame) == 0.0);
  }
  SUBCASE("a nearly one-directional sine manifold is nearly flat") {
    Matrix u(3, 1);
    u << 1.0, 1.001, 1.002;
    ModelFunction model = make_sine(Design(u));
    TangentFrame frame = tangent_frame(model, Parameter{0.8});
    CHECK(curvature_diagnostic(model, frame) < 1e-2);
  }
  SUBCASE("invariant under rescaling the parameterization") {
    Matrix u(5, 1);
    u << 1, 2, 3, 4, 5;
    ModelFunction model = make_sine(Design(u), ParameterBox::wide(1));
    TangentFrame frame = tangent_frame(model, Parameter{0.5});
    const double base = curvature_diagnostic(model, frame);

    const double c = 3.0;
    ModelFunction scaled = model;
    scaled.evaluator = [&u, c](const Parameter& t) {
      return Vector((u * (c * t.values)).array().sin());
    };
    scaled.analytic_jacobian = [&u, c](const Parameter& t) {
      Vector cosines = (u * (c * t.values)).array().cos();
      return Matrix(c * (cosines.asDiagonal() * u));
    };
    scaled.analytic_second = [&u, c](const Parameter& t) {
      Vector sines = (u * (c * t.values)).array().sin();
      SecondDerivativeArray arr(1, u.rows(), 1);
      for (Index i = 0; i < u.rows(); ++i)
        arr.slice(i)(0, 0) = -c * c * u(i, 0) * u(i, 0) * sines(i);
      return arr;
    };
    TangentFrame scaled_frame = tangent_frame(scaled, Parameter{0.5 / c});
    const double rescaled = curvature_diagnostic(scaled, scaled_frame);
    CHECK(std::abs(rescaled - base) <= 1e-8 * (1.0 + base));
  }
}

TEST_CASE("rotated frame isolates residual and flaw blocks for linear models") {
  RandomVariableModel rv{make_linear(default_design("linear")), Parameter{1.0, 0.5}, 1.0, 99};
  const Vector x_star = evaluate(rv.model, rv.theta_star);
  TangentFrame frame = tangent_frame(rv.model, rv.theta_star);
  for (std::uint64_t r = 0; r < 200; ++r) {
    Vector x_obs = sample_outcome(rv, r);
    Estimate est = fit_linear(*rv.model.linear_design, x_obs);
    Decomposition d = decompose(x_obs, est.x_hat, x_star, 1.0);
    CHECK((frame.tangent_onb.transpose() * d.residual).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((frame.complement_onb.transpose() * d.flaw).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
