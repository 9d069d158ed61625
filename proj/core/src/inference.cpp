#include "casefit/inference.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "casefit/projection.hpp"
#include "casefit/rng.hpp"

namespace casefit {

Decomposition decompose(const Vector& x_obs, const Vector& x_hat, const Vector& x_star,
                        double sigma2) {
  if (x_obs.size() != x_hat.size() || x_obs.size() != x_star.size())
    throw ShapeError("decompose requires equal-length vectors");
  if (!(sigma2 > 0.0)) throw DomainError("decompose requires sigma2 > 0");

  Decomposition d;
  d.residual = x_obs - x_hat;
  d.flaw = x_hat - x_star;
  d.error = d.flaw + d.residual;
  d.error_norm2 = d.error.squaredNorm();
  d.flaw_norm2 = d.flaw.squaredNorm();
  d.residual_norm2 = d.residual.squaredNorm();
  d.sigma2 = sigma2;
  return d;
}

FlawStatistic flaw_statistic(const Decomposition& decomp, int q, int n) {
  if (!(n > q && q >= 1)) throw DomainError("flaw statistic requires n > q >= 1");
  if (decomp.residual_norm2 <= 0.0)
    throw DegenerateError("flaw statistic undefined for zero residual norm");
  FlawStatistic s;
  s.raw_ratio = decomp.flaw_norm2 / decomp.residual_norm2;
  s.value = (decomp.flaw_norm2 / q) / (decomp.residual_norm2 / (n - q));
  return s;
}

double flaw_bound(double residual_norm2, int q, int n, double alpha) {
  if (!(n > q && q >= 1)) throw DomainError("flaw bound requires n > q >= 1");
  if (residual_norm2 < 0.0) throw DomainError("flaw bound requires a nonnegative squared norm");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (residual_norm2 == 0.0) return 0.0;
  const double ratio = static_cast<double>(q) / (n - q);
  return std::sqrt(ratio * f_quantile(q, n - q, 1.0 - alpha) * residual_norm2);
}

bool ConfidenceRegion::contains(const Parameter& theta) const {
  Vector d = theta.values - center.values;
  return d.dot(shape_matrix * d) <= radius2;
}

std::pair<double, double> ConfidenceRegion::marginal_interval(Index j) const {
  // extreme of e_j^T theta over the ellipsoid: center_j +- sqrt(radius2 * (shape^-1)_jj)
  Matrix inv = generalized_inverse(shape_matrix);
  const double half = std::sqrt(std::max(0.0, radius2 * inv(j, j)));
  return {center[j] - half, center[j] + half};
}

ConfidenceRegion parameter_region(const TangentFrame& frame, const Estimate& estimate, double alpha,
                                  std::optional<double> known_sigma2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const int n = static_cast<int>(frame.jacobian.rows());
  const int q = static_cast<int>(frame.jacobian.cols());
  if (n <= q) throw DomainError("confidence region requires n > q");
  if (frame.rank < q) throw RankError("Jacobian cross-product is singular");

  ConfidenceRegion region;
  region.center = estimate.theta_hat;
  region.shape_matrix = frame.jacobian.transpose() * frame.jacobian;
  region.alpha = alpha;
  if (known_sigma2) {
    if (!(*known_sigma2 > 0.0)) throw DomainError("known variance must be positive");
    region.s2 = *known_sigma2;
    region.radius2 = *known_sigma2 * chi2_quantile(q, 1.0 - alpha);
  } else {
    region.s2 = estimate.sse / (n - q);
    region.radius2 = q * region.s2 * f_quantile(q, n - q, 1.0 - alpha);
  }
  return region;
}

double curvature_diagnostic(const ModelFunction& model, const TangentFrame& frame) {
  if (frame.rank < frame.jacobian.cols()) throw RankError("curvature needs a full-rank frame");
  const Index q = frame.jacobian.cols();
  SecondDerivativeArray second = second_derivative(model, frame.theta_hat);

  // deterministic direction grid on the unit sphere
  std::vector<Vector> directions;
  constexpr int kDirections = 100;
  if (q == 1) {
    directions.push_back(Vector::Constant(1, 1.0));
    directions.push_back(Vector::Constant(1, -1.0));
  } else if (q == 2) {
    for (int k = 0; k < kDirections; ++k) {
      const double angle = 2.0 * M_PI * k / kDirections;
      Vector d(2);
      d << std::cos(angle), std::sin(angle);
      directions.push_back(d);
    }
  } else {
    CounterRng rng(0xd17ec71055ull, static_cast<std::uint64_t>(q));
    for (int k = 0; k < kDirections; ++k) {
      Vector d = rng.normal_vector(q);
      const double norm = d.norm();
      if (norm > 0) directions.push_back(d / norm);
    }
  }

  const Matrix& tangent = frame.tangent_onb;
  double worst = 0.0;
  for (const Vector& d : directions) {
    // second directional derivative of the prediction along d, per case
    Vector accel(second.cases());
    for (Index i = 0; i < second.cases(); ++i) accel(i) = d.dot(second.slice(i) * d);
    Vector normal_part = accel - tangent * (tangent.transpose() * accel);
    const double speed2 = (frame.jacobian * d).squaredNorm();
    if (speed2 <= 0.0) continue;
    worst = std::max(worst, normal_part.norm() / speed2);
  }
  return worst;
}

}  // namespace casefit
