#include "casefit/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "casefit/distributions.hpp"

namespace casefit {

namespace {

Parameter perturbed_start(const RandomVariableModel& rv) {
  // start near truth: the study probes the local geometry, not global search
  Vector start = rv.theta_star.values + 0.1 * rv.theta_star.values.cwiseAbs();
  return Parameter(rv.model.domain.clip(start));
}

Estimate fit_replicate(const RandomVariableModel& rv, const Vector& x_obs,
                       const FitOptions& opts) {
  if (rv.model.linear_design) return fit_linear(*rv.model.linear_design, x_obs);
  return fit_nonlinear(rv.model, x_obs, perturbed_start(rv), opts);
}

}  // namespace

Vector sample_outcome(const RandomVariableModel& rv, std::uint64_t replicate) {
  if (rv.sigma < 0.0) throw DomainError("noise standard deviation must be nonnegative");
  const Vector x_star = evaluate(rv.model, rv.theta_star);
  CounterRng rng(rv.seed, replicate);
  return x_star + rv.sigma * rng.normal_vector(x_star.size());
}

RandomVariableTag parse_variable_tag(const std::string& name) {
  if (name == "x_star") return XStarTag{};
  if (name == "epsilon") return EpsilonTag{};
  if (name == "x_obs") return XObsTag{};
  if (name == "x_hat") return XHatTag{};
  if (name == "residual") return ResidualTag{};
  if (name == "flaw") return FlawTag{};
  throw UnknownVariable("unknown random variable '" + name + "'");
}

Vector realize(const RandomVariableModel& rv, const RandomVariableTag& variable,
               std::uint64_t replicate, const FitOptions& opts) {
  struct Visitor {
    const RandomVariableModel& rv;
    std::uint64_t replicate;
    const FitOptions& opts;

    Vector x_obs() const { return sample_outcome(rv, replicate); }
    Vector x_hat() const { return fit_replicate(rv, x_obs(), opts).x_hat; }

    Vector operator()(const XStarTag&) const { return evaluate(rv.model, rv.theta_star); }
    Vector operator()(const XObsTag&) const { return x_obs(); }
    Vector operator()(const XHatTag&) const { return x_hat(); }
    Vector operator()(const ResidualTag&) const { return x_obs() - x_hat(); }
    Vector operator()(const FlawTag&) const {
      return x_hat() - evaluate(rv.model, rv.theta_star);
    }
    Vector operator()(const EpsilonTag&) const {
      // flaw + residual: the additive split is the constructive identity
      Vector hat = x_hat();
      Vector flaw = hat - evaluate(rv.model, rv.theta_star);
      Vector residual = x_obs() - hat;
      return flaw + residual;
    }
    Vector operator()(const XAtTag& tag) const { return evaluate(rv.model, tag.theta); }
    Vector operator()(const TangentTag& tag) const {
      Estimate est = fit_replicate(rv, x_obs(), opts);
      Matrix jac = jacobian(rv.model, est.theta_hat);
      if (tag.eta.size() != jac.cols())
        throw ShapeError("tangent coefficient length does not match parameter count");
      return est.x_hat + jac * tag.eta;
    }
  };
  return std::visit(Visitor{rv, replicate, opts}, variable);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptyInput("KS statistic needs at least one sample");
  for (double s : samples)
    if (!std::isfinite(s)) throw EmptyInput("KS statistic requires finite samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (i + 1) / n - f);
    d = std::max(d, f - i / n);
  }
  return d;
}

MonteCarloReport monte_carlo_study(const RandomVariableModel& rv, std::uint64_t replicates,
                                   double alpha, const FitOptions& opts) {
  const int n = static_cast<int>(rv.model.n());
  const int q = static_cast<int>(rv.model.q);
  if (replicates < 100) throw DomainError("a study needs at least 100 replicates");
  if (!(n > q)) throw DomainError("a study requires n > q");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (rv.sigma < 0.0) throw DomainError("noise standard deviation must be nonnegative");

  MonteCarloReport report;
  report.replicates = replicates;
  report.alpha = alpha;
  report.degenerate = rv.sigma == 0.0;
  report.per_replicate.reserve(replicates);

  const Vector x_star = evaluate(rv.model, rv.theta_star);
  const double sigma2 = rv.sigma > 0.0 ? rv.sigma * rv.sigma : 1.0;

  std::vector<double> err_scaled, flaw_scaled, resid_scaled, f_stats;
  err_scaled.reserve(replicates);
  flaw_scaled.reserve(replicates);
  resid_scaled.reserve(replicates);
  f_stats.reserve(replicates);

  std::uint64_t covered_count = 0, used = 0;
  for (std::uint64_t r = 0; r < replicates; ++r) {
    CounterRng rng(rv.seed, r);
    Vector x_obs = x_star + rv.sigma * rng.normal_vector(x_star.size());
    Estimate est = fit_replicate(rv, x_obs, opts);

    ReplicateRecord rec;
    rec.index = r;
    rec.theta_hat = est.theta_hat;
    rec.sse = est.sse;
    rec.converged = est.converged;

    Decomposition d = decompose(x_obs, est.x_hat, x_star, sigma2);
    rec.error_norm2 = d.error_norm2;
    rec.flaw_norm2 = d.flaw_norm2;
    rec.residual_norm2 = d.residual_norm2;
    rec.f_stat = d.residual_norm2 > 0.0 ? flaw_statistic(d, q, n).value : 0.0;
    rec.covered = std::sqrt(d.flaw_norm2) <= flaw_bound(d.residual_norm2, q, n, alpha);

    if (est.converged) {
      ++used;
      err_scaled.push_back(d.error_norm2 / sigma2);
      flaw_scaled.push_back(d.flaw_norm2 / sigma2);
      resid_scaled.push_back(d.residual_norm2 / sigma2);
      f_stats.push_back(rec.f_stat);
      if (rec.covered) ++covered_count;
    } else {
      ++report.nonconverged;
    }
    report.per_replicate.push_back(std::move(rec));
  }

  report.valid = report.nonconverged * 100 <= replicates;  // at most 1% excluded

  if (used > 0) {
    auto mean = [used](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(used);
    };
    report.mean_error_norm2_scaled = mean(err_scaled);
    report.mean_flaw_norm2_scaled = mean(flaw_scaled);
    report.mean_residual_norm2_scaled = mean(resid_scaled);
    report.coverage = static_cast<double>(covered_count) / static_cast<double>(used);

    if (!report.degenerate) {
      report.ks_error = ks_statistic(err_scaled, [n](double x) { return chi2_cdf(n, x); });
      report.ks_flaw = ks_statistic(flaw_scaled, [q](double x) { return chi2_cdf(q, x); });
      report.ks_residual =
          ks_statistic(resid_scaled, [n, q](double x) { return chi2_cdf(n - q, x); });

      report.quantile_probs = {0.05, 0.25, 0.5, 0.75, 0.95};
      std::vector<double> sorted = f_stats;
      std::sort(sorted.begin(), sorted.end());
      for (double p : report.quantile_probs) {
        const auto idx = static_cast<std::size_t>(p * (sorted.size() - 1));
        report.f_stat_quantiles.push_back(sorted[idx]);
      }
    }
  }

  // pass/fail flags: means within 5 standard errors of the chi-square
  // targets, KS within 1.5x the asymptotic 5% critical value, coverage
  // within 3 binomial standard errors
  const double r_eff = static_cast<double>(std::max<std::uint64_t>(used, 1));
  auto push_check = [&report](const std::string& name, double value, double bound, bool skipped) {
    DistributionalCheck c;
    c.name = name;
    c.value = value;
    c.bound = bound;
    c.status = skipped ? "skipped (degenerate)" : (value <= bound ? "pass" : "fail");
    report.checks.push_back(std::move(c));
  };
  const bool skip = report.degenerate || used == 0;
  push_check("mean_error_norm2", std::abs(report.mean_error_norm2_scaled - n),
             5.0 * std::sqrt(2.0 * n / r_eff), skip);
  push_check("mean_flaw_norm2", std::abs(report.mean_flaw_norm2_scaled - q),
             5.0 * std::sqrt(2.0 * q / r_eff), skip);
  push_check("mean_residual_norm2", std::abs(report.mean_residual_norm2_scaled - (n - q)),
             5.0 * std::sqrt(2.0 * (n - q) / r_eff), skip);
  const double ks_bound = 1.5 * 1.36 / std::sqrt(r_eff);
  push_check("ks_error_chi2", report.ks_error, ks_bound, skip);
  push_check("ks_flaw_chi2", report.ks_flaw, ks_bound, skip);
  push_check("ks_residual_chi2", report.ks_residual, ks_bound, skip);
  push_check("flaw_bound_coverage", std::abs(report.coverage - (1.0 - alpha)),
             3.0 * std::sqrt(alpha * (1.0 - alpha) / r_eff), skip);

  return report;
}

}  // namespace casefit
