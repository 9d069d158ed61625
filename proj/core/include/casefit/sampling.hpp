#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "casefit/estimate.hpp"
#include "casefit/inference.hpp"
#include "casefit/model.hpp"
#include "casefit/rng.hpp"
#include "casefit/types.hpp"

namespace casefit {

/// A model with a designated true parameter and Gaussian observation noise.
/// The seed stands in for the abstract sampling outcome: fixing (seed,
/// replicate) fixes every realization jointly.
struct RandomVariableModel {
  ModelFunction model;
  Parameter theta_star;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// x(theta_star) + sigma * z for the noise vector of (seed, replicate);
/// bit-reproducible for fixed coordinates.
Vector sample_outcome(const RandomVariableModel& rv, std::uint64_t replicate);

// Tags naming the random variables the realization map understands.
struct XStarTag {};
struct EpsilonTag {};
struct XObsTag {};
struct XHatTag {};
struct ResidualTag {};
struct FlawTag {};
struct XAtTag {
  Parameter theta;
};
struct TangentTag {
  Vector eta;
};

using RandomVariableTag =
    std::variant<XStarTag, EpsilonTag, XObsTag, XHatTag, ResidualTag, FlawTag, XAtTag, TangentTag>;

/// Parse a textual tag ("x_star", "epsilon", "x_obs", "x_hat", "residual",
/// "flaw"); throws UnknownVariable otherwise. The parametric tags take their
/// payload programmatically.
RandomVariableTag parse_variable_tag(const std::string& name);

/// Apply the outcome (seed, replicate) to the named random variable. All
/// realizations derive from one sampled observation, so the defining
/// relations hold bit-exactly in their constructive arrangement:
///   x_obs = sample_outcome, residual = x_obs - x_hat,
///   flaw = x_hat - x_star, epsilon = flaw + residual,
///   tangent(eta) = x_hat + J eta.
/// Rearrangements (e.g. epsilon vs x_obs - x_star) agree to rounding.
Vector realize(const RandomVariableModel& rv, const RandomVariableTag& variable,
               std::uint64_t replicate, const FitOptions& opts = {});

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct ReplicateRecord {
  std::uint64_t index = 0;
  Parameter theta_hat;
  double sse = 0.0;
  double error_norm2 = 0.0;
  double flaw_norm2 = 0.0;
  double residual_norm2 = 0.0;
  double f_stat = 0.0;
  bool covered = false;  // flaw norm within the (1-alpha) bound
  bool converged = false;
};

struct DistributionalCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string status;  // "pass", "fail", "skipped (degenerate)"
};

struct MonteCarloReport {
  std::uint64_t replicates = 0;
  double alpha = 0.0;
  std::vector<ReplicateRecord> per_replicate;

  // aggregates over converged replicates, on the sigma^2 scale
  double mean_error_norm2_scaled = 0.0;
  double mean_flaw_norm2_scaled = 0.0;
  double mean_residual_norm2_scaled = 0.0;
  double ks_error = 0.0;     // scaled error norms vs chi-square(n)
  double ks_flaw = 0.0;      // scaled flaw norms vs chi-square(q)
  double ks_residual = 0.0;  // scaled residual norms vs chi-square(n-q)
  std::vector<double> quantile_probs;    // probe points for empirical quantiles
  std::vector<double> f_stat_quantiles;  // empirical quantiles of the F statistic

  double coverage = 0.0;
  std::uint64_t nonconverged = 0;
  bool degenerate = false;  // sigma == 0: distributional checks skipped
  bool valid = false;       // at most 1% of replicates excluded

  std::vector<DistributionalCheck> checks;
};

/// Seeded replication study: sample, fit (exact projection for linear
/// models, damped descent started near truth otherwise), decompose against
/// the known state, aggregate. Reproducible from (seed, R).
MonteCarloReport monte_carlo_study(const RandomVariableModel& rv, std::uint64_t replicates,
                                   double alpha, const FitOptions& opts = {});

}  // namespace casefit
