// Command-line front end: model registry lookup, CSV ingestion, fitting with
// confidence reporting, seeded simulation studies, and the validation suite.
//
// Exit codes: 0 success; 1 failed validation; 2 malformed config or data;
// 3 non-convergence; 4 rank failure; 5 too many non-converged replicates.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "casefit/csv.hpp"
#include "casefit/distributions.hpp"
#include "casefit/estimate.hpp"
#include "casefit/inference.hpp"
#include "casefit/model.hpp"
#include "casefit/sampling.hpp"
#include "casefit/validate.hpp"

namespace {

using casefit::Index;
using casefit::Matrix;
using casefit::Vector;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitRankFailure = 4;
constexpr int kExitTooManyFailures = 5;

json to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

void emit(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw casefit::ShapeError("cannot write '" + out_path + "'");
    out << text;
  }
}

Vector parse_vector(const std::vector<double>& values) {
  Vector v(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
  return v;
}

std::vector<std::string> design_column_names(Index m) {
  std::vector<std::string> names;
  for (Index j = 0; j < m; ++j) names.push_back("u" + std::to_string(j + 1));
  return names;
}

// default start: midpoint of the admissible box clipped to moderate values
casefit::Parameter default_start(const casefit::ModelFunction& model) {
  Vector lo = model.domain.lower.cwiseMax(Vector::Constant(model.q, -2.0));
  Vector hi = model.domain.upper.cwiseMin(Vector::Constant(model.q, 2.0));
  return casefit::Parameter(Vector(0.5 * (lo + hi)));
}

struct FitArgs {
  std::string model;
  std::string data_path;
  std::vector<double> theta0;
  double alpha = 0.05;
  int max_iterations = 100;
  std::string out_path;
  std::string plot_path;
  std::string matrix_prefix;
};

int run_fit(const FitArgs& args) {
  casefit::Dataset data = casefit::read_csv(args.data_path);
  if (!data.has_column("x_obs")) {
    std::cerr << "error: data file '" << args.data_path << "' has no column named 'x_obs'\n";
    return kExitBadInput;
  }
  const Vector x_obs = data.column("x_obs");
  const Matrix predictors = data.columns_except({"x_obs"});
  casefit::ModelFunction model = casefit::make_model(args.model, casefit::Design(predictors));

  casefit::Estimate est;
  if (model.linear_design) {
    est = casefit::fit_linear(*model.linear_design, x_obs);
  } else {
    casefit::Parameter start =
        args.theta0.empty() ? default_start(model) : casefit::Parameter(parse_vector(args.theta0));
    casefit::FitOptions opts;
    opts.max_iterations = args.max_iterations;
    est = casefit::fit_nonlinear(model, x_obs, start, opts);
  }

  casefit::TangentFrame frame = casefit::tangent_frame(model, est.theta_hat);
  const int n = static_cast<int>(model.n());
  const int q = static_cast<int>(model.q);

  json doc;
  doc["command"] = "fit";
  doc["model"] = args.model;
  doc["n"] = n;
  doc["q"] = q;
  doc["estimate"] = {
      {"theta_hat", to_json(est.theta_hat.values)},
      {"x_hat", to_json(est.x_hat)},
      {"residual", to_json(est.residual)},
      {"sse", est.sse},
      {"converged", est.converged},
      {"iterations", est.iterations},
      {"termination", est.termination},
  };
  doc["tangent_frame"] = {
      {"jacobian", to_json(frame.jacobian)},
      {"rank", static_cast<int>(frame.rank)},
  };

  if (n > q) {
    casefit::ConfidenceRegion region = casefit::parameter_region(frame, est, args.alpha);
    json intervals = json::array();
    for (Index j = 0; j < model.q; ++j) {
      auto [lo, hi] = region.marginal_interval(j);
      intervals.push_back(json::array({lo, hi}));
    }
    doc["confidence_region"] = {
        {"center", to_json(region.center.values)}, {"shape_matrix", to_json(region.shape_matrix)},
        {"radius2", region.radius2},               {"alpha", region.alpha},
        {"s2", region.s2},                         {"marginal_intervals", intervals},
    };
    doc["flaw_bound"] = casefit::flaw_bound(est.sse, q, n, args.alpha);
  }
  doc["curvature_diagnostic"] = casefit::curvature_diagnostic(model, frame);

  if (!args.plot_path.empty()) {
    casefit::Dataset plot;
    plot.columns = {"case_index", "x_obs", "x_hat", "residual"};
    plot.values = Matrix(model.n(), 4);
    for (Index i = 0; i < model.n(); ++i) {
      plot.values(i, 0) = static_cast<double>(i);
      plot.values(i, 1) = x_obs(i);
      plot.values(i, 2) = est.x_hat(i);
      plot.values(i, 3) = est.residual(i);
    }
    casefit::write_csv(args.plot_path, plot);
  }
  if (!args.matrix_prefix.empty()) {
    casefit::Dataset jac;
    jac.columns = design_column_names(model.q);
    for (auto& c : jac.columns) c = "d_" + c;
    jac.values = frame.jacobian;
    casefit::write_csv(args.matrix_prefix + "_jacobian.csv", jac);
  }

  emit(doc, args.out_path);
  return est.converged ? kExitOk : kExitNonConvergence;
}

struct SimulateArgs {
  std::string model;
  std::string data_path;
  std::vector<double> theta_star;
  double sigma = 1.0;
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string out_path;
  std::string plot_path;
  std::string replicates_path;
  std::string data_out_path;
};

int run_simulate(const SimulateArgs& args) {
  casefit::Design design = args.data_path.empty()
                               ? casefit::default_design(args.model)
                               : casefit::Design(
                                     casefit::read_csv(args.data_path).columns_except({"x_obs"}));
  casefit::ModelFunction model = casefit::make_model(args.model, design);
  if (args.theta_star.empty()) {
    std::cerr << "error: simulate requires --theta-star\n";
    return kExitBadInput;
  }
  casefit::RandomVariableModel rv{model, casefit::Parameter(parse_vector(args.theta_star)),
                                  args.sigma, args.seed};
  casefit::MonteCarloReport report =
      casefit::monte_carlo_study(rv, args.replicates, args.alpha);

  json doc;
  doc["command"] = "simulate";
  doc["model"] = args.model;
  doc["n"] = static_cast<int>(model.n());
  doc["q"] = static_cast<int>(model.q);
  doc["theta_star"] = to_json(rv.theta_star.values);
  doc["sigma"] = args.sigma;
  doc["replicates"] = args.replicates;
  doc["seed"] = args.seed;
  doc["alpha"] = args.alpha;
  doc["aggregates"] = {
      {"mean_error_norm2_scaled", report.mean_error_norm2_scaled},
      {"mean_flaw_norm2_scaled", report.mean_flaw_norm2_scaled},
      {"mean_residual_norm2_scaled", report.mean_residual_norm2_scaled},
      {"ks_error", report.ks_error},
      {"ks_flaw", report.ks_flaw},
      {"ks_residual", report.ks_residual},
      {"f_stat_quantile_probs", report.quantile_probs},
      {"f_stat_quantiles", report.f_stat_quantiles},
  };
  doc["coverage"] = report.coverage;
  doc["nonconverged"] = report.nonconverged;
  doc["degenerate"] = report.degenerate;
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"status", c.status}});
  doc["checks"] = checks;

  if (!args.replicates_path.empty()) {
    casefit::Dataset table;
    table.columns = {"index"};
    for (Index j = 0; j < model.q; ++j) table.columns.push_back("theta_hat_" + std::to_string(j + 1));
    for (const char* c : {"sse", "error_norm2", "flaw_norm2", "residual_norm2", "f_stat", "covered"})
      table.columns.push_back(c);
    table.values = Matrix(static_cast<Index>(report.per_replicate.size()),
                          static_cast<Index>(table.columns.size()));
    for (std::size_t i = 0; i < report.per_replicate.size(); ++i) {
      const auto& rec = report.per_replicate[i];
      Index col = 0;
      auto row = static_cast<Index>(i);
      table.values(row, col++) = static_cast<double>(rec.index);
      for (Index j = 0; j < model.q; ++j) table.values(row, col++) = rec.theta_hat.values(j);
      table.values(row, col++) = rec.sse;
      table.values(row, col++) = rec.error_norm2;
      table.values(row, col++) = rec.flaw_norm2;
      table.values(row, col++) = rec.residual_norm2;
      table.values(row, col++) = rec.f_stat;
      table.values(row, col++) = rec.covered ? 1.0 : 0.0;
    }
    casefit::write_csv(args.replicates_path, table);
  }

  if (!args.plot_path.empty() && !report.degenerate) {
    // empirical vs theoretical CDF of the scaled residual norm
    std::vector<double> values;
    for (const auto& rec : report.per_replicate)
      if (rec.converged) values.push_back(rec.residual_norm2 / (args.sigma * args.sigma));
    std::sort(values.begin(), values.end());
    const int dof = static_cast<int>(model.n()) - static_cast<int>(model.q);
    casefit::Dataset plot;
    plot.columns = {"residual_norm2_scaled", "empirical_cdf", "theoretical_cdf"};
    plot.values = Matrix(static_cast<Index>(values.size()), 3);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto row = static_cast<Index>(i);
      plot.values(row, 0) = values[i];
      plot.values(row, 1) = (static_cast<double>(i) + 1.0) / static_cast<double>(values.size());
      plot.values(row, 2) = casefit::chi2_cdf(dof, values[i]);
    }
    casefit::write_csv(args.plot_path, plot);
  }

  if (!args.data_out_path.empty()) {
    // replicate 0 as an ingestible dataset
    Vector x0 = casefit::sample_outcome(rv, 0);
    casefit::Dataset ds;
    ds.columns = design_column_names(design.m());
    ds.columns.push_back("x_obs");
    ds.values = Matrix(design.n(), design.m() + 1);
    ds.values.leftCols(design.m()) = design.matrix;
    ds.values.col(design.m()) = x0;
    casefit::write_csv(args.data_out_path, ds);
  }

  emit(doc, args.out_path);
  return report.valid ? kExitOk : kExitTooManyFailures;
}

struct ValidateArgs {
  bool list = false;
  std::string sabotage;
  std::uint64_t seed = 0x0ca5ef17u;
  std::string out_path;
};

int run_validate(const ValidateArgs& args) {
  if (args.list) {
    for (const auto& name : casefit::validation_check_names()) std::cout << name << "\n";
    return kExitOk;
  }
  casefit::ValidationOptions options;
  options.seed = args.seed;
  options.sabotage = args.sabotage;
  casefit::ValidationReport report = casefit::run_validation(options);

  json doc;
  doc["command"] = "validate";
  doc["all_passed"] = report.all_passed;
  json checks = json::array();
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) std::cout << ": " << c.detail;
    std::cout << "\n";
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  doc["checks"] = checks;
  if (!args.out_path.empty()) emit(doc, args.out_path);
  return report.all_passed ? kExitOk : kExitValidationFailed;
}

int run_models() {
  json doc = json::array();
  for (const auto& name : casefit::model_names()) {
    casefit::Design design = casefit::default_design(name);
    casefit::ModelFunction model = casefit::make_model(name, design);
    doc.push_back({
        {"name", name},
        {"q", static_cast<int>(model.q)},
        {"predictors", static_cast<int>(design.m())},
        {"default_cases", static_cast<int>(design.n())},
        {"domain_lower", to_json(model.domain.lower)},
        {"domain_upper", to_json(model.domain.upper)},
    });
  }
  emit(doc, "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares estimation geometry toolkit"};
  app.set_config("--config");
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit a registry model to a CSV dataset");
  fit->add_option("--model", fit_args.model, "Registry model name")->required();
  fit->add_option("--data", fit_args.data_path, "CSV with predictor columns and x_obs")->required();
  fit->add_option("--theta0", fit_args.theta0, "Starting parameter (comma separated)")
      ->delimiter(',');
  fit->add_option("--alpha", fit_args.alpha, "Confidence level complement");
  fit->add_option("--max-iterations", fit_args.max_iterations, "Descent iteration cap");
  fit->add_option("--out", fit_args.out_path, "JSON report destination (stdout if omitted)");
  fit->add_option("--emit-plot-data", fit_args.plot_path, "Write fitted-vs-observed CSV");
  fit->add_option("--dump-matrices", fit_args.matrix_prefix, "Prefix for debug matrix CSV dumps");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Run a seeded replication study");
  sim->add_option("--model", sim_args.model, "Registry model name")->required();
  sim->add_option("--data", sim_args.data_path, "Optional CSV supplying the design");
  sim->add_option("--theta-star", sim_args.theta_star, "True parameter (comma separated)")
      ->delimiter(',');
  sim->add_option("--sigma", sim_args.sigma, "Noise standard deviation");
  sim->add_option("--replicates", sim_args.replicates, "Replicate count (at least 100)");
  sim->add_option("--seed", sim_args.seed, "Reproducibility seed");
  sim->add_option("--alpha", sim_args.alpha, "Level for the flaw bound");
  sim->add_option("--out", sim_args.out_path, "JSON report destination (stdout if omitted)");
  sim->add_option("--emit-plot-data", sim_args.plot_path, "Write CDF comparison CSV");
  sim->add_option("--replicates-csv", sim_args.replicates_path, "Write the per-replicate table");
  sim->add_option("--data-out", sim_args.data_out_path, "Write replicate 0 as a fit-ready CSV");

  ValidateArgs val_args;
  auto* val = app.add_subcommand("validate", "Run the invariant suite");
  val->add_flag("--list", val_args.list, "Print the check inventory and exit");
  val->add_option("--sabotage", val_args.sabotage, "Fault-injection hook (negative control)");
  val->add_option("--seed", val_args.seed, "Suite seed");
  val->add_option("--out", val_args.out_path, "JSON report destination");

  auto* models = app.add_subcommand("models", "List registry models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (fit->parsed()) return run_fit(fit_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (val->parsed()) return run_validate(val_args);
    if (models->parsed()) return run_models();
  } catch (const casefit::RankError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRankFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
