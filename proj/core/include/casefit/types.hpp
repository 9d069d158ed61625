#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <stdexcept>
#include <string>

namespace casefit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Input shapes do not conform (row/column counts, vector lengths).
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameter lies outside the declared admissible box.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A model evaluator produced non-finite values.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical scheme could not be applied (e.g. difference stencil
// infeasible inside the parameter box).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rank requirement violated (zero or deficient rank where full is needed).
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A statistic is undefined for the given inputs (e.g. zero residual norm).
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A random-variable tag that the realization map does not know.
struct UnknownVariable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A point in parameter space (the q-vector the model maps to a prediction).
/// The same type carries true values, estimates, starts and centered offsets;
/// the role is contextual.
struct Parameter {
  Vector values;

  Parameter() = default;

  explicit Parameter(Vector v) : values(std::move(v)) {
    if (values.size() < 1) throw DomainError("Parameter must have at least one entry");
    if (!values.allFinite()) throw DomainError("Parameter entries must be finite");
  }

  Parameter(std::initializer_list<double> v)
      : Parameter(Eigen::Map<const Vector>(v.begin(), static_cast<Index>(v.size()))) {}

  Index size() const { return values.size(); }
  double operator[](Index j) const { return values(j); }
  double& operator[](Index j) { return values(j); }
};

/// Fixed predictor values: one row per case, one column per predictor.
/// m = 0 is allowed for models with no independent variables.
struct Design {
  Matrix matrix;

  Design() = default;

  explicit Design(Matrix m) : matrix(std::move(m)) {
    if (matrix.rows() < 1) throw ShapeError("Design needs at least one case row");
    if (!matrix.allFinite()) throw ShapeError("Design entries must be finite");
  }

  Index n() const { return matrix.rows(); }
  Index m() const { return matrix.cols(); }
};

/// Axis-aligned admissible box for parameters. Declared per model; for
/// non-injective model maps the box is the declared injectivity domain.
struct ParameterBox {
  Vector lower;
  Vector upper;

  ParameterBox() = default;

  ParameterBox(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw ShapeError("ParameterBox bound sizes differ");
    if ((lower.array() > upper.array()).any()) throw DomainError("ParameterBox has empty interior");
  }

  /// Unbounded-in-practice default box [-1e6, 1e6]^q.
  static ParameterBox wide(Index q) {
    return ParameterBox(Vector::Constant(q, -1e6), Vector::Constant(q, 1e6));
  }

  Index dim() const { return lower.size(); }

  bool contains(const Vector& theta) const {
    if (theta.size() != lower.size()) return false;
    return (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
  }
  bool contains(const Parameter& theta) const { return contains(theta.values); }

  Vector clip(const Vector& theta) const {
    return theta.cwiseMax(lower).cwiseMin(upper);
  }

  ParameterBox shifted(const Vector& offset) const {
    return ParameterBox(lower - offset, upper - offset);
  }
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace casefit
