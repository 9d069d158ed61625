#include "casefit/model.hpp"

#include <cmath>
#include <limits>

namespace casefit {

namespace {

const double kEps = std::numeric_limits<double>::epsilon();

// Step sizes for difference stencils; cube root of epsilon balances
// truncation against rounding for first derivatives.
double first_step(double t) { return std::cbrt(kEps) * (1.0 + std::abs(t)); }
double second_step(double t) { return std::pow(kEps, 0.25) * (1.0 + std::abs(t)); }

void check_theta(const ModelFunction& model, const Parameter& theta) {
  if (theta.size() != model.q)
    throw ShapeError("parameter has length " + std::to_string(theta.size()) +
                     ", model expects q = " + std::to_string(model.q));
  if (!model.domain.contains(theta))
    throw DomainError("parameter outside the admissible box of model '" + model.name + "'");
}

// Central difference of the evaluator along coordinate j. The stencil is
// shifted to stay inside the box; if neither side is feasible the
// coordinate cannot be differentiated numerically.
Vector fd_column(const ModelFunction& model, const Vector& theta, Index j) {
  const double h = first_step(theta(j));
  Vector lo = theta, hi = theta;
  lo(j) -= h;
  hi(j) += h;
  const bool lo_ok = model.domain.contains(lo);
  const bool hi_ok = model.domain.contains(hi);
  if (!lo_ok && !hi_ok)
    throw NumericalError("difference stencil leaves the parameter box on both sides (coordinate " +
                         std::to_string(j) + ")");
  if (lo_ok && hi_ok)
    return (model.evaluator(Parameter(hi)) - model.evaluator(Parameter(lo))) / (2.0 * h);
  // one-sided fallback at a box face
  if (hi_ok) return (model.evaluator(Parameter(hi)) - model.evaluator(Parameter(theta))) / h;
  return (model.evaluator(Parameter(theta)) - model.evaluator(Parameter(lo))) / h;
}

Matrix fd_jacobian(const ModelFunction& model, const Parameter& theta) {
  Matrix jac(model.n(), model.q);
  for (Index j = 0; j < model.q; ++j) jac.col(j) = fd_column(model, theta.values, j);
  return jac;
}

}  // namespace

SliceArray::SliceArray(Index rows, Index cases, Index cols)
    : rows_(rows), cases_(cases), cols_(cols) {
  if (rows < 0 || cases < 1 || cols < 0) throw ShapeError("SliceArray dimensions must be positive");
  slices_.assign(static_cast<std::size_t>(cases), Matrix::Zero(rows, cols));
}

Matrix SliceArray::collapsed() const {
  if (rows_ == 1) {
    Matrix out(cases_, cols_);
    for (Index i = 0; i < cases_; ++i) out.row(i) = slice(i).row(0);
    return out;
  }
  if (cols_ == 1) {
    Matrix out(rows_, cases_);
    for (Index i = 0; i < cases_; ++i) out.col(i) = slice(i).col(0);
    return out;
  }
  throw ShapeError("collapse requires an outer axis of extent 1");
}

SliceArray slice_multiply(const std::optional<Matrix>& left, const SliceArray& array,
                          const std::optional<Matrix>& right) {
  if (left && left->cols() != array.rows())
    throw ShapeError("left factor has " + std::to_string(left->cols()) +
                     " columns, slices have " + std::to_string(array.rows()) + " rows");
  if (right && right->rows() != array.cols())
    throw ShapeError("right factor has " + std::to_string(right->rows()) +
                     " rows, slices have " + std::to_string(array.cols()) + " columns");

  const Index out_rows = left ? left->rows() : array.rows();
  const Index out_cols = right ? right->cols() : array.cols();
  SliceArray out(out_rows, array.cases(), out_cols);
  for (Index i = 0; i < array.cases(); ++i) {
    if (left && right)
      out.slice(i) = (*left) * array.slice(i) * (*right);
    else if (left)
      out.slice(i) = (*left) * array.slice(i);
    else if (right)
      out.slice(i) = array.slice(i) * (*right);
    else
      out.slice(i) = array.slice(i);
  }
  return out;
}

Vector evaluate(const ModelFunction& model, const Parameter& theta) {
  check_theta(model, theta);
  Vector x = model.evaluator(theta);
  if (x.size() != model.n())
    throw EvalError("evaluator of '" + model.name + "' returned wrong length");
  if (!x.allFinite())
    throw EvalError("evaluator of '" + model.name + "' produced non-finite values");
  return x;
}

Matrix jacobian(const ModelFunction& model, const Parameter& theta) {
  check_theta(model, theta);
  Matrix jac = model.analytic_jacobian ? model.analytic_jacobian(theta) : fd_jacobian(model, theta);
  if (jac.rows() != model.n() || jac.cols() != model.q)
    throw EvalError("jacobian of '" + model.name + "' has wrong shape");
  if (!jac.allFinite()) throw NumericalError("jacobian of '" + model.name + "' is non-finite");
  return jac;
}

SecondDerivativeArray second_derivative(const ModelFunction& model, const Parameter& theta) {
  check_theta(model, theta);
  if (model.analytic_second) {
    SecondDerivativeArray arr = model.analytic_second(theta);
    if (arr.rows() != model.q || arr.cases() != model.n() || arr.cols() != model.q)
      throw EvalError("second derivative of '" + model.name + "' has wrong shape");
    return arr;
  }

  // Differences of the Jacobian: column k of case i's Hessian. Wider step
  // than the first-order one since the Jacobian may itself be differenced.
  const Index n = model.n(), q = model.q;
  SecondDerivativeArray arr(q, n, q);
  for (Index k = 0; k < q; ++k) {
    const double h = second_step(theta[k]);
    Vector lo = theta.values, hi = theta.values;
    lo(k) -= h;
    hi(k) += h;
    const bool lo_ok = model.domain.contains(lo);
    const bool hi_ok = model.domain.contains(hi);
    if (!lo_ok && !hi_ok)
      throw NumericalError("second-derivative stencil infeasible for coordinate " +
                           std::to_string(k));
    Matrix jhi = jacobian(model, Parameter(hi_ok ? hi : theta.values));
    Matrix jlo = jacobian(model, Parameter(lo_ok ? lo : theta.values));
    const double width = (hi_ok ? h : 0.0) + (lo_ok ? h : 0.0);
    Matrix dj = (jhi - jlo) / width;  // n x q
    for (Index i = 0; i < n; ++i) arr.slice(i).col(k) = dj.row(i).transpose();
  }
  // enforce the symmetry a twice continuously differentiable map guarantees
  for (Index i = 0; i < n; ++i)
    arr.slice(i) = 0.5 * (arr.slice(i) + arr.slice(i).transpose()).eval();
  return arr;
}

// -- registry ---------------------------------------------------------------

ModelFunction make_linear(const Design& design) {
  ModelFunction m;
  m.name = "linear";
  m.design = design;
  m.q = design.m();
  if (m.q < 1) throw ShapeError("linear model needs at least one design column");
  const Matrix U = design.matrix;
  m.evaluator = [U](const Parameter& t) { return Vector(U * t.values); };
  m.analytic_jacobian = [U](const Parameter&) { return U; };
  const Index n = U.rows(), q = U.cols();
  m.analytic_second = [n, q](const Parameter&) { return SecondDerivativeArray(q, n, q); };
  m.domain = ParameterBox::wide(m.q);
  m.linear_design = U;
  return m;
}

ModelFunction make_proportional(const Design& design) {
  if (design.m() != 1) throw ShapeError("proportional model expects exactly one predictor column");
  ModelFunction m = make_linear(design);
  m.name = "proportional";
  return m;
}

ModelFunction make_sine(const Design& design, const ParameterBox& domain) {
  ModelFunction m;
  m.name = "sine";
  m.design = design;
  m.q = design.m();
  if (m.q < 1) throw ShapeError("sine model needs at least one design column");
  if (domain.dim() != m.q) throw ShapeError("sine domain dimension mismatch");
  const Matrix U = design.matrix;
  m.evaluator = [U](const Parameter& t) { return Vector((U * t.values).array().sin()); };
  m.analytic_jacobian = [U](const Parameter& t) {
    Vector c = (U * t.values).array().cos();
    return Matrix(c.asDiagonal() * U);
  };
  m.analytic_second = [U](const Parameter& t) {
    const Index n = U.rows(), q = U.cols();
    Vector s = (U * t.values).array().sin();
    SecondDerivativeArray arr(q, n, q);
    for (Index i = 0; i < n; ++i)
      arr.slice(i) = -s(i) * (U.row(i).transpose() * U.row(i));
    return arr;
  };
  m.domain = domain;
  return m;
}

ModelFunction make_sine(const Design& design) {
  // injectivity box: u . theta stays inside (0, pi) for nonnegative designs
  const Index q = design.m();
  const double umax = design.matrix.cwiseAbs().maxCoeff();
  const double hi = umax > 0 ? M_PI / umax : M_PI;
  return make_sine(design, ParameterBox(Vector::Zero(q), Vector::Constant(q, hi)));
}

ModelFunction make_expdecay(const Design& design) {
  if (design.m() != 1) throw ShapeError("expdecay model expects exactly one predictor column");
  ModelFunction m;
  m.name = "expdecay";
  m.design = design;
  m.q = 2;
  const Vector u = design.matrix.col(0);
  m.evaluator = [u](const Parameter& t) {
    return Vector(t[0] * (-t[1] * u.array()).exp());
  };
  m.analytic_jacobian = [u](const Parameter& t) {
    Vector e = (-t[1] * u.array()).exp();
    Matrix jac(u.size(), 2);
    jac.col(0) = e;
    jac.col(1) = -t[0] * u.array() * e.array();
    return jac;
  };
  m.analytic_second = [u](const Parameter& t) {
    const Index n = u.size();
    Vector e = (-t[1] * u.array()).exp();
    SecondDerivativeArray arr(2, n, 2);
    for (Index i = 0; i < n; ++i) {
      Matrix h(2, 2);
      h(0, 0) = 0.0;
      h(0, 1) = h(1, 0) = -u(i) * e(i);
      h(1, 1) = t[0] * u(i) * u(i) * e(i);
      arr.slice(i) = h;
    }
    return arr;
  };
  // amplitude generous, rate bounded to keep exp finite on ordinary designs
  m.domain = ParameterBox(Vector{{-1e6, -50.0}}, Vector{{1e6, 50.0}});
  return m;
}

ModelFunction make_model(const std::string& name, const Design& design) {
  if (name == "linear") return make_linear(design);
  if (name == "proportional") return make_proportional(design);
  if (name == "sine") return make_sine(design);
  if (name == "expdecay") return make_expdecay(design);
  throw DomainError("unknown model '" + name + "'");
}

Design default_design(const std::string& name) {
  if (name == "linear") {
    // intercept plus trend, ten cases
    Matrix U(10, 2);
    for (Index i = 0; i < 10; ++i) {
      U(i, 0) = 1.0;
      U(i, 1) = static_cast<double>(i + 1);
    }
    return Design(U);
  }
  if (name == "proportional") {
    Matrix H(10, 1);
    for (Index i = 0; i < 10; ++i) H(i, 0) = static_cast<double>(i + 1);
    return Design(H);
  }
  if (name == "sine" || name == "expdecay") {
    Matrix U(5, 1);
    for (Index i = 0; i < 5; ++i) U(i, 0) = static_cast<double>(i + 1);
    return Design(U);
  }
  throw DomainError("unknown model '" + name + "'");
}

std::vector<std::string> model_names() { return {"linear", "proportional", "sine", "expdecay"}; }

}  // namespace casefit
