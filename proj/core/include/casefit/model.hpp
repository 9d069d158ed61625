#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "casefit/types.hpp"

namespace casefit {

/// Pile of n slices, each rows x cols; the middle (slice) axis indexes cases.
/// Multiplication against ordinary matrices acts slice-wise.
class SliceArray {
 public:
  SliceArray() = default;
  SliceArray(Index rows, Index cases, Index cols);

  Index rows() const { return rows_; }
  Index cases() const { return cases_; }
  Index cols() const { return cols_; }

  Matrix& slice(Index i) { return slices_[static_cast<std::size_t>(i)]; }
  const Matrix& slice(Index i) const { return slices_[static_cast<std::size_t>(i)]; }

  double& at(Index a, Index i, Index b) { return slice(i)(a, b); }
  double at(Index a, Index i, Index b) const { return slice(i)(a, b); }

  /// Collapse convention: axes of extent 1 disappear, remaining axes keep
  /// their order. A 1 x n x q pile becomes the n x q matrix whose row i is
  /// slice i; an m x n x 1 pile becomes the m x n matrix whose column i is
  /// slice i. Throws ShapeError if neither outer axis has extent 1.
  Matrix collapsed() const;

  bool same_shape(const SliceArray& other) const {
    return rows_ == other.rows_ && cases_ == other.cases_ && cols_ == other.cols_;
  }

 private:
  Index rows_ = 0, cases_ = 0, cols_ = 0;
  std::vector<Matrix> slices_;
};

/// Second-derivative pile: case i's slice is the q x q Hessian of the scalar
/// map theta -> x_i(theta). The slice (case) axis sits in the middle.
using SecondDerivativeArray = SliceArray;

/// Slice-wise pre/post multiplication: left (r x m) and right (q x s) applied
/// to every m x q slice, giving an r x n x s pile. Either factor may be absent.
SliceArray slice_multiply(const std::optional<Matrix>& left, const SliceArray& array,
                          const std::optional<Matrix>& right);

/// A parameter-to-prediction map with a fixed design: theta in R^q maps to a
/// prediction with one entry per case. Derivatives fall back to central
/// finite differences when no analytic form is attached.
struct ModelFunction {
  std::string name;
  Design design;
  Index q = 0;
  std::function<Vector(const Parameter&)> evaluator;
  std::function<Matrix(const Parameter&)> analytic_jacobian;        // optional
  std::function<SecondDerivativeArray(const Parameter&)> analytic_second;  // optional
  ParameterBox domain;

  /// Set for models linear in theta: prediction = linear_design * theta.
  /// Lets estimation take the exact projection path.
  std::optional<Matrix> linear_design;

  Index n() const { return design.n(); }
};

/// x(theta) with domain and finiteness checks.
Vector evaluate(const ModelFunction& model, const Parameter& theta);

/// n x q matrix of first partials, row i = gradient of case i's prediction.
/// Analytic when attached, otherwise central differences with per-coordinate
/// step h_j = cbrt(machine epsilon) * (1 + |theta_j|).
Matrix jacobian(const ModelFunction& model, const Parameter& theta);

/// q x n x q pile of second partials (slice i = Hessian of case i).
SecondDerivativeArray second_derivative(const ModelFunction& model, const Parameter& theta);

// -- registry ---------------------------------------------------------------

/// x = U * theta; q equals the number of design columns.
ModelFunction make_linear(const Design& design);

/// One-parameter proportional law x_i = theta * h_i (single predictor column).
ModelFunction make_proportional(const Design& design);

/// x_i = sin(u_i . theta). The default domain is the declared injectivity box
/// (0, pi / max|u|)^q; pass an explicit box to evaluate outside it.
ModelFunction make_sine(const Design& design);
ModelFunction make_sine(const Design& design, const ParameterBox& domain);

/// Two-parameter decay x_i = theta_1 * exp(-theta_2 * u_i).
ModelFunction make_expdecay(const Design& design);

/// Registry lookup by name ("linear", "proportional", "sine", "expdecay").
ModelFunction make_model(const std::string& name, const Design& design);

/// Built-in design used when the CLI is given no data file.
Design default_design(const std::string& name);

std::vector<std::string> model_names();

}  // namespace casefit
