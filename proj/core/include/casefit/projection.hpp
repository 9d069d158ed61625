#pragma once

#include "casefit/types.hpp"

namespace casefit {

/// Pivot magnitudes below this fraction of the largest count as zero when
/// deciding rank.
inline constexpr double kRankTolerance = 1e-12;

/// Column span of a matrix, with its effective rank at kRankTolerance.
struct SubspaceBasis {
  Matrix columns;  // n x k
  Index rank = 0;

  static SubspaceBasis from_columns(Matrix columns);

  Index n() const { return columns.rows(); }
  Index k() const { return columns.cols(); }
  bool rank_deficient() const { return rank < k(); }
};

/// A translated subspace {anchor + v : v in span(directions)}.
struct AffineSubspace {
  Vector anchor;
  SubspaceBasis directions;
};

struct ProjectionResult {
  Vector projection;
  Vector coefficients;  // minimum-norm when the basis is rank deficient
  bool rank_deficient = false;
};

/// Nearest point of span(basis) to `point`, via Householder QR; the residual
/// is orthogonal to every basis column. Coefficients reproduce the
/// projection through the original (possibly dependent) columns.
ProjectionResult project_subspace(const SubspaceBasis& basis, const Vector& point);

/// Nearest point of the affine set, by translating to the direction
/// subspace, projecting, and translating back.
Vector project_affine(const AffineSubspace& space, const Vector& point);

/// Moore-Penrose pseudoinverse (satisfies A A^- A = A for any A).
Matrix generalized_inverse(const Matrix& a);

/// Orthonormal completion of a full-rank basis: the first block spans the
/// input columns, the second its orthogonal complement; together they rotate
/// the standard basis of R^n.
struct SplitBasis {
  Matrix tangent_onb;     // n x k
  Matrix complement_onb;  // n x (n-k)
};

SplitBasis split_basis(const SubspaceBasis& basis);

}  // namespace casefit
