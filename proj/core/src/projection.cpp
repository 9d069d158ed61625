#include "casefit/projection.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace casefit {

SubspaceBasis SubspaceBasis::from_columns(Matrix columns) {
  if (columns.rows() < 1) throw ShapeError("basis needs at least one row");
  if (!columns.allFinite()) throw ShapeError("basis entries must be finite");
  SubspaceBasis b;
  b.columns = std::move(columns);
  if (b.columns.cols() == 0) {
    b.rank = 0;
    return b;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(b.columns);
  qr.setThreshold(kRankTolerance);
  b.rank = qr.rank();
  return b;
}

ProjectionResult project_subspace(const SubspaceBasis& basis, const Vector& point) {
  if (point.size() != basis.n())
    throw ShapeError("point length " + std::to_string(point.size()) + " does not match basis rows " +
                     std::to_string(basis.n()));
  const Index n = basis.n(), k = basis.k();

  ProjectionResult res;
  res.rank_deficient = basis.rank_deficient();
  if (k == 0 || basis.rank == 0) {
    res.projection = Vector::Zero(n);
    res.coefficients = Vector::Zero(k);
    return res;
  }

  // Orthogonal factorization; the complete decomposition also yields the
  // minimum-norm coefficients when columns are dependent.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(basis.columns);
  cod.setThreshold(kRankTolerance);
  const Index r = cod.rank();

  Matrix q1 = cod.householderQ() * Matrix::Identity(n, r);
  res.projection = q1 * (q1.transpose() * point);
  res.coefficients = cod.solve(point);
  return res;
}

Vector project_affine(const AffineSubspace& space, const Vector& point) {
  if (space.anchor.size() != space.directions.n())
    throw ShapeError("affine anchor length does not match direction rows");
  if (point.size() != space.anchor.size())
    throw ShapeError("point length does not match affine space dimension");
  // translate, project onto the direction subspace, translate back
  return space.anchor + project_subspace(space.directions, point - space.anchor).projection;
}

Matrix generalized_inverse(const Matrix& a) {
  if (a.size() == 0) return a.transpose();
  if (!a.allFinite()) throw ShapeError("matrix entries must be finite");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sigma = svd.singularValues();
  const double cutoff = kRankTolerance * (sigma.size() > 0 ? sigma(0) : 0.0);
  Vector inv = Vector::Zero(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff && sigma(i) > 0.0) inv(i) = 1.0 / sigma(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SplitBasis split_basis(const SubspaceBasis& basis) {
  const Index n = basis.n(), k = basis.k();
  if (k < 1) throw RankError("split_basis needs at least one column");
  if (basis.rank < k) throw RankError("split_basis requires a full-rank basis (rank " +
                                      std::to_string(basis.rank) + " of " + std::to_string(k) + ")");
  if (n < k) throw ShapeError("basis has more columns than rows");

  Eigen::HouseholderQR<Matrix> qr(basis.columns);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  SplitBasis out;
  out.tangent_onb = q.leftCols(k);
  out.complement_onb = q.rightCols(n - k);
  return out;
}

}  // namespace casefit
