#include "qkpz/operator_matrix.hpp"

namespace qkpz {

OperatorMatrix OperatorMatrix::diagonal(const Eigen::VectorXd& diag) {
  Matrix m = Matrix::Zero(diag.size(), diag.size());
  m.diagonal() = diag.cast<Complex>();
  OperatorMatrix op(std::move(m));
  op.hermitian_ = true;
  op.diagonal_ = true;
  return op;
}

bool OperatorMatrix::is_hermitian() const {
  if (!hermitian_) hermitian_ = max_abs(mat_ - mat_.adjoint()) <= kFlagTolerance;
  return *hermitian_;
}

bool OperatorMatrix::is_diagonal() const {
  if (!diagonal_) {
    Matrix off = mat_;
    off.diagonal().setZero();
    diagonal_ = max_abs(off) <= kFlagTolerance;
  }
  return *diagonal_;
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix op(mat_.adjoint());
  if (hermitian_) op.hermitian_ = hermitian_;
  if (diagonal_ && *diagonal_ && hermitian_ && *hermitian_) op.diagonal_ = true;
  return op;
}

DensityMatrix::DensityMatrix(Matrix entries, bool validate_now) : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols()) throw DimensionError("DensityMatrix: entries must be square");
  if (validate_now) validate();
}

void DensityMatrix::validate() const {
  if (max_abs(mat_ - mat_.adjoint()) > kHermTolerance)
    throw DomainError("DensityMatrix: not Hermitian to 1e-12");
  if (std::abs(mat_.trace() - Complex(1.0, 0.0)) > kTraceTolerance)
    throw DomainError("DensityMatrix: trace differs from 1 beyond 1e-12");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenFloor)
    throw DomainError("DensityMatrix: negative eigenvalue below -1e-10");
}

}  // namespace qkpz
