#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "qkpz/errors.hpp"

namespace qkpz {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Dense system operator with cached structure flags. Immutable after
// construction; concurrent reads are safe (flags are computed eagerly when
// known by construction, lazily on first query otherwise).
class OperatorMatrix {
 public:
  static constexpr double kFlagTolerance = 1e-12;

  OperatorMatrix() = default;
  explicit OperatorMatrix(Matrix entries) : mat_(std::move(entries)) {
    if (mat_.rows() != mat_.cols()) throw DimensionError("OperatorMatrix: entries must be square");
  }

  static OperatorMatrix identity(Eigen::Index dim) {
    OperatorMatrix op(Matrix::Identity(dim, dim));
    op.hermitian_ = true;
    op.diagonal_ = true;
    return op;
  }
  static OperatorMatrix zero(Eigen::Index dim) {
    OperatorMatrix op(Matrix::Zero(dim, dim));
    op.hermitian_ = true;
    op.diagonal_ = true;
    return op;
  }
  // Diagonal operator from its eigenvalue list (real diagonals are Hermitian).
  static OperatorMatrix diagonal(const Eigen::VectorXd& diag);

  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

  bool is_hermitian() const;
  bool is_diagonal() const;

  OperatorMatrix adjoint() const;

  // Flag setters for builders that know the structure by construction.
  void set_hermitian(bool v) { hermitian_ = v; }
  void set_diagonal(bool v) { diagonal_ = v; }

 private:
  Matrix mat_;
  mutable std::optional<bool> hermitian_;
  mutable std::optional<bool> diagonal_;
};

// Quantum state: Hermitian (1e-12), unit trace (1e-12), positive semidefinite
// up to -1e-10 on the smallest eigenvalue.
class DensityMatrix {
 public:
  static constexpr double kHermTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-12;
  static constexpr double kEigenFloor = -1e-10;

  DensityMatrix() = default;
  explicit DensityMatrix(Matrix entries, bool validate_now = true);

  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

  // Throws DomainError naming the violated invariant.
  void validate() const;

 private:
  Matrix mat_;
};

}  // namespace qkpz
