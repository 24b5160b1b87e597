#pragma once

// Dense kernels shared by the generators, solvers and bound formulas.
// Every reduction (dot, norms, Gram entries) uses compensated summation so
// that telemetry does not depend on the optimization level.

#include <cstddef>
#include <span>
#include <vector>

namespace rowaction {

using Vector = std::vector<double>;

namespace tolerance {
// Cholesky pivots below kRankPivot * max(diag) are treated as rank loss.
inline constexpr double kRankPivot = 1e-12;
// Jacobi stops once every off-diagonal entry is below kJacobiOffDiag * max(diag).
inline constexpr double kJacobiOffDiag = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;
// Rows with norm below this are rejected by normalization.
inline constexpr double kZeroRow = 1e-12;
}  // namespace tolerance

/// Row-major dense matrix with at least one row and one column and finite entries.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  static DenseMatrix identity(std::size_t n);
  // Convenience for tests and small literals: one inner vector per row.
  static DenseMatrix fromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transpose() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Kahan-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double y = v - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double dot(std::span<const double> u, std::span<const double> v);
double norm2(std::span<const double> v);
double norm2Sq(std::span<const double> v);
double normInf(std::span<const double> v);

Vector matvec(const DenseMatrix& a, std::span<const double> v);
// Aᵀv
Vector matvecTransposed(const DenseMatrix& a, std::span<const double> v);

Vector subtract(std::span<const double> u, std::span<const double> v);

double frobeniusNormSq(const DenseMatrix& a);

// AᵀA (n×n) and AAᵀ (m×m), symmetric.
DenseMatrix gramColumns(const DenseMatrix& a);
DenseMatrix gramRows(const DenseMatrix& a);

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Throws RankError when a pivot drops below kRankPivot * max diagonal.
DenseMatrix cholesky(const DenseMatrix& spd);
// Solves (L Lᵀ) x = rhs given the factor from cholesky().
Vector choleskySolve(const DenseMatrix& lower, std::span<const double> rhs);

/// Least-squares solution of an overdetermined full-column-rank system via
/// the normal equations AᵀA x = Aᵀb.
Vector leastSquares(const DenseMatrix& a, std::span<const double> b);

/// Minimum-norm solution Aᵀ(AAᵀ)⁻¹b of an underdetermined full-row-rank system.
Vector leastNorm(const DenseMatrix& a, std::span<const double> b);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
// Throws NumericalError when kJacobiMaxSweeps sweeps do not converge.
Vector symmetricEigenvalues(DenseMatrix sym);

/// Smallest singular value of a tall matrix, sqrt(λ_min(AᵀA)).
double minSingularValue(const DenseMatrix& a);

}  // namespace rowaction
