#include "rowaction/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rowaction/errors.hpp"

namespace rowaction {

namespace {

void requireFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ContractError(std::string(what) + " contains a non-finite entry");
  }
}

void requireSameLength(std::span<const double> u, std::span<const double> v, const char* op) {
  if (u.size() != v.size()) {
    throw ContractError(std::string(op) + ": length mismatch (" + std::to_string(u.size()) +
                        " vs " + std::to_string(v.size()) + ")");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw ContractError("DenseMatrix needs at least one row and column");
  if (data_.size() != rows_ * cols_) {
    throw ContractError("DenseMatrix: " + std::to_string(data_.size()) + " entries for a " +
                        std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
  }
  requireFinite(data_, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::fromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ContractError("DenseMatrix::fromRows: no rows");
  const std::size_t cols = rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ContractError("DenseMatrix::fromRows: ragged rows");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return DenseMatrix(rows.size(), cols, std::move(entries));
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double dot(std::span<const double> u, std::span<const double> v) {
  requireSameLength(u, v, "dot");
  CompensatedSum acc;
  for (std::size_t i = 0; i < u.size(); ++i) acc.add(u[i] * v[i]);
  return acc.value();
}

double norm2Sq(std::span<const double> v) {
  CompensatedSum acc;
  for (double x : v) acc.add(x * x);
  return acc.value();
}

double norm2(std::span<const double> v) { return std::sqrt(norm2Sq(v)); }

double normInf(std::span<const double> v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

Vector matvec(const DenseMatrix& a, std::span<const double> v) {
  if (v.size() != a.cols()) {
    throw ContractError("matvec: vector length " + std::to_string(v.size()) +
                        " does not match " + std::to_string(a.cols()) + " columns");
  }
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), v);
  return out;
}

Vector matvecTransposed(const DenseMatrix& a, std::span<const double> v) {
  if (v.size() != a.rows()) {
    throw ContractError("matvecTransposed: vector length " + std::to_string(v.size()) +
                        " does not match " + std::to_string(a.rows()) + " rows");
  }
  std::vector<CompensatedSum> acc(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) acc[j].add(row[j] * v[i]);
  }
  Vector out(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) out[j] = acc[j].value();
  return out;
}

Vector subtract(std::span<const double> u, std::span<const double> v) {
  requireSameLength(u, v, "subtract");
  Vector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
  return out;
}

double frobeniusNormSq(const DenseMatrix& a) {
  // Row-by-row so the result equals the sum of squared row norms.
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.rows(); ++i) acc.add(norm2Sq(a.row(i)));
  return acc.value();
}

DenseMatrix gramColumns(const DenseMatrix& a) {
  const std::size_t n = a.cols();
  std::vector<CompensatedSum> acc(n * n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = row[i];
      for (std::size_t j = 0; j <= i; ++j) acc[i * n + j].add(ri * row[j]);
    }
  }
  DenseMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) g(i, j) = g(j, i) = acc[i * n + j].value();
  return g;
}

DenseMatrix gramRows(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  DenseMatrix g(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) g(i, j) = g(j, i) = dot(a.row(i), a.row(j));
  return g;
}

DenseMatrix cholesky(const DenseMatrix& spd) {
  const std::size_t n = spd.rows();
  if (spd.cols() != n) throw ContractError("cholesky: matrix is not square");
  double maxDiag = 0.0;
  for (std::size_t i = 0; i < n; ++i) maxDiag = std::max(maxDiag, spd(i, i));
  const double pivotFloor = tolerance::kRankPivot * maxDiag;

  DenseMatrix lower(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    CompensatedSum diag;
    diag.add(spd(j, j));
    for (std::size_t k = 0; k < j; ++k) diag.add(-lower(j, k) * lower(j, k));
    const double pivot = diag.value();
    if (!(pivot > pivotFloor)) {
      throw RankError("cholesky: pivot " + std::to_string(pivot) + " at column " +
                      std::to_string(j) + " below rank tolerance");
    }
    const double ljj = std::sqrt(pivot);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      CompensatedSum s;
      s.add(spd(i, j));
      for (std::size_t k = 0; k < j; ++k) s.add(-lower(i, k) * lower(j, k));
      lower(i, j) = s.value() / ljj;
    }
  }
  return lower;
}

Vector choleskySolve(const DenseMatrix& lower, std::span<const double> rhs) {
  const std::size_t n = lower.rows();
  if (rhs.size() != n) throw ContractError("choleskySolve: rhs length mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum s;
    s.add(rhs[i]);
    for (std::size_t k = 0; k < i; ++k) s.add(-lower(i, k) * y[k]);
    y[i] = s.value() / lower(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    CompensatedSum s;
    s.add(y[ii]);
    for (std::size_t k = ii + 1; k < n; ++k) s.add(-lower(k, ii) * x[k]);
    x[ii] = s.value() / lower(ii, ii);
  }
  return x;
}

Vector leastSquares(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() < a.cols()) throw ContractError("leastSquares: system is underdetermined");
  if (b.size() != a.rows()) throw ContractError("leastSquares: rhs length mismatch");
  const DenseMatrix lower = cholesky(gramColumns(a));
  return choleskySolve(lower, matvecTransposed(a, b));
}

Vector leastNorm(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() > a.cols()) throw ContractError("leastNorm: system is overdetermined");
  if (b.size() != a.rows()) throw ContractError("leastNorm: rhs length mismatch");
  const DenseMatrix lower = cholesky(gramRows(a));
  return matvecTransposed(a, choleskySolve(lower, b));
}

Vector symmetricEigenvalues(DenseMatrix s) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw ContractError("symmetricEigenvalues: matrix is not square");

  auto converged = [&] {
    double maxDiag = 0.0;
    double maxOff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      maxDiag = std::max(maxDiag, std::abs(s(i, i)));
      for (std::size_t j = i + 1; j < n; ++j) maxOff = std::max(maxOff, std::abs(s(i, j)));
    }
    return maxOff <= tolerance::kJacobiOffDiag * maxDiag;
  };

  int sweep = 0;
  while (!converged()) {
    if (sweep++ == tolerance::kJacobiMaxSweeps) {
      throw NumericalError("Jacobi eigenvalue iteration did not converge in " +
                           std::to_string(tolerance::kJacobiMaxSweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (apq == 0.0) continue;
        // Rotation annihilating s(p,q).
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p);
          const double skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k);
          const double sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        s(p, q) = s(q, p) = 0.0;
      }
    }
  }

  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double minSingularValue(const DenseMatrix& a) {
  if (a.rows() < a.cols()) throw ContractError("minSingularValue: matrix has more columns than rows");
  const Vector eig = symmetricEigenvalues(gramColumns(a));
  return std::sqrt(std::max(0.0, eig.front()));
}

}  // namespace rowaction
