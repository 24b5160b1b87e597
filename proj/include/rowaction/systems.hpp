#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "rowaction/linalg.hpp"
#include "rowaction/rng.hpp"

namespace rowaction {

/// Row-normalized system Ax = b, optionally carrying a reference solution x
/// and its error vector e = Ax − b.
///
/// Invariants (checked on construction): every row has unit norm within
/// kUnitRowTol, m >= n, and errorVec is present exactly when reference is.
class LinearSystem {
 public:
  static constexpr double kUnitRowTol = 1e-12;

  LinearSystem(DenseMatrix a, Vector b, std::optional<Vector> reference = std::nullopt);

  const DenseMatrix& matrix() const noexcept { return a_; }
  const Vector& rhs() const noexcept { return b_; }
  const std::optional<Vector>& reference() const noexcept { return reference_; }
  const std::optional<Vector>& errorVec() const noexcept { return error_; }

  std::size_t rows() const noexcept { return a_.rows(); }
  std::size_t cols() const noexcept { return a_.cols(); }

  bool hasReference() const noexcept { return reference_.has_value(); }
  // ‖e‖∞; throws ContractError when no reference is attached.
  double errorInf() const;

  bool operator==(const LinearSystem&) const = default;

 private:
  DenseMatrix a_;
  Vector b_;
  std::optional<Vector> reference_;
  std::optional<Vector> error_;
};

enum class GeneratorKind { GaussianNoise, SpikyNoise, Correlated, PureNoise };

std::string_view toString(GeneratorKind kind);
GeneratorKind parseGeneratorKind(std::string_view name);  // throws ContractError

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::GaussianNoise;
  std::size_t m = 2000;
  std::size_t n = 50;
  // Pre-normalization std of ε. With N(0, 1/n) entries the signal A·1 has unit
  // variance per row, so this is roughly the inverse signal-to-noise ratio.
  double noiseStd = 0.01;
  std::size_t spikeCount = 50;
  double spikeMagnitude = 15.0;
  // Entry distribution for the correlated kind.
  double rowMean = 1.0;
  double rowStd = 0.5;
  std::uint64_t seed = 0;

  void validate() const;  // throws ContractError
};

// Matrix and right-hand side before row normalization.
struct RawSystem {
  DenseMatrix a;
  Vector b;
};

// Deterministic in spec (including seed). The A entries are drawn first in
// row-major order, then the right-hand side perturbation.
RawSystem generateRaw(const GeneratorSpec& spec);

/// Raw draw, row normalization, then reference = least-squares solution of the
/// normalized system.
LinearSystem generate(const GeneratorSpec& spec);

/// Scales each equation to unit row norm. Throws DegenerateRowError for a
/// row with norm below kZeroRow.
std::pair<DenseMatrix, Vector> normalizeRows(const DenseMatrix& a, std::span<const double> b);

// Ax − b.
Vector residual(const LinearSystem& sys, std::span<const double> x);

// Gaussian matrix with i.i.d. Normal(mean, stddev²) entries in row-major draw order.
DenseMatrix gaussianMatrix(std::size_t rows, std::size_t cols, double mean, double stddev, Rng& rng);

// Normalizes (A, b) and attaches the least-squares reference.
LinearSystem withLeastSquaresReference(const DenseMatrix& a, std::span<const double> b);

// Plain-text form: "m n hasReference", then m lines "a_i1 … a_in b_i", then
// optionally one line with the n reference entries. Reals are written in the
// shortest form that reads back to the same double.
void writeSystem(std::ostream& out, const LinearSystem& sys);
LinearSystem readSystem(std::istream& in);  // throws ParseError
void saveSystem(const std::string& path, const LinearSystem& sys);
LinearSystem loadSystem(const std::string& path);

}  // namespace rowaction
