#pragma once

// MPS reader for Netlib-style LP files and the transform that turns an
// underdetermined constraint system into an overdetermined, slightly
// inconsistent one with a known near-solution.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rowaction/linalg.hpp"
#include "rowaction/systems.hpp"

namespace rowaction {

enum class RowSense { N, E, L, G };

struct MpsRow {
  std::string name;
  RowSense sense = RowSense::E;
};

struct MpsEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

struct MpsProblem {
  std::string name;
  std::vector<MpsRow> rows;  // declaration order, objective rows included
  std::vector<std::string> columns;
  std::vector<MpsEntry> coefficients;  // one entry per (row, col); repeats are summed
  std::map<std::size_t, double> rhs;   // row index → value; absent rows are 0
  std::vector<std::string> warnings;

  std::size_t constraintCount() const;  // rows with sense other than N
};

/// Free-format (whitespace-token) MPS parser. Sections: NAME, ROWS, COLUMNS,
/// RHS, RANGES, BOUNDS, ENDATA; '*' starts a comment line. RANGES and BOUNDS
/// are skipped with a warning. Throws ParseError with the line number.
MpsProblem parseMps(std::string_view text);
MpsProblem readMpsFile(const std::string& path);

enum class ColumnPolicy {
  // One column per declared structural variable; every row read as Ax = b.
  Structural,
  // Structural columns followed by one slack per L row (+1) and G row (−1),
  // the usual standard form  Ax + s = b.
  StandardForm,
};

std::string_view toString(ColumnPolicy policy);

/// Dense constraint system: non-objective rows in declaration order,
/// columns in declaration order (then slacks). Throws ContractError when the
/// problem has no constraint rows.
std::pair<DenseMatrix, Vector> extractSystem(const MpsProblem& problem,
                                             ColumnPolicy policy = ColumnPolicy::StandardForm);

struct TransformSpec {
  double noiseStd = 1e-6;
  std::uint64_t seed = 0;
};

// [A; I] over [b; x_LN + ε] before normalization, x_LN = leastNorm(A, b).
RawSystem stackWithIdentity(const DenseMatrix& a, std::span<const double> b, const TransformSpec& spec);

/// stackWithIdentity, then row normalization and the least-squares reference.
/// The result has A.rows + A.cols equations in A.cols unknowns.
LinearSystem overdetermine(const DenseMatrix& a, std::span<const double> b, const TransformSpec& spec);

}  // namespace rowaction
