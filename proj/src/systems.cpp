#include "rowaction/systems.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rowaction/errors.hpp"
#include "rowaction/csv.hpp"

namespace rowaction {

LinearSystem::LinearSystem(DenseMatrix a, Vector b, std::optional<Vector> reference)
    : a_(std::move(a)), b_(std::move(b)), reference_(std::move(reference)) {
  if (b_.size() != a_.rows()) throw ContractError("LinearSystem: rhs length does not match rows");
  if (a_.rows() < a_.cols()) throw ContractError("LinearSystem: fewer equations than unknowns");
  for (double v : b_) {
    if (!std::isfinite(v)) throw ContractError("LinearSystem: rhs contains a non-finite entry");
  }
  for (std::size_t i = 0; i < a_.rows(); ++i) {
    if (std::abs(norm2(a_.row(i)) - 1.0) > kUnitRowTol) {
      throw ContractError("LinearSystem: row " + std::to_string(i) + " is not unit norm");
    }
  }
  if (reference_) {
    if (reference_->size() != a_.cols()) throw ContractError("LinearSystem: reference length mismatch");
    error_ = subtract(matvec(a_, *reference_), b_);
  }
}

double LinearSystem::errorInf() const {
  if (!error_) throw ContractError("system has no reference solution, so ‖e‖∞ is unknown");
  return normInf(*error_);
}

std::string_view toString(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::GaussianNoise: return "gaussian-noise";
    case GeneratorKind::SpikyNoise: return "spiky-noise";
    case GeneratorKind::Correlated: return "correlated";
    case GeneratorKind::PureNoise: return "pure-noise";
  }
  return "unknown";
}

GeneratorKind parseGeneratorKind(std::string_view name) {
  for (auto kind : {GeneratorKind::GaussianNoise, GeneratorKind::SpikyNoise,
                    GeneratorKind::Correlated, GeneratorKind::PureNoise}) {
    if (toString(kind) == name) return kind;
  }
  throw ContractError("unknown generator kind '" + std::string(name) + "'");
}

void GeneratorSpec::validate() const {
  if (n < 1) throw ContractError("generator: n must be at least 1");
  if (m <= n) throw ContractError("generator: m must exceed n");
  if (kind == GeneratorKind::SpikyNoise && spikeCount > m) throw ContractError("generator: spike count exceeds m");
  if (!(noiseStd >= 0.0)) throw ContractError("generator: noise std must be nonnegative");
  if (!(rowStd >= 0.0)) throw ContractError("generator: row std must be nonnegative");
  if (!std::isfinite(spikeMagnitude) || !std::isfinite(rowMean)) {
    throw ContractError("generator: non-finite parameter");
  }
}

DenseMatrix gaussianMatrix(std::size_t rows, std::size_t cols, double mean, double stddev, Rng& rng) {
  std::vector<double> entries(rows * cols);
  for (double& v : entries) v = rng.normal(mean, stddev);
  return DenseMatrix(rows, cols, std::move(entries));
}

RawSystem generateRaw(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const bool correlated = spec.kind == GeneratorKind::Correlated;
  const double mean = correlated ? spec.rowMean : 0.0;
  const double stddev = correlated ? spec.rowStd : 1.0 / std::sqrt(static_cast<double>(spec.n));
  DenseMatrix a = gaussianMatrix(spec.m, spec.n, mean, stddev, rng);

  const Vector ones(spec.n, 1.0);
  Vector b(spec.m, 0.0);
  switch (spec.kind) {
    case GeneratorKind::GaussianNoise:
    case GeneratorKind::Correlated:
      b = matvec(a, ones);
      for (double& v : b) v += rng.normal(0.0, spec.noiseStd);
      break;
    case GeneratorKind::SpikyNoise:
      b = matvec(a, ones);
      for (std::size_t j : rng.sampleWithoutReplacement(spec.m, spec.spikeCount)) {
        b[j] += spec.spikeMagnitude;
      }
      break;
    case GeneratorKind::PureNoise:
      for (double& v : b) v = rng.normal(0.0, spec.noiseStd);
      break;
  }
  return {std::move(a), std::move(b)};
}

std::pair<DenseMatrix, Vector> normalizeRows(const DenseMatrix& a, std::span<const double> b) {
  if (b.size() != a.rows()) throw ContractError("normalizeRows: rhs length mismatch");
  DenseMatrix out = a;
  Vector rhs(b.begin(), b.end());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double norm = norm2(a.row(i));
    if (!(norm >= tolerance::kZeroRow)) throw DegenerateRowError(i);
    for (double& v : out.row(i)) v /= norm;
    rhs[i] /= norm;
  }
  return {std::move(out), std::move(rhs)};
}

LinearSystem withLeastSquaresReference(const DenseMatrix& a, std::span<const double> b) {
  auto [normalized, rhs] = normalizeRows(a, b);
  Vector reference = leastSquares(normalized, rhs);
  return LinearSystem(std::move(normalized), std::move(rhs), std::move(reference));
}

LinearSystem generate(const GeneratorSpec& spec) {
  const RawSystem raw = generateRaw(spec);
  return withLeastSquaresReference(raw.a, raw.b);
}

Vector residual(const LinearSystem& sys, std::span<const double> x) {
  if (x.size() != sys.cols()) throw ContractError("residual: iterate length mismatch");
  return subtract(matvec(sys.matrix(), x), sys.rhs());
}

void writeSystem(std::ostream& out, const LinearSystem& sys) {
  const auto& a = sys.matrix();
  out << a.rows() << ' ' << a.cols() << ' ' << (sys.hasReference() ? 1 : 0) << '\n';
  std::string line;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    line.clear();
    for (double v : a.row(i)) {
      line += formatReal(v);
      line += ' ';
    }
    line += formatReal(sys.rhs()[i]);
    out << line << '\n';
  }
  if (sys.hasReference()) {
    line.clear();
    const auto& ref = *sys.reference();
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (j) line += ' ';
      line += formatReal(ref[j]);
    }
    out << line << '\n';
  }
}

namespace {

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string tok;
    if (!(in_ >> tok)) {
      throw ParseError(line_, std::string("unexpected end of input, expected ") + what);
    }
    return tok;
  }

  double real(const char* what) {
    const std::string tok = next(what);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(line_, "expected a real number for " + std::string(what) + ", got '" + tok + "'");
    }
    return v;
  }

  std::size_t count(const char* what) {
    const std::string tok = next(what);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(line_, "expected a count for " + std::string(what) + ", got '" + tok + "'");
    }
    return v;
  }

  void setLine(std::size_t line) { line_ = line; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

}  // namespace

LinearSystem readSystem(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "missing header line");
  std::istringstream hs(header);
  TokenReader head(hs);
  const std::size_t m = head.count("m");
  const std::size_t n = head.count("n");
  const std::size_t hasRef = head.count("hasReference");
  if (hasRef > 1) throw ParseError(1, "hasReference must be 0 or 1");
  if (m == 0 || n == 0) throw ParseError(1, "empty system");

  std::vector<double> entries;
  entries.reserve(m * n);
  Vector b(m);
  std::string line;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(in, line)) throw ParseError(i + 2, "missing matrix row");
    std::istringstream ls(line);
    TokenReader row(ls);
    row.setLine(i + 2);
    for (std::size_t j = 0; j < n; ++j) entries.push_back(row.real("matrix entry"));
    b[i] = row.real("rhs entry");
    std::string extra;
    if (ls >> extra) throw ParseError(i + 2, "trailing token '" + extra + "'");
  }
  std::optional<Vector> reference;
  if (hasRef) {
    if (!std::getline(in, line)) throw ParseError(m + 2, "missing reference line");
    std::istringstream ls(line);
    TokenReader row(ls);
    row.setLine(m + 2);
    Vector ref(n);
    for (double& v : ref) v = row.real("reference entry");
    reference = std::move(ref);
  }
  return LinearSystem(DenseMatrix(m, n, std::move(entries)), std::move(b), std::move(reference));
}

void saveSystem(const std::string& path, const LinearSystem& sys) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  writeSystem(out, sys);
  if (!out) throw ContractError("write to '" + path + "' failed");
}

LinearSystem loadSystem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open '" + path + "' for reading");
  return readSystem(in);
}

}  // namespace rowaction
