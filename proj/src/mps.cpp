#include "rowaction/mps.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "rowaction/errors.hpp"

namespace rowaction {

std::size_t MpsProblem::constraintCount() const {
  std::size_t count = 0;
  for (const auto& r : rows)
    if (r.sense != RowSense::N) ++count;
  return count;
}

std::string_view toString(ColumnPolicy policy) {
  return policy == ColumnPolicy::Structural ? "structural" : "standard-form";
}

namespace {

enum class Section { None, Name, Rows, Columns, Rhs, Ranges, Bounds, End };

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

class Parser {
 public:
  MpsProblem parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size() && section_ != Section::End) {
      const std::size_t eol = std::min(text.find('\n', pos), text.size());
      ++lineNo_;
      processLine(text.substr(pos, eol - pos));
      pos = eol + 1;
    }
    if (!seenRows_) throw ParseError(lineNo_, "missing ROWS section");
    if (!seenColumns_) throw ParseError(lineNo_, "missing COLUMNS section");
    if (section_ != Section::End) throw ParseError(lineNo_, "missing ENDATA");
    return std::move(problem_);
  }

 private:
  void processLine(std::string_view line) {
    if (line.empty() || line[0] == '*') return;
    const auto tokens = tokenize(line);
    if (tokens.empty()) return;
    if (line[0] != ' ' && line[0] != '\t') {
      startSection(tokens, line);
      return;
    }
    switch (section_) {
      case Section::Rows: rowLine(tokens); break;
      case Section::Columns: columnLine(tokens); break;
      case Section::Rhs: rhsLine(tokens); break;
      case Section::Ranges:
      case Section::Bounds: break;
      default: throw ParseError(lineNo_, "data line outside of a section");
    }
  }

  void startSection(const std::vector<std::string_view>& tokens, std::string_view line) {
    const std::string_view key = tokens[0];
    if (key == "NAME") {
      section_ = Section::Name;
      if (tokens.size() > 1) {
        const auto at = line.find(tokens[1]);
        problem_.name = std::string(line.substr(at));
        while (!problem_.name.empty() && (problem_.name.back() == ' ' || problem_.name.back() == '\r')) {
          problem_.name.pop_back();
        }
      }
    } else if (key == "ROWS") {
      section_ = Section::Rows;
      seenRows_ = true;
    } else if (key == "COLUMNS") {
      section_ = Section::Columns;
      seenColumns_ = true;
    } else if (key == "RHS") {
      section_ = Section::Rhs;
    } else if (key == "RANGES" || key == "BOUNDS") {
      section_ = key == "RANGES" ? Section::Ranges : Section::Bounds;
      problem_.warnings.push_back("line " + std::to_string(lineNo_) + ": " + std::string(key) +
                                  " section ignored");
    } else if (key == "ENDATA") {
      section_ = Section::End;
    } else {
      throw ParseError(lineNo_, "unknown section keyword '" + std::string(key) + "'");
    }
  }

  void rowLine(const std::vector<std::string_view>& tokens) {
    if (tokens.size() != 2) throw ParseError(lineNo_, "ROWS line needs a sense and a name");
    RowSense sense;
    const std::string_view s = tokens[0];
    if (s == "N") sense = RowSense::N;
    else if (s == "E") sense = RowSense::E;
    else if (s == "L") sense = RowSense::L;
    else if (s == "G") sense = RowSense::G;
    else throw ParseError(lineNo_, "unknown row sense '" + std::string(s) + "'");
    std::string name(tokens[1]);
    if (rowIndex_.contains(name)) throw ParseError(lineNo_, "duplicate row '" + name + "'");
    rowIndex_.emplace(name, problem_.rows.size());
    problem_.rows.push_back({std::move(name), sense});
  }

  void columnLine(const std::vector<std::string_view>& tokens) {
    if (tokens.size() >= 2 && tokens[1] == "'MARKER'") {
      problem_.warnings.push_back("line " + std::to_string(lineNo_) + ": integrality marker ignored");
      return;
    }
    if (tokens.size() != 3 && tokens.size() != 5) {
      throw ParseError(lineNo_, "COLUMNS line needs a column and one or two (row, value) pairs");
    }
    const std::string col(tokens[0]);
    auto it = colIndex_.find(col);
    if (it == colIndex_.end()) {
      it = colIndex_.emplace(col, problem_.columns.size()).first;
      problem_.columns.push_back(col);
    }
    for (std::size_t t = 1; t + 1 < tokens.size(); t += 2) {
      const std::size_t row = lookupRow(tokens[t]);
      const double value = number(tokens[t + 1]);
      const auto key = std::make_pair(row, it->second);
      auto found = entryIndex_.find(key);
      if (found == entryIndex_.end()) {
        entryIndex_.emplace(key, problem_.coefficients.size());
        problem_.coefficients.push_back({row, it->second, value});
      } else {
        problem_.coefficients[found->second].value += value;
      }
    }
  }

  void rhsLine(const std::vector<std::string_view>& tokens) {
    // An odd token count carries a leading RHS set name.
    const std::size_t first = tokens.size() % 2;
    if (tokens.size() < 2 || tokens.size() > 5) throw ParseError(lineNo_, "malformed RHS line");
    if (first == 1) {
      const std::string set(tokens[0]);
      if (rhsSet_.empty()) {
        rhsSet_ = set;
      } else if (set != rhsSet_) {
        if (!warnedExtraRhs_) {
          problem_.warnings.push_back("line " + std::to_string(lineNo_) + ": additional RHS set '" + set +
                                      "' ignored");
          warnedExtraRhs_ = true;
        }
        return;
      }
    }
    for (std::size_t t = first; t + 1 < tokens.size(); t += 2) {
      const std::size_t row = lookupRow(tokens[t]);
      const double value = number(tokens[t + 1]);
      if (problem_.rows[row].sense == RowSense::N) continue;  // objective constant
      problem_.rhs[row] = value;
    }
  }

  std::size_t lookupRow(std::string_view name) const {
    const auto it = rowIndex_.find(std::string(name));
    if (it == rowIndex_.end()) throw ParseError(lineNo_, "row '" + std::string(name) + "' not declared in ROWS");
    return it->second;
  }

  double number(std::string_view tok) const {
    double v = 0.0;
    const char* begin = tok.data();
    if (!tok.empty() && tok[0] == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(lineNo_, "non-numeric value '" + std::string(tok) + "'");
    }
    return v;
  }

  struct PairHash {
    std::size_t operator()(const std::pair<std::size_t, std::size_t>& p) const noexcept {
      return std::hash<std::size_t>()(p.first * 1000003u ^ p.second);
    }
  };

  MpsProblem problem_;
  Section section_ = Section::None;
  std::size_t lineNo_ = 0;
  bool seenRows_ = false;
  bool seenColumns_ = false;
  bool warnedExtraRhs_ = false;
  std::string rhsSet_;
  std::unordered_map<std::string, std::size_t> rowIndex_;
  std::unordered_map<std::string, std::size_t> colIndex_;
  std::unordered_map<std::pair<std::size_t, std::size_t>, std::size_t, PairHash> entryIndex_;
};

}  // namespace

MpsProblem parseMps(std::string_view text) { return Parser().parse(text); }

MpsProblem readMpsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseMps(buf.str());
}

std::pair<DenseMatrix, Vector> extractSystem(const MpsProblem& problem, ColumnPolicy policy) {
  std::vector<std::size_t> denseRow(problem.rows.size(), SIZE_MAX);
  std::vector<std::size_t> slackCol(problem.rows.size(), SIZE_MAX);
  std::size_t m = 0;
  std::size_t slacks = 0;
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const RowSense sense = problem.rows[i].sense;
    if (sense == RowSense::N) continue;
    denseRow[i] = m++;
    if (policy == ColumnPolicy::StandardForm && sense != RowSense::E) {
      slackCol[i] = problem.columns.size() + slacks++;
    }
  }
  if (m == 0) throw ContractError("MPS problem '" + problem.name + "' has no constraint rows");
  const std::size_t n = problem.columns.size() + slacks;
  if (n == 0) throw ContractError("MPS problem '" + problem.name + "' has no columns");

  DenseMatrix a(m, n);
  for (const auto& e : problem.coefficients) {
    if (denseRow[e.row] != SIZE_MAX) a(denseRow[e.row], e.col) += e.value;
  }
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    if (slackCol[i] != SIZE_MAX) a(denseRow[i], slackCol[i]) = problem.rows[i].sense == RowSense::L ? 1.0 : -1.0;
  }
  Vector b(m, 0.0);
  for (const auto& [row, value] : problem.rhs) {
    if (denseRow[row] != SIZE_MAX) b[denseRow[row]] = value;
  }
  return {std::move(a), std::move(b)};
}

RawSystem stackWithIdentity(const DenseMatrix& a, std::span<const double> b, const TransformSpec& spec) {
  if (a.rows() >= a.cols()) {
    throw ContractError("overdetermine: expected an underdetermined system (rows < cols)");
  }
  if (!(spec.noiseStd >= 0.0)) throw ContractError("overdetermine: noise std must be nonnegative");
  if (b.size() != a.rows()) throw ContractError("overdetermine: rhs length mismatch");
  const Vector leastNormSolution = leastNorm(a, b);

  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix stacked(m + n, n);
  Vector rhs(m + n);
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(a.row(i).begin(), a.row(i).end(), stacked.row(i).begin());
    rhs[i] = b[i];
  }
  Rng rng(spec.seed);
  for (std::size_t j = 0; j < n; ++j) {
    stacked(m + j, j) = 1.0;
    rhs[m + j] = leastNormSolution[j] + rng.normal(0.0, spec.noiseStd);
  }
  return {std::move(stacked), std::move(rhs)};
}

LinearSystem overdetermine(const DenseMatrix& a, std::span<const double> b, const TransformSpec& spec) {
  const RawSystem raw = stackWithIdentity(a, b, spec);
  return withLeastSquaresReference(raw.a, raw.b);
}

}  // namespace rowaction
