#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rowaction {

// Shortest decimal text that parses back to exactly the same double.
std::string formatReal(double v);
std::string formatReal(const std::optional<double>& v);  // empty when absent

// Minimal comma-separated table: header plus rows of raw cells. No quoting;
// every cell written by this library is numeric or a bare identifier.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws ContractError when absent.
  std::size_t column(const std::string& name) const;
};

void writeCsv(std::ostream& out, const CsvTable& table);
void writeCsvFile(const std::string& path, const CsvTable& table);
CsvTable readCsv(std::istream& in);  // throws ParseError
CsvTable readCsvFile(const std::string& path);

// Parses a cell as a real; empty cells give nullopt.
std::optional<double> parseOptionalReal(const std::string& cell);

}  // namespace rowaction
