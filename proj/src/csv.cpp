#include "rowaction/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "rowaction/errors.hpp"

namespace rowaction {

std::string formatReal(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("formatReal: conversion failed");
  return std::string(buf.data(), ptr);
}

std::string formatReal(const std::optional<double>& v) { return v ? formatReal(*v) : std::string(); }

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ContractError("CSV has no column '" + name + "'");
}

namespace {

void writeLine(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::vector<std::string> splitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

void writeCsv(std::ostream& out, const CsvTable& table) {
  writeLine(out, table.header);
  for (const auto& row : table.rows) writeLine(out, row);
}

void writeCsvFile(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  writeCsv(out, table);
  if (!out) throw ContractError("write to '" + path + "' failed");
}

CsvTable readCsv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty CSV");
  table.header = splitLine(line);
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    auto cells = splitLine(line);
    if (cells.size() != table.header.size()) {
      throw ParseError(lineNo, "expected " + std::to_string(table.header.size()) + " cells, got " +
                                   std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable readCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open '" + path + "' for reading");
  return readCsv(in);
}

std::optional<double> parseOptionalReal(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ContractError("not a real number: '" + cell + "'");
  }
  return v;
}

}  // namespace rowaction
