#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace tgcli {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double value);

double parse_double(const std::string& text);
std::uint64_t parse_u64(const std::string& text);

// RFC-4180-style quoting: fields containing comma, quote, CR, or LF are
// quoted, embedded quotes doubled. Rows end with '\n'.
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // -1 when the column is absent.
  int column(const std::string& name) const;
  int require_column(const std::string& name) const;
  const std::string& cell(std::size_t row, int col) const;
};

// Parses a CSV file with a header row. Tolerates CRLF and a missing
// final newline. Throws std::runtime_error on malformed input.
CsvTable read_csv(const std::string& path);

}  // namespace tgcli
