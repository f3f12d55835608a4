#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace colourrisk {

/// A parsed delimiter-separated file: header plus string cells.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based physical line number of each row, for error messages.
  std::vector<std::size_t> lines;

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
  std::string location(std::size_t row) const;
};

/// RFC 4180 style reader: quoted fields, doubled quotes, CRLF or LF.
/// Lines starting with '#' before the header are skipped (provenance lines).
CsvTable read_csv(std::istream& in, std::string source, char delimiter = ',');
CsvTable read_csv_file(const std::string& path, char delimiter = ',');

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

/// Shortest decimal representation that round-trips; NaN is written as "NA".
std::string format_double(double value);
/// Fixed-point formatting, for human-facing tables.
std::string format_fixed(double value, int decimals);

std::string csv_escape(std::string_view cell);
std::string_view trim(std::string_view text);

}  // namespace colourrisk
