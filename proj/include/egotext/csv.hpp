#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace egotext {

// Minimal RFC 4180 handling: quoted fields may hold commas and doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index or -1.
  int column(std::string_view name) const;
};

// Parses text with a header row; blank lines are skipped. Header names are
// trimmed of surrounding spaces.
CsvTable parse_csv(std::string_view text);

}  // namespace egotext
