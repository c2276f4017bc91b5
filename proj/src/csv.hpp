#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace genepy::detail {

// Minimal RFC 4180 reader: comma separator, optional double quotes, CRLF or LF.
// Blank lines are skipped. Unquoted fields are trimmed of spaces and tabs.
struct CsvRow {
  std::size_t line = 0;  // 1-based source line
  std::vector<std::string> fields;
};

std::vector<CsvRow> read_csv(std::string_view text);

// Quotes a field only when it needs it.
std::string csv_field(std::string_view value);

}  // namespace genepy::detail
