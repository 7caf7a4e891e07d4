#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace persona::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and line
// breaks. Accepts LF or CRLF record terminators. A trailing empty line is not
// a record.
std::vector<Row> Parse(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string EscapeField(std::string_view field);

std::string FormatRow(const Row& row);

}  // namespace persona::csv
