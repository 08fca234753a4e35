#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace chebdea::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends, optional UTF-8 BOM.
// Blank lines are skipped.
std::vector<Row> read(std::istream& in);

// Quotes a field only when it contains a delimiter, quote, or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace chebdea::csv
