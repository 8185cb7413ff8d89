#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twofreq::csv {

/// Splits one CSV record. Handles double-quoted fields with "" escapes;
/// records never span lines in the data we read.
std::vector<std::string> split_record(std::string_view line);

/// Reads the next non-empty line (CR stripped). Returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& line_number);

/// Parses a numeric cell. Empty, non-numeric, and non-finite cells return nullopt.
std::optional<double> parse_number(std::string_view cell);

/// Shortest decimal text that round-trips to the same double. NaN is written
/// as an empty cell.
std::string format_number(double value);

/// Quotes a field if it contains a comma, quote, or whitespace at the ends.
std::string quote(std::string_view field);

}  // namespace twofreq::csv
