#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlsg {

/// Shortest round-trip decimal form of a double (17 significant digits),
/// used by every CSV/JSON artifact so reruns diff cleanly.
std::string format_g17(double v);

/// Splits one CSV line on commas; no quoting (none of the artifacts need it).
std::vector<std::string> split_csv_line(const std::string& line);

/// Parses a double, throwing std::runtime_error naming the 1-based line on
/// failure.
double parse_csv_double(const std::string& field, std::size_t line_no);

} // namespace mlsg
