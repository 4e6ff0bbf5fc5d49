#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kirchhoff::csv {

/// Shortest round-trip-safe rendering: 17 significant digits, '.' decimal point.
std::string number(double x);

/// Writes one comma-separated row terminated by '\n'.
void write_row(std::ostream& os, std::span<const double> values);
void write_header(std::ostream& os, const std::vector<std::string>& names);

/// Two-column numeric table (x, y); blank lines and lines starting with '#' are skipped,
/// a non-numeric first line is treated as a header.
std::vector<std::pair<double, double>> read_two_column(const std::string& path);

}  // namespace kirchhoff::csv
