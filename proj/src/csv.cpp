#include "kirchhoff/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "kirchhoff/errors.hpp"

namespace kirchhoff::csv {

std::string number(double x) { return fmt::format("{:.17g}", x); }

void write_row(std::ostream& os, std::span<const double> values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += number(values[i]);
    }
    line += '\n';
    os << line;
}

void write_header(std::ostream& os, const std::vector<std::string>& names) {
    std::string line;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) line += ',';
        line += names[i];
    }
    line += '\n';
    os << line;
}

std::vector<std::pair<double, double>> read_two_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open table file " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        std::istringstream row(line);
        double x = 0.0, y = 0.0;
        if (!(row >> x >> y)) {
            if (rows.empty() && lineno == 1) continue;  // header
            throw ParseError(fmt::format("{}:{}: expected two numbers", path, lineno));
        }
        rows.emplace_back(x, y);
    }
    if (rows.empty()) throw ParseError("table file " + path + " has no rows");
    return rows;
}

}  // namespace kirchhoff::csv
