#include "mlsg/csv.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace mlsg {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_csv_double(const std::string& field, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("csv line " + std::to_string(line_no) +
                                 ": cannot parse number '" + field + "'");
    }
}

} // namespace mlsg
