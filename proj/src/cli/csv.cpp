#include "twoway/cli/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "twoway/error.hpp"

namespace twoway::cli {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_csv(std::ostream& out, const SignalLog& log) {
    for (std::size_t c = 0; c < SignalLog::column_names.size(); ++c)
        out << (c ? "," : "") << SignalLog::column_names[c];
    out << '\n';
    for (std::size_t k = 0; k < log.size(); ++k) {
        for (std::size_t c = 0; c < SignalLog::column_names.size(); ++c)
            out << (c ? "," : "") << format_number(log.column(c)[k]);
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const SignalLog& log) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    write_csv(out, log);
}

}  // namespace twoway::cli
