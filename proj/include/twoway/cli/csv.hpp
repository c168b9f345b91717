#pragma once

#include <iosfwd>
#include <string>

#include "twoway/sim.hpp"

namespace twoway::cli {

/// %.9g; non-finite values print as nan, inf or -inf.
std::string format_number(double v);

/// Header row in SignalLog::column_names order, then one row per sample.
void write_csv(std::ostream& out, const SignalLog& log);
void write_csv_file(const std::string& path, const SignalLog& log);

}  // namespace twoway::cli
