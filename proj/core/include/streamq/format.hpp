#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace streamq {

/// Shortest decimal form of v that parses back to exactly v. Used for every
/// number written to config, trace and summary files, so emitted files are
/// both human-friendly and bit-exact to reload.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace streamq
