#pragma once

#include <cstdio>
#include <string>

namespace conproc::detail {

// Shortest text that round-trips a double through strtod.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace conproc::detail
