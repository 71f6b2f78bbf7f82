#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace cavtherm::detail {

// 12 significant digits, locale-independent, byte-stable across runs.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline void put_row(std::ostream& os, const std::string& row) {
    os << row << "\n"; // LF endings
}

} // namespace cavtherm::detail
