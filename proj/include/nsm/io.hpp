#pragma once
// CSV helpers. Numbers are written with 17 significant digits so the files round-trip
// doubles exactly and can be compared byte for byte.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

#include "nsm/core.hpp"

namespace nsm::io {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << fmt17(v);
        first = false;
    }
    os << '\n';
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file " + path.string());
    return os;
}

} // namespace nsm::io
