#pragma once

// Deterministic artifact serialization.  Every float is written with 17
// significant digits and no file carries timestamps or environment state, so
// re-running a seeded experiment reproduces each artifact byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sse/errors.hpp"

namespace sse {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw ConfigError("cannot create output directory '" +
                                  path.parent_path().string() + "': " + ec.message());
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path.string() + "'");
    return out;
}

// One CSV table: fixed header, rows of preformatted cells, optional trailing
// comment lines (prefixed with '#') for informational footers.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header)
        : out_(open_output(path)) {
        out_ << header << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

private:
    std::ofstream out_;
};

}  // namespace sse
