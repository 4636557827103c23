#pragma once

#include "qcov/grid.hpp"

#include <json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace qcov {

inline constexpr const char* version = "0.1.0";

using Json = nlohmann::ordered_json;

/// Shortest-roundtrip-safe rendering of a double; identical input gives identical text.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// The first line of every text output: "# " followed by compact JSON.
inline std::string header_line(const Json& header) { return "# " + header.dump() + "\n"; }

/**
 * Wavefunction text format.
 *
 *   # {"format":"qcov-wavefunction","version":...,"dim":d,"points_per_axis":N,"box_length":L,...}
 *   re im
 *   ...
 *
 * One line per grid point in row-major flat order (axis 0 slowest).
 * Extra header members (config, seed) are preserved but not interpreted.
 */
inline void write_wavefunction(std::ostream& os, const Wavefunction& psi, const Json& extra = Json::object()) {
    const GridSpec& grid = psi.grid();
    Json header = {{"format", "qcov-wavefunction"},
                   {"version", version},
                   {"dim", grid.dim()},
                   {"points_per_axis", grid.points_per_axis()},
                   {"box_length", grid.box_length()}};
    for (const auto& [key, value] : extra.items()) header[key] = value;
    os << header_line(header);
    for (std::size_t i = 0; i < psi.size(); ++i)
        os << format_double(psi[i].real()) << ' ' << format_double(psi[i].imag()) << '\n';
}

struct LoadedWavefunction {
    Wavefunction psi;
    Json header;
};

inline LoadedWavefunction read_wavefunction(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw precondition_error("read_wavefunction: missing '# {json}' header line");
    Json header;
    try {
        header = Json::parse(line.substr(2));
    } catch (const nlohmann::json::exception& e) {
        throw precondition_error(std::string("read_wavefunction: bad header: ") + e.what());
    }
    if (header.value("format", "") != "qcov-wavefunction")
        throw precondition_error("read_wavefunction: not a qcov-wavefunction file");
    const GridSpec grid = make_grid(header.at("dim").get<int>(), header.at("points_per_axis").get<int>(),
                                    header.at("box_length").get<double>());
    Wavefunction psi(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::getline(is, line)) throw precondition_error("read_wavefunction: truncated data");
        std::istringstream ls(line);
        double re = 0.0, im = 0.0;
        if (!(ls >> re >> im)) throw precondition_error("read_wavefunction: malformed line " + std::to_string(i + 2));
        psi[i] = {re, im};
    }
    while (std::getline(is, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            throw precondition_error("read_wavefunction: trailing data after the last grid point");
    return {std::move(psi), std::move(header)};
}

}  // namespace qcov
