#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pgl/errors.hpp"
#include "pgl/grid.hpp"

namespace pgl {

// Plain-text grid field format, shared by height maps and exported mode
// fields. Line 1: "HMAP1 nx ny dx_um dy_um x0_um y0_um", then ny lines of
// nx space-separated values.

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace detail

inline void write_field(const Grid& grid, const std::vector<double>& values,
                        const std::string& path) {
    if (values.size() != grid.size())
        throw validation_error("write_field: value count does not match grid");
    std::ofstream out(path);
    if (!out) throw io_error("write_field: cannot open " + path);
    out << "HMAP1 " << grid.nx << ' ' << grid.ny << ' '
        << detail::fmt_double(grid.dx) << ' ' << detail::fmt_double(grid.dy) << ' '
        << detail::fmt_double(grid.x0) << ' ' << detail::fmt_double(grid.y0) << '\n';
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            if (i) out << ' ';
            out << detail::fmt_double(values[grid.idx(i, j)]);
        }
        out << '\n';
    }
    if (!out) throw io_error("write_field: write failed for " + path);
}

inline std::pair<Grid, std::vector<double>> read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("read_field: cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw parse_error(path + ": line 1: empty file");
    std::istringstream header(line);
    std::string magic;
    Grid grid;
    if (!(header >> magic >> grid.nx >> grid.ny >> grid.dx >> grid.dy >> grid.x0 >> grid.y0) ||
        magic != "HMAP1")
        throw parse_error(path + ": line 1: expected 'HMAP1 nx ny dx dy x0 y0' header");
    grid.validate();

    std::vector<double> values(grid.size());
    for (int j = 0; j < grid.ny; ++j) {
        if (!std::getline(in, line))
            throw parse_error(path + ": line " + std::to_string(j + 2) +
                              ": expected " + std::to_string(grid.ny) + " data rows, got " +
                              std::to_string(j));
        std::istringstream row(line);
        for (int i = 0; i < grid.nx; ++i) {
            if (!(row >> values[grid.idx(i, j)]))
                throw parse_error(path + ": line " + std::to_string(j + 2) +
                                  ": expected " + std::to_string(grid.nx) + " values");
        }
        double extra;
        if (row >> extra)
            throw parse_error(path + ": line " + std::to_string(j + 2) +
                              ": more than " + std::to_string(grid.nx) + " values");
    }
    return {grid, std::move(values)};
}

} // namespace pgl
