#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pgl/errors.hpp"

namespace pgl {

// Uniform 2D node grid. Node (i,j) sits at (x0 + i*dx, y0 + j*dy).
// Lengths are in micrometers throughout.
struct Grid {
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0; // um
    double x0 = 0.0, y0 = 0.0; // um

    void validate() const {
        if (nx < 8 || ny < 8)
            throw validation_error("Grid: nx and ny must be >= 8");
        if (dx <= 0.0 || dy <= 0.0)
            throw validation_error("Grid: dx and dy must be > 0");
        if (std::abs(dx - dy) > 1e-12 * dx)
            throw validation_error("Grid: square cells required (dx == dy)");
    }

    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    std::size_t idx(int i, int j) const { return std::size_t(j) * nx + i; }

    double x(int i) const { return x0 + i * dx; }
    double y(int j) const { return y0 + j * dy; }
    double x_max() const { return x0 + (nx - 1) * dx; }
    double y_max() const { return y0 + (ny - 1) * dy; }
    double x_center() const { return x0 + 0.5 * (nx - 1) * dx; }
    double y_center() const { return y0 + 0.5 * (ny - 1) * dy; }

    bool same_shape(const Grid& o) const {
        return nx == o.nx && ny == o.ny &&
               std::abs(dx - o.dx) <= 1e-12 * dx &&
               std::abs(dy - o.dy) <= 1e-12 * dy;
    }
};

// Builds a grid centered on (0,0) covering at least extent_x by extent_y,
// with odd node counts so the grid center is a node (mirror symmetry maps
// nodes to nodes).
inline Grid make_centered_grid(double extent_x, double extent_y, double dx) {
    if (dx <= 0.0) throw validation_error("make_centered_grid: dx must be > 0");
    auto nodes = [dx](double ext) {
        int n = int(std::ceil(ext / dx)) + 1;
        if (n % 2 == 0) ++n;
        return n < 9 ? 9 : n;
    };
    Grid g;
    g.nx = nodes(extent_x);
    g.ny = nodes(extent_y);
    g.dx = g.dy = dx;
    g.x0 = -0.5 * (g.nx - 1) * dx;
    g.y0 = -0.5 * (g.ny - 1) * dx;
    return g;
}

// Polymer surface heights in nm on a grid.
struct HeightMap {
    Grid grid;
    std::vector<double> h; // nm, row-major (j*nx + i)

    double& at(int i, int j) { return h[grid.idx(i, j)]; }
    double at(int i, int j) const { return h[grid.idx(i, j)]; }
};

// Potential V/h in THz on a grid (non-negative; the solver subtracts it).
struct PotentialMap {
    Grid grid;
    std::vector<double> v; // THz, row-major

    double& at(int i, int j) { return v[grid.idx(i, j)]; }
    double at(int i, int j) const { return v[grid.idx(i, j)]; }
};

} // namespace pgl
