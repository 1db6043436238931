#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pgl/errors.hpp"
#include "pgl/field_io.hpp"
#include "pgl/grid.hpp"

namespace pgl {

// Minimum clearance between any printed structure and the grid boundary.
// Keeps the Dirichlet boundary influence on bound modes negligible.
inline constexpr double kStructureMargin = 2.0; // um

// SSH pillar chain: 2*n_cells sites on a line, spacings alternating between
// d_i (intra-cell) and d_o (inter-cell).
struct SshGeometry {
    int n_cells = 0;
    double d_i = 0.0; // um
    double d_o = 0.0; // um
    double r = 0.0;   // um
    double h_s = 0.0; // nm

    void validate() const {
        if (n_cells < 2) throw validation_error("SshGeometry: n_cells must be >= 2");
        if (d_i <= 0.0 || d_o <= 0.0)
            throw validation_error("SshGeometry: d_i and d_o must be > 0");
        if (r <= 0.0) throw validation_error("SshGeometry: r must be > 0");
        if (h_s < 0.0) throw validation_error("SshGeometry: h_s must be >= 0");
    }
};

namespace detail {

inline void check_extent(const Grid& g, double xlo, double xhi, double ylo, double yhi,
                         const char* what) {
    const double eps = 1e-9;
    if (xlo - kStructureMargin < g.x0 - eps || xhi + kStructureMargin > g.x_max() + eps ||
        ylo - kStructureMargin < g.y0 - eps || yhi + kStructureMargin > g.y_max() + eps)
        throw geometry_error(std::string(what) +
                             ": structure does not fit on the grid with a " +
                             std::to_string(kStructureMargin) + " um margin");
}

} // namespace detail

inline HeightMap make_box(const Grid& grid, double side, double h_s,
                          std::pair<double, double> center = {0.0, 0.0}) {
    grid.validate();
    if (side < 0.0) throw validation_error("make_box: side must be >= 0");
    if (h_s < 0.0) throw validation_error("make_box: h_s must be >= 0");
    const auto [cx, cy] = center;
    if (side > 0.0)
        detail::check_extent(grid, cx - side / 2, cx + side / 2,
                             cy - side / 2, cy + side / 2, "make_box");
    HeightMap hm{grid, std::vector<double>(grid.size(), 0.0)};
    if (side == 0.0 || h_s == 0.0) return hm;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            if (std::abs(grid.x(i) - cx) <= side / 2 &&
                std::abs(grid.y(j) - cy) <= side / 2)
                hm.at(i, j) = h_s;
    return hm;
}

// Union of disks; overlapping disks merge at the same height (no stacking).
inline HeightMap make_pillars(const Grid& grid,
                              const std::vector<std::pair<double, double>>& centers,
                              double r, double h_s) {
    grid.validate();
    if (r <= 0.0) throw validation_error("make_pillars: r must be > 0");
    if (h_s < 0.0) throw validation_error("make_pillars: h_s must be >= 0");
    for (const auto& [cx, cy] : centers)
        detail::check_extent(grid, cx - r, cx + r, cy - r, cy + r, "make_pillars");
    HeightMap hm{grid, std::vector<double>(grid.size(), 0.0)};
    const double r2 = r * r;
    for (const auto& [cx, cy] : centers) {
        const int ilo = std::max(0, int(std::floor((cx - r - grid.x0) / grid.dx)));
        const int ihi = std::min(grid.nx - 1, int(std::ceil((cx + r - grid.x0) / grid.dx)));
        const int jlo = std::max(0, int(std::floor((cy - r - grid.y0) / grid.dy)));
        const int jhi = std::min(grid.ny - 1, int(std::ceil((cy + r - grid.y0) / grid.dy)));
        for (int j = jlo; j <= jhi; ++j)
            for (int i = ilo; i <= ihi; ++i) {
                const double ddx = grid.x(i) - cx, ddy = grid.y(j) - cy;
                if (ddx * ddx + ddy * ddy <= r2) hm.at(i, j) = h_s;
            }
    }
    return hm;
}

// Site centers of an SSH chain laid out along x through the grid center.
// 2*n_cells sites; the 2*n_cells-1 gaps alternate d_i, d_o, ..., d_i.
inline std::vector<std::pair<double, double>>
ssh_chain_centers(const Grid& grid, const SshGeometry& geo) {
    geo.validate();
    const double span = (geo.n_cells - 1) * (geo.d_i + geo.d_o) + geo.d_i;
    const double cy = grid.y_center();
    double x = grid.x_center() - span / 2;
    std::vector<std::pair<double, double>> centers;
    centers.reserve(2 * geo.n_cells);
    for (int cell = 0; cell < geo.n_cells; ++cell) {
        centers.emplace_back(x, cy);
        centers.emplace_back(x + geo.d_i, cy);
        x += geo.d_i + geo.d_o;
    }
    return centers;
}

inline HeightMap make_ssh_chain(const Grid& grid, const SshGeometry& geo) {
    return make_pillars(grid, ssh_chain_centers(grid, geo), geo.r, geo.h_s);
}

// Dome: h = max(0, h_max - curvature*rho^2), apex h_max at the center.
inline HeightMap make_paraboloid(const Grid& grid, double curvature, double h_max,
                                 std::pair<double, double> center = {0.0, 0.0}) {
    grid.validate();
    if (curvature <= 0.0) throw validation_error("make_paraboloid: curvature must be > 0");
    if (h_max <= 0.0) throw validation_error("make_paraboloid: h_max must be > 0");
    const auto [cx, cy] = center;
    HeightMap hm{grid, std::vector<double>(grid.size(), 0.0)};
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double ddx = grid.x(i) - cx, ddy = grid.y(j) - cy;
            hm.at(i, j) = std::max(0.0, h_max - curvature * (ddx * ddx + ddy * ddy));
        }
    return hm;
}

// Finite lateral feature sharpness of the DLW focus, modeled as a Gaussian
// blur with sigma = voxel_radius. Zero-padded boundary; radius 0 is identity.
inline HeightMap apply_voxel_smoothing(const HeightMap& hmap, double voxel_radius_nm) {
    if (voxel_radius_nm < 0.0)
        throw validation_error("apply_voxel_smoothing: voxel_radius must be >= 0");
    if (voxel_radius_nm == 0.0) return hmap;
    const Grid& g = hmap.grid;
    const double sigma = voxel_radius_nm * 1e-3 / g.dx; // in nodes
    const int half = std::max(1, int(std::ceil(6.0 * sigma)));
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int t = -half; t <= half; ++t)
        sum += kernel[t + half] = std::exp(-0.5 * t * t / (sigma * sigma));
    for (double& k : kernel) k /= sum;

    // separable convolution, x then y
    std::vector<double> tmp(g.size(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double acc = 0.0;
            for (int t = -half; t <= half; ++t) {
                const int ii = i + t;
                if (ii >= 0 && ii < g.nx) acc += kernel[t + half] * hmap.at(ii, j);
            }
            tmp[g.idx(i, j)] = acc;
        }
    HeightMap out{g, std::vector<double>(g.size(), 0.0)};
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double acc = 0.0;
            for (int t = -half; t <= half; ++t) {
                const int jj = j + t;
                if (jj >= 0 && jj < g.ny) acc += kernel[t + half] * tmp[g.idx(i, jj)];
            }
            out.at(i, j) = acc;
        }
    return out;
}

// Self-interference of the writing focus in the dip-in configuration
// discretizes heights to multiples of ~230 nm. Nearest multiple, ties to even.
inline HeightMap quantize_dipin(const HeightMap& hmap, double step_nm) {
    if (!(step_nm > 0.0)) throw validation_error("quantize_dipin: step must be > 0");
    HeightMap out = hmap;
    for (double& h : out.h) {
        const double q = h / step_nm;
        const double f = std::floor(q);
        const double frac = q - f;
        double n;
        if (frac > 0.5) n = f + 1.0;
        else if (frac < 0.5) n = f;
        else n = (std::fmod(f, 2.0) == 0.0) ? f : f + 1.0;
        h = n * step_nm;
    }
    return out;
}

inline void write_heightmap(const HeightMap& hmap, const std::string& path) {
    write_field(hmap.grid, hmap.h, path);
}

inline HeightMap read_heightmap(const std::string& path) {
    auto [grid, values] = read_field(path);
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw parse_error(path + ": heights must be finite and >= 0");
    return HeightMap{grid, std::move(values)};
}

} // namespace pgl
