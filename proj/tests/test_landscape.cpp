#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <queue>
#include <set>

#include "pgl/constants.hpp"
#include "pgl/landscape.hpp"

using namespace pgl;

namespace {

double height_sum(const HeightMap& hm) {
    double s = 0.0;
    for (double h : hm.h) s += h;
    return s;
}

// independent connected-component count over h > 0 (4-neighborhood)
int component_count(const HeightMap& hm) {
    const Grid& g = hm.grid;
    std::vector<char> seen(g.size(), 0);
    int count = 0;
    for (std::size_t start = 0; start < g.size(); ++start) {
        if (hm.h[start] <= 0.0 || seen[start]) continue;
        ++count;
        std::queue<std::size_t> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const auto n = q.front();
            q.pop();
            const int i = int(n % g.nx), j = int(n / g.nx);
            const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
            for (int t = 0; t < 4; ++t) {
                const int ii = i + di[t], jj = j + dj[t];
                if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
                const auto m = g.idx(ii, jj);
                if (!seen[m] && hm.h[m] > 0.0) {
                    seen[m] = 1;
                    q.push(m);
                }
            }
        }
    }
    return count;
}

} // namespace

TEST_CASE("make_box fills the square by node-center membership") {
    Grid g = make_centered_grid(14.0, 14.0, 0.05);
    HeightMap hm = make_box(g, 10.0, 475.0);
    int inside = 0;
    for (double h : hm.h) {
        CHECK((h == 0.0 || h == 475.0));
        if (h == 475.0) ++inside;
    }
    CHECK(inside == 201 * 201); // node centers with |x|,|y| <= 5
    // mass conservation within one cell-row of discretization error
    const double integral = height_sum(hm) * g.dx * g.dy;
    CHECK(std::abs(integral - 10.0 * 10.0 * 475.0) <= 2.1 * 10.0 * g.dx * 475.0);
}

TEST_CASE("make_box: zero side gives the all-zero map") {
    Grid g = make_centered_grid(8.0, 8.0, 0.1);
    HeightMap hm = make_box(g, 0.0, 475.0);
    CHECK(height_sum(hm) == 0.0);
}

TEST_CASE("make_box rejects boxes that violate the margin") {
    Grid g = make_centered_grid(8.0, 8.0, 0.1);
    CHECK_THROWS_AS(make_box(g, 7.0, 475.0), geometry_error);
    CHECK_THROWS_AS(make_box(g, 3.0, 475.0, {3.0, 0.0}), geometry_error);
}

TEST_CASE("make_box is translation covariant on the node lattice") {
    Grid g = make_centered_grid(10.0, 10.0, 0.1);
    HeightMap a = make_box(g, 3.1, 500.0, {0.0, 0.0});
    HeightMap b = make_box(g, 3.1, 500.0, {g.dx, 0.0});
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            CHECK(b.at(i, j) == a.at(i - 1, j));
}

TEST_CASE("make_pillars: disk area within discretization error") {
    Grid g = make_centered_grid(6.0, 6.0, 0.05);
    HeightMap hm = make_pillars(g, {{0.0, 0.0}}, 0.6, 600.0);
    const double area = height_sum(hm) / 600.0 * g.dx * g.dy;
    const double exact = constants::pi * 0.36;
    CHECK(std::abs(area - exact) <= 2.0 * constants::pi * 0.6 * g.dx);
}

TEST_CASE("make_pillars merges overlapping disks without stacking") {
    Grid g = make_centered_grid(10.0, 6.0, 0.05);
    HeightMap merged = make_pillars(g, {{-0.4, 0.0}, {0.4, 0.0}}, 0.6, 600.0);
    CHECK(*std::max_element(merged.h.begin(), merged.h.end()) == 600.0);
    CHECK(merged.at(g.nx / 2, g.ny / 2) == 600.0); // midpoint covered
    CHECK(component_count(merged) == 1);

    HeightMap split = make_pillars(g, {{-1.5, 0.0}, {1.5, 0.0}}, 0.6, 600.0);
    CHECK(component_count(split) == 2);
}

TEST_CASE("ssh_chain_centers: 20 sites with alternating gaps") {
    Grid g = make_centered_grid(30.0, 6.0, 0.1);
    SshGeometry geo{10, 1.4, 0.9, 0.6, 600.0};
    auto centers = ssh_chain_centers(g, geo);
    REQUIRE(centers.size() == 20);
    for (std::size_t k = 0; k + 1 < centers.size(); ++k) {
        const double gap = centers[k + 1].first - centers[k].first;
        CHECK(gap == Catch::Approx(k % 2 == 0 ? geo.d_i : geo.d_o).margin(1e-12));
    }
}

TEST_CASE("make_ssh_chain: mirror symmetry about the grid center") {
    Grid g = make_centered_grid(30.0, 6.0, 0.1);
    SshGeometry geo{10, 1.4, 0.9, 0.6, 600.0};
    HeightMap hm = make_ssh_chain(g, geo);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            CHECK(hm.at(i, j) == hm.at(g.nx - 1 - i, j));
}

TEST_CASE("make_ssh_chain: d_i = d_o degenerates to a uniform chain") {
    Grid g = make_centered_grid(32.0, 6.0, 0.1);
    SshGeometry geo{10, 1.2, 1.2, 0.6, 600.0};
    auto centers = ssh_chain_centers(g, geo);
    for (std::size_t k = 0; k + 1 < centers.size(); ++k)
        CHECK(centers[k + 1].first - centers[k].first == Catch::Approx(1.2).margin(1e-12));
}

TEST_CASE("ssh coupling swap shifts the chain pattern by one site") {
    // dropping the first site of the chain gives the swapped-coupling chain
    // (up to edge termination)
    Grid g = make_centered_grid(32.0, 6.0, 0.1);
    auto orig = ssh_chain_centers(g, SshGeometry{10, 1.4, 0.9, 0.6, 600.0});
    auto swapped = ssh_chain_centers(g, SshGeometry{10, 0.9, 1.4, 0.6, 600.0});
    for (std::size_t k = 0; k + 2 < orig.size(); ++k) {
        const double gap_orig = orig[k + 2].first - orig[k + 1].first;
        const double gap_swap = swapped[k + 1].first - swapped[k].first;
        CHECK(gap_swap == Catch::Approx(gap_orig).margin(1e-12));
    }
}

TEST_CASE("make_paraboloid profile") {
    Grid g = make_centered_grid(14.0, 14.0, 0.1);
    const double curvature = 30.0, h_max = 690.0;
    HeightMap hm = make_paraboloid(g, curvature, h_max);
    const int ic = g.nx / 2, jc = g.ny / 2;
    CHECK(hm.at(ic, jc) == h_max); // apex
    // h = 0 at rho = sqrt(h_max/curvature)
    const double rho0 = std::sqrt(h_max / curvature);
    const int i0 = ic + int(std::round(rho0 / g.dx));
    CHECK(hm.at(i0, jc) ==
          std::max(0.0, h_max - curvature * std::pow((i0 - ic) * g.dx, 2)));
    CHECK(hm.at(g.nx - 1, jc) == 0.0);
    // isotropy: x section equals y section
    for (int t = 0; t < g.nx / 2; ++t)
        CHECK(hm.at(ic + t, jc) == Catch::Approx(hm.at(ic, jc + t)).margin(1e-12));
}

TEST_CASE("apply_voxel_smoothing: radius 0 is the identity") {
    Grid g = make_centered_grid(6.0, 6.0, 0.05);
    HeightMap hm = make_pillars(g, {{0.0, 0.0}}, 0.6, 600.0);
    HeightMap same = apply_voxel_smoothing(hm, 0.0);
    CHECK(same.h == hm.h);
}

TEST_CASE("apply_voxel_smoothing preserves height mass away from the boundary") {
    Grid g = make_centered_grid(6.0, 6.0, 0.05);
    HeightMap hm = make_pillars(g, {{0.0, 0.0}}, 0.6, 600.0);
    HeightMap sm = apply_voxel_smoothing(hm, 50.0);
    CHECK(height_sum(sm) == Catch::Approx(height_sum(hm)).epsilon(1e-6));
}

TEST_CASE("apply_voxel_smoothing: step edge 10-90% width follows the erf profile") {
    // step of 475 nm, sigma = 50 nm: expected width 2.5631*sigma ~ 128 nm
    Grid g = make_centered_grid(4.0, 1.0, 0.01);
    HeightMap step{g, std::vector<double>(g.size(), 0.0)};
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.x(i) >= 0.0) step.at(i, j) = 475.0;
    HeightMap sm = apply_voxel_smoothing(step, 50.0);

    const int jc = g.ny / 2;
    auto crossing = [&](double level) {
        for (int i = 1; i < g.nx; ++i) {
            const double a = sm.at(i - 1, jc), b = sm.at(i, jc);
            if (a < level && b >= level)
                return g.x(i - 1) + (level - a) / (b - a) * g.dx;
        }
        return 0.0;
    };
    const double width = crossing(0.9 * 475.0) - crossing(0.1 * 475.0);
    CHECK(width == Catch::Approx(2.563103 * 0.050).epsilon(0.02));

    // optical path slope at the smoothed edge: peak of the erf derivative,
    // same order as the voxel-scale estimate 36 nm / 50 nm
    const double dn_over_n = 0.11 / 1.44;
    double max_slope = 0.0;
    for (int i = 1; i < g.nx; ++i)
        max_slope = std::max(max_slope, std::abs(sm.at(i, jc) - sm.at(i - 1, jc)) *
                                            dn_over_n / (g.dx * 1e3));
    const double expected = 475.0 * dn_over_n / (50.0 * std::sqrt(2.0 * constants::pi));
    CHECK(max_slope == Catch::Approx(expected).epsilon(0.05));
    CHECK(max_slope > 0.72 / 3.0);
    CHECK(max_slope < 0.72 * 3.0);
}

TEST_CASE("quantize_dipin: rounding rule and idempotence") {
    Grid g = make_centered_grid(2.0, 2.0, 0.25);
    HeightMap hm{g, std::vector<double>(g.size(), 475.0)};
    HeightMap q = quantize_dipin(hm, 230.0);
    CHECK(q.h.front() == 460.0);

    hm.h.front() = 0.0;
    hm.h.back() = 115.0; // exact tie: 0.5 step rounds to even multiple 0
    q = quantize_dipin(hm, 230.0);
    CHECK(q.h.front() == 0.0);
    CHECK(q.h.back() == 0.0);
    CHECK(quantize_dipin(q, 230.0).h == q.h); // idempotent
}

TEST_CASE("quantize_dipin terraces a paraboloid at multiples of the step") {
    Grid g = make_centered_grid(14.0, 14.0, 0.1);
    HeightMap hm = make_paraboloid(g, 30.0, 690.0);
    HeightMap q = quantize_dipin(hm, 230.0);
    std::set<double> levels(q.h.begin(), q.h.end());
    CHECK(levels == std::set<double>{0.0, 230.0, 460.0, 690.0});
}

TEST_CASE("heightmap file round trip") {
    Grid g = make_centered_grid(6.0, 6.0, 0.13);
    HeightMap hm = make_pillars(g, {{0.3, -0.2}}, 0.7, 612.345678);
    const std::string path = std::filesystem::temp_directory_path() / "pgl_hmap_rt.txt";
    write_heightmap(hm, path);
    HeightMap back = read_heightmap(path);
    REQUIRE(back.grid.same_shape(hm.grid));
    for (std::size_t n = 0; n < hm.h.size(); ++n)
        CHECK(std::abs(back.h[n] - hm.h[n]) <= 1e-3);
    std::filesystem::remove(path);
}

TEST_CASE("heightmap parser reports malformed input with line numbers") {
    namespace fs = std::filesystem;
    const std::string path = fs::temp_directory_path() / "pgl_hmap_bad.txt";

    {
        std::ofstream out(path);
        out << "HMAP1 9 9 0.1 0.1 0 0\n1 2 3\n";
    }
    CHECK_THROWS_MATCHES(read_heightmap(path), parse_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 2")));

    {
        std::ofstream out(path);
        out << "WRONG 9 9 0.1 0.1 0 0\n";
    }
    CHECK_THROWS_AS(read_heightmap(path), parse_error);

    {
        std::ofstream out(path);
        out << "HMAP1 9 9 0.1 0.1 0 0\n"; // header only, no rows
    }
    CHECK_THROWS_AS(read_heightmap(path), parse_error);
    fs::remove(path);
}

TEST_CASE("heightmap literal parses to the stated values") {
    // smallest legal grid is 9x9; embed a 2x2 pattern and zeros elsewhere
    namespace fs = std::filesystem;
    const std::string path = fs::temp_directory_path() / "pgl_hmap_lit.txt";
    {
        std::ofstream out(path);
        out << "HMAP1 9 9 0.5 0.5 -2 -2\n";
        for (int j = 0; j < 9; ++j) {
            for (int i = 0; i < 9; ++i) {
                double v = 0.0;
                if (j == 0 && i == 0) v = 11.5;
                if (j == 0 && i == 1) v = 12.5;
                if (j == 1 && i == 0) v = 21.5;
                if (j == 1 && i == 1) v = 22.5;
                out << (i ? " " : "") << v;
            }
            out << "\n";
        }
    }
    HeightMap hm = read_heightmap(path);
    CHECK(hm.at(0, 0) == 11.5);
    CHECK(hm.at(1, 0) == 12.5);
    CHECK(hm.at(0, 1) == 21.5);
    CHECK(hm.at(1, 1) == 22.5);
    CHECK(hm.grid.dx == 0.5);
    fs::remove(path);
}
