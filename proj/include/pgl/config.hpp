#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pgl/errors.hpp"

namespace pgl {

// One simulation scenario, parsed from a flat "[section]" / "key = value"
// config file. Parsing is strict: unknown sections or keys, duplicate keys
// and malformed lines are errors.
struct Scenario {
    std::string kind; // box | double_well | ssh | paraboloid | custom_heightmap
    std::uint64_t seed = 42;

    // cavity
    int q = 10;
    double lambda_cut = 580.0; // nm
    double n_medium = 1.44;
    double delta_n = 0.11;
    double temperature = 300.0; // K

    // geometry (kind-dependent; lengths um, heights nm)
    double side = 10.0;
    double height = 475.0;
    double r = 0.6;
    double d = 1.0;
    int n_cells = 10;
    double d_i = 1.4;
    double d_o = 0.9;
    double curvature = 10.0; // nm/um^2
    double h_max = 690.0;    // nm
    std::string heightmap_path;
    double voxel_radius = 0.0;  // nm, 0 disables smoothing
    double quantize_step = 0.0; // nm, 0 disables quantization

    // solver
    int k = 16;
    double tol = 1e-8;
    double dx = 0.05;   // um
    double margin = 2.0; // um

    // thermo
    std::string thermo_mode = "boltzmann"; // boltzmann | bose
    double total_n = 0.0;

    // spectra
    double dispersion = 1.0; // um per THz
    double na = 0.6;
    double defocus = 0.0;    // um
    double bin_width = 0.05; // THz

    std::string out_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct ConfigEntry {
    std::string value;
    int line = 0;
};

using ConfigMap = std::map<std::string, ConfigEntry>; // "section.key" -> entry

inline ConfigMap read_config_map(std::istream& in, const std::string& path) {
    ConfigMap map;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw parse_error(path + ": line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw parse_error(path + ": line " + std::to_string(lineno) +
                                  ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw parse_error(path + ": line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw parse_error(path + ": line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw parse_error(path + ": line " + std::to_string(lineno) +
                              ": key outside any [section]");
        const std::string full = section + "." + key;
        if (map.count(full))
            throw parse_error(path + ": line " + std::to_string(lineno) + ": duplicate key '" +
                              full + "' (first on line " + std::to_string(map[full].line) + ")");
        map[full] = {value, lineno};
    }
    return map;
}

inline double to_double(const ConfigEntry& e, const std::string& key, const std::string& path) {
    std::size_t pos = 0;
    double v = 0.0;
    try { v = std::stod(e.value, &pos); } catch (...) { pos = 0; }
    if (pos != e.value.size() || e.value.empty())
        throw parse_error(path + ": line " + std::to_string(e.line) + ": key '" + key +
                          "': expected a number, got '" + e.value + "'");
    return v;
}

inline long to_int(const ConfigEntry& e, const std::string& key, const std::string& path) {
    std::size_t pos = 0;
    long v = 0;
    try { v = std::stol(e.value, &pos); } catch (...) { pos = 0; }
    if (pos != e.value.size() || e.value.empty())
        throw parse_error(path + ": line " + std::to_string(e.line) + ": key '" + key +
                          "': expected an integer, got '" + e.value + "'");
    return v;
}

} // namespace detail

inline Scenario parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("parse_config: cannot open " + path);
    auto map = detail::read_config_map(in, path);

    Scenario s;
    std::set<std::string> used;
    auto take = [&](const std::string& key) -> const detail::ConfigEntry* {
        auto it = map.find(key);
        if (it == map.end()) return nullptr;
        used.insert(key);
        return &it->second;
    };
    auto num = [&](const std::string& key, double& dst) {
        if (const auto* e = take(key)) dst = detail::to_double(*e, key, path);
    };
    auto integer = [&](const std::string& key, int& dst) {
        if (const auto* e = take(key)) dst = int(detail::to_int(*e, key, path));
    };
    auto str = [&](const std::string& key, std::string& dst) {
        if (const auto* e = take(key)) dst = e->value;
    };

    if (const auto* e = take("scenario.kind")) s.kind = e->value;
    else throw config_error(path + ": missing required key 'scenario.kind'");
    static const std::set<std::string> kinds{"box", "double_well", "ssh", "paraboloid",
                                            "custom_heightmap"};
    if (!kinds.count(s.kind))
        throw config_error(path + ": scenario.kind '" + s.kind +
                           "' is not one of box, double_well, ssh, paraboloid, custom_heightmap");
    if (const auto* e = take("scenario.seed"))
        s.seed = std::uint64_t(detail::to_int(*e, "scenario.seed", path));

    integer("cavity.q", s.q);
    num("cavity.lambda_cut", s.lambda_cut);
    num("cavity.n_medium", s.n_medium);
    num("cavity.delta_n", s.delta_n);
    num("cavity.temperature", s.temperature);

    // geometry keys allowed per kind
    if (s.kind == "box") {
        num("geometry.side", s.side);
        num("geometry.height", s.height);
    } else if (s.kind == "double_well") {
        num("geometry.r", s.r);
        num("geometry.d", s.d);
        num("geometry.height", s.height);
    } else if (s.kind == "ssh") {
        integer("geometry.n_cells", s.n_cells);
        num("geometry.d_i", s.d_i);
        num("geometry.d_o", s.d_o);
        num("geometry.r", s.r);
        num("geometry.height", s.height);
    } else if (s.kind == "paraboloid") {
        num("geometry.curvature", s.curvature);
        num("geometry.h_max", s.h_max);
    } else { // custom_heightmap
        str("geometry.path", s.heightmap_path);
        if (s.heightmap_path.empty())
            throw config_error(path + ": custom_heightmap requires geometry.path");
        if (!std::filesystem::exists(s.heightmap_path))
            throw config_error(path + ": geometry.path '" + s.heightmap_path +
                               "' does not exist");
    }
    num("geometry.voxel_radius", s.voxel_radius);
    num("geometry.quantize_step", s.quantize_step);

    integer("solver.k", s.k);
    num("solver.tol", s.tol);
    num("solver.dx", s.dx);
    num("solver.margin", s.margin);

    str("thermo.mode", s.thermo_mode);
    num("thermo.total_n", s.total_n);
    if (s.thermo_mode != "boltzmann" && s.thermo_mode != "bose")
        throw config_error(path + ": thermo.mode must be 'boltzmann' or 'bose'");
    if (s.thermo_mode == "bose" && !(s.total_n > 0.0))
        throw config_error(path + ": thermo.mode = bose requires thermo.total_n > 0");

    num("spectra.dispersion", s.dispersion);
    num("spectra.na", s.na);
    num("spectra.defocus", s.defocus);
    num("spectra.bin_width", s.bin_width);

    str("output.dir", s.out_dir);

    for (const auto& [key, entry] : map)
        if (!used.count(key))
            throw config_error(path + ": line " + std::to_string(entry.line) +
                               ": unknown key '" + key + "'");

    if (s.margin < 2.0)
        throw config_error(path + ": solver.margin must be >= 2 um");
    if (!(s.dx > 0.0))
        throw config_error(path + ": solver.dx must be > 0");
    return s;
}

} // namespace pgl
