#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pgl/cavity.hpp"
#include "pgl/config.hpp"
#include "pgl/eigensolver.hpp"
#include "pgl/errors.hpp"
#include "pgl/landscape.hpp"
#include "pgl/lattice.hpp"
#include "pgl/spectra.hpp"
#include "pgl/thermo.hpp"

namespace pgl {

struct RunReport {
    int exit_code = 0; // 0 ok, 2 config, 3 solver, 4 I/O
    std::string message;
    std::vector<std::string> outputs;
    std::map<std::string, std::string> metrics;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(buf.str())));
    return hex;
}

} // namespace detail

inline constexpr const char* kVersion = "1.0.0";

// Builds the height map for a scenario, including fabrication artifacts.
inline HeightMap build_landscape(const Scenario& s) {
    HeightMap hm;
    if (s.kind == "box") {
        Grid grid = make_centered_grid(s.side + 2 * s.margin, s.side + 2 * s.margin, s.dx);
        hm = make_box(grid, s.side, s.height);
    } else if (s.kind == "double_well") {
        Grid grid = make_centered_grid(s.d + 2 * s.r + 2 * s.margin,
                                       2 * s.r + 2 * s.margin, s.dx);
        hm = make_pillars(grid, {{-s.d / 2, 0.0}, {s.d / 2, 0.0}}, s.r, s.height);
    } else if (s.kind == "ssh") {
        SshGeometry geo{s.n_cells, s.d_i, s.d_o, s.r, s.height};
        const double span = (s.n_cells - 1) * (s.d_i + s.d_o) + s.d_i;
        Grid grid = make_centered_grid(span + 2 * s.r + 2 * s.margin,
                                       2 * s.r + 2 * s.margin, s.dx);
        hm = make_ssh_chain(grid, geo);
    } else if (s.kind == "paraboloid") {
        const double rho0 = std::sqrt(s.h_max / s.curvature);
        Grid grid = make_centered_grid(2 * rho0 + 2 * s.margin, 2 * rho0 + 2 * s.margin, s.dx);
        hm = make_paraboloid(grid, s.curvature, s.h_max);
    } else if (s.kind == "custom_heightmap") {
        hm = read_heightmap(s.heightmap_path);
    } else {
        throw config_error("build_landscape: unknown kind '" + s.kind + "'");
    }
    if (s.voxel_radius > 0.0) hm = apply_voxel_smoothing(hm, s.voxel_radius);
    if (s.quantize_step > 0.0) hm = quantize_dipin(hm, s.quantize_step);
    return hm;
}

// Runs the full pipeline for one scenario and writes all data products into
// the output directory. On failure, files already written keep a .partial
// suffix.
inline RunReport run_scenario(const Scenario& s) {
    namespace fs = std::filesystem;
    RunReport rep;
    const auto t_start = std::chrono::steady_clock::now();
    std::vector<std::string> written;
    auto track = [&](const std::string& name) {
        written.push_back(name);
        return s.out_dir + "/" + name;
    };
    auto elapsed_s = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    try {
        fs::create_directories(s.out_dir);

        const CavityParams cav =
            derive_cavity(s.q, s.lambda_cut, s.n_medium, s.delta_n, s.temperature);
        const HeightMap hm = build_landscape(s);
        write_heightmap(hm, track("heightmap.txt"));

        const PotentialMap pmap = height_to_potential(hm, cav);
        write_field(pmap.grid, pmap.v, track("potential.txt"));

        const Hamiltonian ham = assemble_hamiltonian(pmap, cav);
        SolverOptions opts;
        opts.k = s.k;
        opts.tol = s.tol;
        opts.seed = s.seed;
        const ModeSet all_modes = solve_lowest(ham, opts);
        const ModeSet modes = bound_filter(all_modes);
        if (modes.freqs.empty())
            throw solver_error("run_scenario: no bound modes below the potential depth");
        track("modes.csv");
        for (std::size_t i = 0; i < modes.freqs.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "mode_%03zu.txt", i);
            track(name);
        }
        write_modeset(modes, s.out_dir);
        rep.metrics["bound_modes"] = std::to_string(modes.freqs.size());
        rep.metrics["depth_THz"] = detail::fmt_double(modes.depth);
        rep.metrics["nu_ground_THz"] = detail::fmt_double(modes.freqs.front());

        std::vector<double> weights;
        if (s.thermo_mode == "bose") {
            const Population pop = solve_mu(modes, s.total_n, s.temperature);
            write_population(modes, pop, track("population.csv"));
            rep.metrics["mu_THz"] = detail::fmt_double(pop.mu);
            rep.metrics["condensate_fraction"] = detail::fmt_double(pop.condensate_fraction);
            if (modes.freqs.size() >= 2)
                rep.metrics["critical_number"] =
                    detail::fmt_double(critical_number(modes, s.temperature));
            weights = thermal_weights(modes, WeightKind::bose, s.temperature, s.total_n);
        } else {
            weights = thermal_weights(modes, WeightKind::boltzmann, s.temperature);
        }

        const SpectrumImage pos =
            position_spectrum(modes, weights, s.dispersion, s.bin_width, s.defocus);
        write_spectrum(pos, track("spectrum_position.csv"));
        const SpectrumImage mom = momentum_spectrum(modes, weights, cav, s.na, s.bin_width);
        write_spectrum(mom, track("spectrum_momentum.csv"));

        std::vector<double> ks;
        const double kmax = -mom.a0_min;
        for (int i = 0; i <= 100; ++i) ks.push_back(-kmax + 2.0 * kmax * i / 100);
        write_dispersion_curve(dispersion_curve(cav, ks), track("dispersion.csv"));

        if (s.kind == "double_well") {
            const ExtractedCoupling jc = extract_j(modes);
            rep.metrics["J_THz"] = detail::fmt_double(jc.j);
            rep.metrics["parity_ok"] = jc.parity_ok ? "1" : "0";
        } else if (s.kind == "ssh") {
            const SshGeometry geo{s.n_cells, s.d_i, s.d_o, s.r, s.height};
            const TbFit fit = calibrate_tb(modes, geo);
            write_tb_model(fit.model, track("tb_model.txt"));
            const SshSpectrum tb = ssh_spectrum(fit.model);
            rep.metrics["tb_Ji_THz"] = detail::fmt_double(fit.model.couplings[0]);
            rep.metrics["tb_Jo_THz"] = detail::fmt_double(fit.model.couplings[1]);
            rep.metrics["tb_gap_THz"] = detail::fmt_double(tb.gap);
            rep.metrics["tb_residual_THz"] = detail::fmt_double(fit.residual);
            rep.metrics["winding"] = std::to_string(
                winding_number(fit.model.couplings[0], fit.model.couplings[1]));

            // continuum midgap states: inside the fitted gap around e0
            const double half_gap =
                std::abs(fit.model.couplings[0] - fit.model.couplings[1]);
            const auto centers = ssh_chain_centers(modes.grid, geo);
            int midgap_count = 0;
            double min_edge_loc = 1.0;
            for (std::size_t i = 0; i < modes.freqs.size() && int(i) < 2 * s.n_cells; ++i) {
                if (std::abs(modes.freqs[i] - fit.model.e0) < 0.5 * half_gap) {
                    ++midgap_count;
                    auto w = site_weights(modes.grid, modes.fields[i], centers);
                    std::vector<double> amps(w.size());
                    double tot = 0.0;
                    for (double x : w) tot += x;
                    for (std::size_t si = 0; si < w.size(); ++si)
                        amps[si] = std::sqrt(w[si] / tot);
                    min_edge_loc = std::min(min_edge_loc, edge_localization(amps));
                }
            }
            rep.metrics["midgap_states"] = std::to_string(midgap_count);
            if (midgap_count > 0)
                rep.metrics["min_edge_localization"] = detail::fmt_double(min_edge_loc);
        }

        // manifest last: inputs hash, versions, timings, per-file hashes
        {
            std::ostringstream cfg;
            cfg << s.kind << ' ' << s.seed << ' ' << s.q << ' ' << s.lambda_cut << ' '
                << s.n_medium << ' ' << s.delta_n << ' ' << s.temperature << ' ' << s.side << ' '
                << s.height << ' ' << s.r << ' ' << s.d << ' ' << s.n_cells << ' ' << s.d_i << ' '
                << s.d_o << ' ' << s.curvature << ' ' << s.h_max << ' ' << s.heightmap_path << ' '
                << s.voxel_radius << ' ' << s.quantize_step << ' ' << s.k << ' ' << s.tol << ' '
                << s.dx << ' ' << s.margin << ' ' << s.thermo_mode << ' ' << s.total_n << ' '
                << s.dispersion << ' ' << s.na << ' ' << s.defocus << ' ' << s.bin_width;
            std::ofstream man(s.out_dir + "/manifest.txt");
            if (!man) throw io_error("run_scenario: cannot write manifest");
            char hex[24];
            std::snprintf(hex, sizeof(hex), "%016llx",
                          static_cast<unsigned long long>(detail::fnv1a(cfg.str())));
            man << "version = " << kVersion << '\n';
            man << "inputs_hash = " << hex << '\n';
            man << "elapsed_s = " << elapsed_s() << '\n';
            for (const auto& [key, value] : rep.metrics)
                man << key << " = " << value << '\n';
            for (const auto& name : written)
                man << "output " << name << " " << detail::file_hash(s.out_dir + "/" + name)
                    << '\n';
            written.push_back("manifest.txt");
        }
        rep.outputs = written;
        rep.message = "ok";
        return rep;
    } catch (const std::exception& e) {
        for (const auto& name : written) {
            std::error_code ec;
            fs::rename(s.out_dir + "/" + name, s.out_dir + "/" + name + ".partial", ec);
        }
        rep.message = e.what();
        if (dynamic_cast<const io_error*>(&e)) rep.exit_code = 4;
        else if (dynamic_cast<const solver_error*>(&e)) rep.exit_code = 3;
        else rep.exit_code = 2;
        return rep;
    }
}

// Parameter sweep over the pillar distance of a double-well scenario.
inline RunReport run_sweep(const Scenario& s, const std::string& param,
                           const std::vector<double>& values) {
    namespace fs = std::filesystem;
    RunReport rep;
    try {
        if (s.kind != "double_well")
            throw config_error("run_sweep: sweeps require scenario.kind = double_well");
        if (param != "geometry.d")
            throw config_error("run_sweep: unsupported sweep parameter '" + param +
                               "' (only geometry.d)");
        fs::create_directories(s.out_dir);
        const CavityParams cav =
            derive_cavity(s.q, s.lambda_cut, s.n_medium, s.delta_n, s.temperature);
        SolverOptions opts;
        opts.k = std::max(s.k, 4);
        opts.tol = s.tol;
        opts.seed = s.seed;
        const CouplingCurve curve =
            coupling_sweep(values, s.r, s.height, cav, s.dx, opts, s.voxel_radius);
        write_coupling_curve(curve, s.out_dir + "/coupling_curve.csv");
        rep.outputs.push_back("coupling_curve.csv");
        rep.metrics["monotone_decreasing"] = curve.monotone_decreasing ? "1" : "0";
        int failures = 0;
        for (const auto& err : curve.errors)
            if (!err.empty()) ++failures;
        rep.metrics["failed_points"] = std::to_string(failures);
        rep.message = "ok";
        return rep;
    } catch (const std::exception& e) {
        rep.message = e.what();
        if (dynamic_cast<const io_error*>(&e)) rep.exit_code = 4;
        else if (dynamic_cast<const solver_error*>(&e)) rep.exit_code = 3;
        else rep.exit_code = 2;
        return rep;
    }
}

} // namespace pgl
