// Scenario runner for printed-potential photon gas simulations.
//
//   pgsim simulate <config> [--out DIR] [--seed INT] [--threads INT]
//   pgsim validate <config>
//   pgsim sweep <config> --param geometry.d --values 0.8:2.0:0.1 [--out DIR]
//
// Exit codes: 0 ok, 2 config error, 3 solver error, 4 I/O error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgl/pgl.hpp"

namespace {

std::vector<double> parse_range(const std::string& spec) {
    // "a:b:step" inclusive, or a comma-separated list
    std::vector<double> vals;
    if (spec.find(':') != std::string::npos) {
        double a, b, step;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0.0)
            throw pgl::config_error("--values: expected 'start:stop:step' with step > 0");
        for (double v = a; v <= b + 1e-9; v += step) vals.push_back(v);
    } else {
        std::size_t pos = 0;
        while (pos < spec.size()) {
            auto comma = spec.find(',', pos);
            if (comma == std::string::npos) comma = spec.size();
            vals.push_back(std::stod(spec.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
    if (vals.empty()) throw pgl::config_error("--values: empty value list");
    return vals;
}

int report_and_exit(const pgl::RunReport& rep) {
    if (rep.exit_code == 0) {
        for (const auto& [key, value] : rep.metrics)
            std::printf("%s = %s\n", key.c_str(), value.c_str());
        std::printf("ok (%zu output files)\n", rep.outputs.size());
    } else {
        std::fprintf(stderr, "error: %s\n", rep.message.c_str());
    }
    return rep.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"photon gas potential-landscape simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, param, values_spec;
    long long seed = -1;
    int threads = 0;

    auto* simulate = app.add_subcommand("simulate", "run a scenario config");
    simulate->add_option("config", config_path)->required();
    simulate->add_option("--out", out_dir, "output directory override");
    simulate->add_option("--seed", seed, "solver seed override");
    simulate->add_option("--threads", threads, "worker threads (currently single-threaded)");

    auto* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", config_path)->required();

    auto* sweep = app.add_subcommand("sweep", "sweep one geometry parameter");
    sweep->add_option("config", config_path)->required();
    sweep->add_option("--param", param)->required();
    sweep->add_option("--values", values_spec, "start:stop:step or comma list")->required();
    sweep->add_option("--out", out_dir);
    sweep->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        pgl::Scenario s = pgl::parse_config(config_path);
        if (!out_dir.empty()) s.out_dir = out_dir;
        if (seed >= 0) s.seed = std::uint64_t(seed);

        if (validate->parsed()) {
            std::printf("ok: %s (kind = %s)\n", config_path.c_str(), s.kind.c_str());
            return 0;
        }
        if (simulate->parsed()) return report_and_exit(pgl::run_scenario(s));
        return report_and_exit(pgl::run_sweep(s, param, parse_range(values_spec)));
    } catch (const pgl::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const pgl::solver_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
