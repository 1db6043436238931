#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "pgl/cavity.hpp"
#include "pgl/eigensolver.hpp"
#include "pgl/errors.hpp"
#include "pgl/field_io.hpp"

namespace pgl {

// Bose-Einstein statistics over a bound-filtered ModeSet.
struct Population {
    double mu = 0.0;                  // chemical potential mu/h, THz (< nu_ground)
    std::vector<double> occupations;  // mean photon number per mode
    double total_n = 0.0;
    double condensate_fraction = 0.0; // n_ground / total_n
};

// 1/(exp(h(nu-mu)/kB T) - 1)
inline double be_occupation(double nu, double mu, double temperature) {
    if (!(mu < nu))
        throw validation_error("be_occupation: mu must be strictly below nu");
    const double x = (nu - mu) / thermal_frequency_at(temperature);
    return 1.0 / std::expm1(x);
}

// Bisection on mu until the summed occupations match total_n to relative 1e-8.
inline Population solve_mu(const ModeSet& modes, double total_n, double temperature) {
    if (modes.freqs.empty())
        throw validation_error("solve_mu: empty mode set");
    if (!(total_n > 0.0))
        throw validation_error("solve_mu: total_n must be > 0");

    const double nu0 = modes.freqs.front();
    const double nu_th = thermal_frequency_at(temperature);
    const double rel_tol = 1e-8;

    auto total = [&](double mu) {
        double s = 0.0;
        for (double nu : modes.freqs) s += 1.0 / std::expm1((nu - mu) / nu_th);
        return s;
    };

    double lo = nu0 - 100.0 * nu_th;
    double hi = nu0 - 1e-12;
    if (total(lo) > total_n || total(hi) < total_n)
        throw solver_error("solve_mu: root not bracketed in [nu0 - 100 kBT/h, nu0)");

    double mu = 0.0, s = 0.0;
    for (int it = 0; it < 500; ++it) {
        mu = 0.5 * (lo + hi);
        s = total(mu);
        if (std::abs(s - total_n) <= rel_tol * total_n) break;
        (s < total_n ? lo : hi) = mu;
        if (hi - lo <= 1e-16 * std::max(1.0, std::abs(nu0))) break;
    }
    if (std::abs(s - total_n) > 10.0 * rel_tol * total_n)
        throw solver_error("solve_mu: bisection did not reach the photon-number tolerance");

    Population pop;
    pop.mu = mu;
    pop.total_n = total_n;
    pop.occupations.resize(modes.freqs.size());
    for (std::size_t i = 0; i < modes.freqs.size(); ++i)
        pop.occupations[i] = 1.0 / std::expm1((modes.freqs[i] - mu) / nu_th);
    pop.condensate_fraction = pop.occupations.front() / total_n;
    return pop;
}

// Excited-state saturation criterion: photons the excited bound modes can
// hold with the chemical potential at the ground frequency.
inline double critical_number(const ModeSet& modes, double temperature) {
    if (modes.freqs.size() < 2)
        throw validation_error("critical_number: need at least 2 bound modes");
    const double nu0 = modes.freqs.front();
    double nc = 0.0;
    for (std::size_t i = 1; i < modes.freqs.size(); ++i)
        nc += be_occupation(modes.freqs[i], nu0, temperature);
    return nc;
}

enum class WeightKind { boltzmann, bose };

// Per-mode spectral weights, normalized so the ground mode has weight 1.
// boltzmann: exp(-h(nu_i - nu_ground)/kB T); bose: occupations from solve_mu.
inline std::vector<double> thermal_weights(const ModeSet& modes, WeightKind kind,
                                           double temperature, double total_n = 0.0) {
    if (modes.freqs.empty())
        throw validation_error("thermal_weights: empty mode set");
    std::vector<double> w(modes.freqs.size());
    if (kind == WeightKind::boltzmann) {
        const double nu_th = thermal_frequency_at(temperature);
        const double nu0 = modes.freqs.front();
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = std::exp(-(modes.freqs[i] - nu0) / nu_th);
    } else {
        const Population pop = solve_mu(modes, total_n, temperature);
        w = pop.occupations;
    }
    const double wmax = *std::max_element(w.begin(), w.end());
    for (double& x : w) x /= wmax;
    return w;
}

inline void write_population(const ModeSet& modes, const Population& pop,
                             const std::string& path) {
    std::ofstream csv(path);
    if (!csv) throw io_error("write_population: cannot open " + path);
    csv << "index,nu_THz,occupation\n";
    for (std::size_t i = 0; i < pop.occupations.size(); ++i)
        csv << i << ',' << detail::fmt_double(modes.freqs[i]) << ','
            << detail::fmt_double(pop.occupations[i]) << '\n';
}

} // namespace pgl
