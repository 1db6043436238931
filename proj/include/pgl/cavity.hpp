#pragma once

#include <cmath>
#include <string>

#include "pgl/constants.hpp"
#include "pgl/errors.hpp"
#include "pgl/grid.hpp"

namespace pgl {

// Physical parameters of one cavity configuration. The transverse photon
// dynamics is that of a massive 2D particle: the cutoff sets the rest
// energy and the effective mass, the printed polymer modulates the optical
// path length and acts as a potential.
//
// Units: lengths um (heights nm), frequencies THz (ordinary, cycles/s),
// energies reported as E/h in THz, temperature K.
struct CavityParams {
    int q = 0;                 // longitudinal mode number
    double lambda_cut = 0.0;   // cutoff vacuum wavelength, nm
    double n_medium = 0.0;     // refractive index of the dye solution
    double delta_n = 0.0;      // index difference polymer - medium
    double temperature = 300.0; // K

    // derived
    double d0 = 0.0;     // mechanical mirror distance, um: q*lambda/(2n)
    double m_ph = 0.0;   // effective photon mass, kg: h n^2/(c lambda)
    double nu_cut = 0.0; // cutoff frequency, THz: c/lambda
};

inline CavityParams derive_cavity(int q, double lambda_cut_nm, double n_medium,
                                  double delta_n, double temperature = 300.0) {
    if (q < 1)
        throw validation_error("derive_cavity: q must be >= 1");
    if (!(lambda_cut_nm >= 400.0 && lambda_cut_nm <= 800.0))
        throw validation_error("derive_cavity: lambda_cut must be in [400, 800] nm");
    if (!(n_medium > 1.0 && n_medium <= 2.0))
        throw validation_error("derive_cavity: n_medium must be in (1, 2]");
    if (!(delta_n > -0.5 && delta_n < 0.5))
        throw validation_error("derive_cavity: delta_n must be in (-0.5, 0.5)");
    if (!(temperature > 0.0))
        throw validation_error("derive_cavity: temperature must be > 0 K");

    CavityParams c;
    c.q = q;
    c.lambda_cut = lambda_cut_nm;
    c.n_medium = n_medium;
    c.delta_n = delta_n;
    c.temperature = temperature;

    const double lambda_m = lambda_cut_nm * 1e-9;
    c.d0 = q * (lambda_cut_nm * 1e-3) / (2.0 * n_medium);
    c.m_ph = constants::planck * n_medium * n_medium /
             (constants::light_speed * lambda_m);
    c.nu_cut = constants::light_speed / lambda_m * 1e-12;
    return c;
}

// kB*T/h in THz.
inline double thermal_frequency_at(double temperature) {
    if (!(temperature > 0.0))
        throw validation_error("thermal_frequency: temperature must be > 0 K");
    return constants::boltzmann * temperature / constants::planck * 1e-12;
}

inline double thermal_frequency(const CavityParams& cav) {
    return thermal_frequency_at(cav.temperature);
}

// V/h per node in THz: nu_cut * h_s*delta_n/(D0*n). Heights in nm, D0 in um.
// The well is attractive; the solver subtracts V, so the map stays >= 0.
inline PotentialMap height_to_potential(const HeightMap& hmap, const CavityParams& cav) {
    hmap.grid.validate();
    const double scale = cav.nu_cut * cav.delta_n / (cav.d0 * cav.n_medium) * 1e-3;
    PotentialMap pmap;
    pmap.grid = hmap.grid;
    pmap.v.resize(hmap.h.size());
    for (std::size_t n = 0; n < hmap.h.size(); ++n) {
        const double h = hmap.h[n];
        if (!(h >= 0.0) || !std::isfinite(h))
            throw validation_error("height_to_potential: heights must be finite and >= 0");
        if (h * 1e-3 >= cav.d0)
            throw geometry_error("height_to_potential: structure height " +
                                 std::to_string(h) + " nm does not fit in the cavity (D0 = " +
                                 std::to_string(cav.d0 * 1e3) + " nm)");
        const double v = scale * h;
        if (v < 0.0)
            throw validation_error("height_to_potential: repulsive potentials (delta_n < 0) "
                                   "are not supported");
        pmap.v[n] = v;
    }
    return pmap;
}

} // namespace pgl
