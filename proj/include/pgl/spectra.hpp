#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <string>
#include <vector>

#include <fftw3.h>

#include "pgl/cavity.hpp"
#include "pgl/constants.hpp"
#include "pgl/eigensolver.hpp"
#include "pgl/errors.hpp"
#include "pgl/field_io.hpp"

namespace pgl {

enum class Axis0Kind { position, momentum };

// 2D intensity image over (position or transverse momentum) x (frequency).
// axis0: x in um or k in rad/um; axis1: frequency in THz.
struct SpectrumImage {
    Axis0Kind kind = Axis0Kind::position;
    int n0 = 0, n1 = 0;
    double a0_min = 0.0, a0_step = 0.0;
    double a1_min = 0.0, a1_step = 0.0;
    std::vector<double> intensity; // n0 x n1, idx = i0*n1 + i1
    double dispersion = 0.0;       // um per THz (position kind)
    double k_na_limit = 0.0;       // rad/um blocked beyond this (momentum kind)

    double& at(int i0, int i1) { return intensity[std::size_t(i0) * n1 + i1]; }
    double at(int i0, int i1) const { return intensity[std::size_t(i0) * n1 + i1]; }

    // integral over both axes
    double total() const {
        double s = 0.0;
        for (double v : intensity) s += v;
        return s * a0_step * a1_step;
    }
};

namespace detail {

// |FFT(psi)|^2 on the grid, normalized so sum out * dkx dky / (2 pi)^2 = 1
// for a normalized mode. Output layout matches the grid (kx fastest),
// fftshifted so k runs ascending.
inline std::vector<double> momentum_density(const Grid& g, const std::vector<double>& field) {
    const int nx = g.nx, ny = g.ny;
    std::vector<std::complex<double>> in(g.size()), out(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) in[n] = field[n];
    fftw_plan plan = fftw_plan_dft_2d(ny, nx,
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double cell = g.dx * g.dy;
    std::vector<double> dens(g.size());
    for (int j = 0; j < ny; ++j) {
        const int js = (j + ny / 2) % ny; // shifted row
        for (int i = 0; i < nx; ++i) {
            const int is = (i + nx / 2) % nx;
            dens[g.idx(is, js)] = std::norm(out[g.idx(i, j)] * cell);
        }
    }
    return dens;
}

inline double fft_k(int idx_shifted, int n, double dx) {
    // ascending k values after fftshift, spacing 2 pi/(n dx)
    return 2.0 * constants::pi * (idx_shifted - n / 2) / (n * dx);
}

inline void blur_1d(std::vector<double>& prof, double sigma_nodes) {
    if (sigma_nodes <= 0.0) return;
    const int half = std::max(1, int(std::ceil(6.0 * sigma_nodes)));
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int t = -half; t <= half; ++t)
        sum += kernel[t + half] = std::exp(-0.5 * t * t / (sigma_nodes * sigma_nodes));
    for (double& k : kernel) k /= sum;
    std::vector<double> out(prof.size(), 0.0);
    for (int i = 0; i < int(prof.size()); ++i)
        for (int t = -half; t <= half; ++t) {
            const int ii = i + t;
            if (ii >= 0 && ii < int(prof.size())) out[i] += kernel[t + half] * prof[ii];
        }
    prof = std::move(out);
}

} // namespace detail

// Slitless-spectrometer image: each mode contributes the outer product of
// its x marginal T_i(x) and its y marginal remapped to frequency via
// dnu = nu_i + (y - y_center)/dispersion. Image integral equals sum of
// weights. defocus_sigma (um) optionally blurs T_i.
inline SpectrumImage position_spectrum(const ModeSet& modes, const std::vector<double>& weights,
                                       double dispersion, double bin_width = 0.05,
                                       double defocus_sigma = 0.0) {
    if (weights.size() != modes.freqs.size())
        throw validation_error("position_spectrum: weights length must match mode count");
    if (!(dispersion > 0.0))
        throw validation_error("position_spectrum: dispersion must be > 0");
    if (!(bin_width > 0.0))
        throw validation_error("position_spectrum: bin width must be > 0");
    const Grid& g = modes.grid;
    const double yc = g.y_center();
    const double yspan = 0.5 * (g.ny - 1) * g.dy / dispersion;

    double fmin = 1e300, fmax = -1e300;
    for (double nu : modes.freqs) {
        fmin = std::min(fmin, nu - yspan);
        fmax = std::max(fmax, nu + yspan);
    }
    SpectrumImage img;
    img.kind = Axis0Kind::position;
    img.dispersion = dispersion;
    img.n0 = g.nx;
    img.a0_min = g.x0;
    img.a0_step = g.dx;
    img.a1_min = fmin - bin_width;
    img.a1_step = bin_width;
    img.n1 = int(std::ceil((fmax - img.a1_min) / bin_width)) + 2;
    img.intensity.assign(std::size_t(img.n0) * img.n1, 0.0);

    for (std::size_t m = 0; m < modes.freqs.size(); ++m) {
        const auto& psi = modes.fields[m];
        std::vector<double> tx(g.nx, 0.0), py(g.ny, 0.0);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double d = psi[g.idx(i, j)] * psi[g.idx(i, j)];
                tx[i] += d * g.dy;
                py[j] += d * g.dx;
            }
        detail::blur_1d(tx, defocus_sigma / g.dx);
        // renormalize T to unit integral after the blur (zero-padding loses mass)
        double tsum = 0.0;
        for (double v : tx) tsum += v * g.dx;
        for (double& v : tx) v /= tsum;
        for (int j = 0; j < g.ny; ++j) {
            const double dnu = modes.freqs[m] + (g.y(j) - yc) / dispersion;
            const int b = int(std::floor((dnu - img.a1_min) / bin_width));
            const double kmass = py[j] * g.dy;
            for (int i = 0; i < g.nx; ++i)
                img.at(i, b) += weights[m] * tx[i] * kmass / bin_width;
        }
    }
    return img;
}

// Momentum-space spectrum: per mode |FFT(psi)|^2 integrated over k_y and
// placed at the mode frequency. The region |k| beyond the imaging NA is
// recorded in k_na_limit, not zeroed.
inline SpectrumImage momentum_spectrum(const ModeSet& modes, const std::vector<double>& weights,
                                       const CavityParams& cav, double na,
                                       double bin_width = 0.05) {
    if (weights.size() != modes.freqs.size())
        throw validation_error("momentum_spectrum: weights length must match mode count");
    if (!(na > 0.0 && na <= 1.0))
        throw validation_error("momentum_spectrum: na must be in (0, 1]");
    if (!(bin_width > 0.0))
        throw validation_error("momentum_spectrum: bin width must be > 0");
    const Grid& g = modes.grid;

    double fmin = 1e300, fmax = -1e300;
    for (double nu : modes.freqs) {
        fmin = std::min(fmin, nu);
        fmax = std::max(fmax, nu);
    }
    SpectrumImage img;
    img.kind = Axis0Kind::momentum;
    img.n0 = g.nx;
    img.a0_step = 2.0 * constants::pi / (g.nx * g.dx);
    img.a0_min = detail::fft_k(0, g.nx, g.dx);
    img.a1_min = fmin - bin_width;
    img.a1_step = bin_width;
    img.n1 = int(std::ceil((fmax - img.a1_min) / bin_width)) + 2;
    img.intensity.assign(std::size_t(img.n0) * img.n1, 0.0);
    // wavelength in the medium sets the collectable transverse momentum
    img.k_na_limit = 2.0 * constants::pi * na * cav.n_medium / (cav.lambda_cut * 1e-3);

    const double dky = 2.0 * constants::pi / (g.ny * g.dy);
    const double inv_2pi2 = 1.0 / (4.0 * constants::pi * constants::pi);
    for (std::size_t m = 0; m < modes.freqs.size(); ++m) {
        const auto dens = detail::momentum_density(g, modes.fields[m]);
        const int b = int(std::floor((modes.freqs[m] - img.a1_min) / bin_width));
        for (int i = 0; i < g.nx; ++i) {
            double mk = 0.0;
            for (int j = 0; j < g.ny; ++j) mk += dens[g.idx(i, j)];
            mk *= dky * inv_2pi2;
            img.at(i, b) += weights[m] * mk / bin_width; // density over (k, nu)
        }
    }
    return img;
}

// Mean transverse k^2 of a mode in (rad/um)^2, via the discrete Fourier
// transform (Parseval).
inline double mean_k_squared(const Grid& g, const std::vector<double>& field) {
    const auto dens = detail::momentum_density(g, field);
    const double dkx = 2.0 * constants::pi / (g.nx * g.dx);
    const double dky = 2.0 * constants::pi / (g.ny * g.dy);
    const double w = dkx * dky / (4.0 * constants::pi * constants::pi);
    double norm = 0.0, ksq = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double ky = detail::fft_k(j, g.ny, g.dy);
        for (int i = 0; i < g.nx; ++i) {
            const double kx = detail::fft_k(i, g.nx, g.dx);
            const double d = dens[g.idx(i, j)] * w;
            norm += d;
            ksq += d * (kx * kx + ky * ky);
        }
    }
    return ksq / norm;
}

// Kinetic dispersion dnu(k) = hbar k^2/(4 pi m_ph) in THz, k in rad/um.
inline std::vector<std::pair<double, double>>
dispersion_curve(const CavityParams& cav, const std::vector<double>& k_samples) {
    std::vector<std::pair<double, double>> curve;
    curve.reserve(k_samples.size());
    for (double k : k_samples) {
        if (!std::isfinite(k))
            throw validation_error("dispersion_curve: k samples must be finite");
        const double k_si = k * 1e6;
        curve.emplace_back(k, constants::hbar * k_si * k_si /
                                  (4.0 * constants::pi * cav.m_ph) * 1e-12);
    }
    return curve;
}

inline void write_spectrum(const SpectrumImage& img, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("write_spectrum: cannot open " + path);
    out << "# " << (img.kind == Axis0Kind::position ? "position" : "momentum") << ' '
        << detail::fmt_double(img.a0_min) << ' ' << detail::fmt_double(img.a0_step) << ' '
        << detail::fmt_double(img.a1_min) << ' ' << detail::fmt_double(img.a1_step) << '\n';
    for (int i0 = 0; i0 < img.n0; ++i0) {
        for (int i1 = 0; i1 < img.n1; ++i1) {
            if (i1) out << ',';
            out << detail::fmt_double(img.at(i0, i1));
        }
        out << '\n';
    }
}

inline void write_dispersion_curve(const std::vector<std::pair<double, double>>& curve,
                                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("write_dispersion_curve: cannot open " + path);
    out << "k_rad_per_um,dnu_THz\n";
    for (const auto& [k, dnu] : curve)
        out << detail::fmt_double(k) << ',' << detail::fmt_double(dnu) << '\n';
}

} // namespace pgl
