#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pgl/cavity.hpp"
#include "pgl/eigensolver.hpp"
#include "pgl/errors.hpp"
#include "pgl/field_io.hpp"
#include "pgl/landscape.hpp"

namespace pgl {

// Nearest-neighbor chain with on-site frequency e0 and couplings J entering
// the matrix as -J. For SSH chains the couplings alternate J_i, J_o.
struct TightBindingModel {
    int n_sites = 0;
    double e0 = 0.0;                // THz
    std::vector<double> couplings;  // THz, length n_sites - 1

    void validate() const {
        if (n_sites < 2) throw validation_error("TightBindingModel: n_sites must be >= 2");
        if (int(couplings.size()) != n_sites - 1)
            throw validation_error("TightBindingModel: need n_sites - 1 couplings");
        for (double j : couplings)
            if (!(j > 0.0)) throw validation_error("TightBindingModel: couplings must be > 0");
    }
};

struct CouplingCurve {
    std::vector<double> d;        // um, ascending
    std::vector<double> j;        // THz (NaN where a point failed)
    std::vector<std::string> errors; // per-point messages, empty on success
    bool monotone_decreasing = false;
};

struct TwoModeEigen {
    double e_s = 0.0, e_a = 0.0;              // E0 -/+ J
    std::array<double, 2> psi_s{}, psi_a{};
};

inline TwoModeEigen two_mode_eigen(double e0, double j) {
    if (!(j > 0.0)) throw validation_error("two_mode_eigen: j must be > 0");
    const double s = 1.0 / std::sqrt(2.0);
    return TwoModeEigen{e0 - j, e0 + j, {s, s}, {s, -s}};
}

struct ExtractedCoupling {
    double j = 0.0;            // (nu_1 - nu_0)/2
    bool parity_ok = false;    // ground even, first excited odd under well swap
    double ground_asym = 0.0;  // antisymmetry residuals
    double excited_sym = 0.0;
};

// Half the splitting of the lowest doublet. Also checks the parity of the
// pair under the well-swap mirror x -> -x about the grid center.
inline ExtractedCoupling extract_j(const ModeSet& modes) {
    if (modes.freqs.size() < 2)
        throw solver_error("extract_j: need at least 2 bound modes");
    if (modes.freqs.size() >= 3) {
        const double split = modes.freqs[1] - modes.freqs[0];
        if (modes.freqs[2] - modes.freqs[1] <= split)
            throw solver_error("extract_j: ground doublet not separated from the 3rd mode");
    }
    ExtractedCoupling out;
    out.j = 0.5 * (modes.freqs[1] - modes.freqs[0]);

    const Grid& g = modes.grid;
    auto asym = [&](const std::vector<double>& psi, double sign) {
        // residual of psi(x,y) - sign*psi(-x,y), relative to the field norm
        double num = 0.0, den = 0.0;
        for (int j2 = 0; j2 < g.ny; ++j2)
            for (int i = 0; i < g.nx; ++i) {
                const double a = psi[g.idx(i, j2)];
                const double b = psi[g.idx(g.nx - 1 - i, j2)];
                num += (a - sign * b) * (a - sign * b);
                den += a * a;
            }
        return std::sqrt(num / den);
    };
    out.ground_asym = asym(modes.fields[0], 1.0);   // even residual
    out.excited_sym = asym(modes.fields[1], -1.0);  // odd residual
    out.parity_ok = out.ground_asym < 1e-2 && out.excited_sym < 1e-2;
    return out;
}

// Continuum J(d) for a pillar pair: landscape -> potential -> solve ->
// extract, per distance. Per-point failures are recorded and the sweep
// continues.
inline CouplingCurve coupling_sweep(const std::vector<double>& d_list, double r, double h_s_nm,
                                    const CavityParams& cav, double dx,
                                    const SolverOptions& opts, double voxel_radius_nm = 0.0) {
    for (std::size_t i = 0; i < d_list.size(); ++i) {
        if (!(d_list[i] >= 0.1))
            throw validation_error("coupling_sweep: distances must be >= 0.1 um");
        if (i && d_list[i] <= d_list[i - 1])
            throw validation_error("coupling_sweep: distances must be ascending");
    }
    CouplingCurve curve;
    curve.d = d_list;
    curve.j.assign(d_list.size(), std::nan(""));
    curve.errors.assign(d_list.size(), "");
    for (std::size_t i = 0; i < d_list.size(); ++i) {
        try {
            const double d = d_list[i];
            Grid grid = make_centered_grid(d + 2 * r + 2 * kStructureMargin,
                                           2 * r + 2 * kStructureMargin, dx);
            HeightMap hm = make_pillars(grid, {{-d / 2, 0.0}, {d / 2, 0.0}}, r, h_s_nm);
            if (voxel_radius_nm > 0.0) hm = apply_voxel_smoothing(hm, voxel_radius_nm);
            const Hamiltonian ham = assemble_hamiltonian(height_to_potential(hm, cav), cav);
            SolverOptions o = opts;
            o.k = std::max(opts.k, 4);
            curve.j[i] = extract_j(bound_filter(solve_lowest(ham, o))).j;
        } catch (const std::exception& e) {
            curve.errors[i] = e.what();
        }
    }
    curve.monotone_decreasing = true;
    for (std::size_t i = 1; i < curve.j.size(); ++i)
        if (!(curve.j[i] < curve.j[i - 1])) curve.monotone_decreasing = false;
    return curve;
}

struct SshSpectrum {
    std::vector<double> freqs;      // ascending
    Eigen::MatrixXd vectors;        // columns, sign-fixed
    double gap = 0.0;               // inner band-edge distance, midgap states excluded
    double span = 0.0;              // nu_max - nu_min
    std::vector<int> midgap;        // indices into freqs
};

// Full diagonalization of the real symmetric tridiagonal chain matrix.
// Midgap states are eigenvalues within 25% of the gap half-width of e0.
inline SshSpectrum ssh_spectrum(const TightBindingModel& model) {
    model.validate();
    const int n = model.n_sites;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = model.e0;
    for (int i = 0; i < n - 1; ++i) h(i, i + 1) = h(i + 1, i) = -model.couplings[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);

    SshSpectrum s;
    s.freqs.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    s.vectors = es.eigenvectors();
    detail::fix_signs(s.vectors);
    s.span = s.freqs.back() - s.freqs.front();

    const double ji = model.couplings[0];
    const double jo = model.couplings.size() > 1 ? model.couplings[1] : ji;
    const double half_gap = std::abs(ji - jo);
    for (int i = 0; i < n; ++i)
        if (std::abs(s.freqs[i] - model.e0) < 0.25 * half_gap) s.midgap.push_back(i);

    double lower = -1e300, upper = 1e300;
    for (int i = 0; i < n; ++i) {
        if (std::count(s.midgap.begin(), s.midgap.end(), i)) continue;
        if (s.freqs[i] < model.e0) lower = std::max(lower, s.freqs[i]);
        else upper = std::min(upper, s.freqs[i]);
    }
    s.gap = upper - lower;
    return s;
}

// Weight on the outermost unit cells (first 2 + last 2 sites).
inline double edge_localization(const std::vector<double>& amplitudes) {
    if (amplitudes.size() < 4)
        throw validation_error("edge_localization: need at least 4 sites");
    double f = 0.0;
    const std::size_t n = amplitudes.size();
    for (std::size_t i : {std::size_t(0), std::size_t(1), n - 2, n - 1})
        f += amplitudes[i] * amplitudes[i];
    return f;
}

// Discrete winding of h(k) = j_i + j_o e^{ik} around the origin.
inline int winding_number(double j_i, double j_o) {
    if (!(j_i > 0.0 && j_o > 0.0))
        throw validation_error("winding_number: couplings must be > 0");
    if (std::abs(j_i - j_o) <= 1e-12 * std::max(j_i, j_o))
        throw validation_error("winding_number: gap closes at j_i = j_o, invariant undefined");
    const int samples = 256;
    double total = 0.0;
    std::complex<double> prev = j_i + j_o; // k = 0
    for (int m = 1; m <= samples; ++m) {
        const double k = 2.0 * constants::pi * m / samples;
        const std::complex<double> cur = j_i + j_o * std::exp(std::complex<double>(0.0, k));
        total += std::arg(cur / prev);
        prev = cur;
    }
    return int(std::lround(total / (2.0 * constants::pi)));
}

struct TbFit {
    TightBindingModel model;
    double residual = 0.0; // rms eigenvalue mismatch
    bool warning = false;  // residual > 20% of span
};

namespace detail {

// Nelder-Mead on a 2D positive-coupling objective.
inline std::pair<std::array<double, 2>, double>
nelder_mead_2d(const std::function<double(double, double)>& f, std::array<double, 2> start,
               double scale, int max_eval = 600) {
    auto eval = [&](const std::array<double, 2>& p) {
        if (p[0] <= 1e-6 || p[1] <= 1e-6) return 1e300;
        return f(p[0], p[1]);
    };
    std::array<std::array<double, 2>, 3> simplex{
        start,
        std::array<double, 2>{start[0] + scale, start[1]},
        std::array<double, 2>{start[0], start[1] + scale}};
    std::array<double, 3> val{eval(simplex[0]), eval(simplex[1]), eval(simplex[2])};
    for (int it = 0; it < max_eval; ++it) {
        std::array<int, 3> ord{0, 1, 2};
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return val[a] < val[b]; });
        const auto &best = simplex[ord[0]], &mid = simplex[ord[1]];
        auto& worst = simplex[ord[2]];
        if (val[ord[2]] - val[ord[0]] < 1e-14 * (1.0 + std::abs(val[ord[0]]))) break;
        std::array<double, 2> cen{0.5 * (best[0] + mid[0]), 0.5 * (best[1] + mid[1])};
        std::array<double, 2> refl{2 * cen[0] - worst[0], 2 * cen[1] - worst[1]};
        double fr = eval(refl);
        if (fr < val[ord[0]]) {
            std::array<double, 2> exp2{3 * cen[0] - 2 * worst[0], 3 * cen[1] - 2 * worst[1]};
            double fe = eval(exp2);
            if (fe < fr) { worst = exp2; val[ord[2]] = fe; }
            else { worst = refl; val[ord[2]] = fr; }
        } else if (fr < val[ord[1]]) {
            worst = refl; val[ord[2]] = fr;
        } else {
            std::array<double, 2> con{0.5 * (cen[0] + worst[0]), 0.5 * (cen[1] + worst[1])};
            double fc = eval(con);
            if (fc < val[ord[2]]) { worst = con; val[ord[2]] = fc; }
            else {
                for (int v : {1, 2}) {
                    auto& p = simplex[ord[v]];
                    p = {0.5 * (p[0] + best[0]), 0.5 * (p[1] + best[1])};
                    val[ord[v]] = eval(p);
                }
            }
        }
    }
    int ibest = int(std::min_element(val.begin(), val.end()) - val.begin());
    return {simplex[ibest], val[ibest]};
}

} // namespace detail

// Least-squares fit of (e0, J_i, J_o) to the sorted continuum
// eigenfrequencies of an SSH chain. Fits eigenvalues only.
inline TbFit calibrate_tb(const ModeSet& modes, const SshGeometry& geo) {
    geo.validate();
    const int n = 2 * geo.n_cells;
    if (int(modes.freqs.size()) < n)
        throw solver_error("calibrate_tb: need " + std::to_string(n) +
                           " resolvable bound modes, got " + std::to_string(modes.freqs.size()));
    std::vector<double> target(modes.freqs.begin(), modes.freqs.begin() + n);
    std::sort(target.begin(), target.end());
    double mean = 0.0;
    for (double t : target) mean += t;
    mean /= n;

    auto objective = [&](double ji, double jo) {
        TightBindingModel m;
        m.n_sites = n;
        m.e0 = 0.0;
        m.couplings.resize(n - 1);
        for (int i = 0; i < n - 1; ++i) m.couplings[i] = (i % 2 == 0) ? ji : jo;
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n - 1; ++i) h(i, i + 1) = h(i + 1, i) = -m.couplings[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        double sse = 0.0;
        for (int i = 0; i < n; ++i) {
            // tb eigenvalues have zero mean (chiral symmetry), so the optimal
            // on-site offset is the target mean
            const double d = (mean + es.eigenvalues()[i]) - target[i];
            sse += d * d;
        }
        return sse;
    };

    const double span = target.back() - target.front();
    // seed both coupling orderings from span = 2(Ji+Jo)
    const double a = 0.35 * span / 2.0, b = 0.15 * span / 2.0;
    auto [p1, f1] = detail::nelder_mead_2d(objective, {a, b}, 0.1 * span);
    auto [p2, f2] = detail::nelder_mead_2d(objective, {b, a}, 0.1 * span);
    const auto p = (f1 <= f2) ? p1 : p2;
    const double sse = std::min(f1, f2);

    TbFit fit;
    fit.model.n_sites = n;
    fit.model.e0 = mean;
    fit.model.couplings.resize(n - 1);
    for (int i = 0; i < n - 1; ++i) fit.model.couplings[i] = (i % 2 == 0) ? p[0] : p[1];
    fit.residual = std::sqrt(sse / n);
    fit.warning = span > 0.0 && fit.residual > 0.2 * span;
    return fit;
}

// Projects a continuum chain mode onto site weights by assigning each grid
// column to the nearest site center along x.
inline std::vector<double> site_weights(const Grid& g, const std::vector<double>& field,
                                        const std::vector<std::pair<double, double>>& centers) {
    std::vector<double> w(centers.size(), 0.0);
    for (int i = 0; i < g.nx; ++i) {
        std::size_t best = 0;
        double bestd = 1e300;
        for (std::size_t s = 0; s < centers.size(); ++s) {
            const double d = std::abs(g.x(i) - centers[s].first);
            if (d < bestd) { bestd = d; best = s; }
        }
        for (int j = 0; j < g.ny; ++j)
            w[best] += field[g.idx(i, j)] * field[g.idx(i, j)] * g.dx * g.dy;
    }
    return w;
}

inline void write_coupling_curve(const CouplingCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("write_coupling_curve: cannot open " + path);
    out << "d_um,J_THz,error\n";
    for (std::size_t i = 0; i < curve.d.size(); ++i)
        out << detail::fmt_double(curve.d[i]) << ',' << detail::fmt_double(curve.j[i]) << ','
            << curve.errors[i] << '\n';
}

inline void write_tb_model(const TightBindingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("write_tb_model: cannot open " + path);
    out << "n_sites = " << model.n_sites << '\n';
    out << "e0_THz = " << detail::fmt_double(model.e0) << '\n';
    for (std::size_t i = 0; i < model.couplings.size(); ++i)
        out << "J" << i << "_THz = " << detail::fmt_double(model.couplings[i]) << '\n';
}

} // namespace pgl
