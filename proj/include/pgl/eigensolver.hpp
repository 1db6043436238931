#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "pgl/cavity.hpp"
#include "pgl/constants.hpp"
#include "pgl/errors.hpp"
#include "pgl/field_io.hpp"
#include "pgl/grid.hpp"

namespace pgl {

// Lowest eigenmodes of the 2D effective-mass Schroedinger operator.
// Frequencies are relative to the potential minimum (the operator carries a
// +V_max/h diagonal offset so its spectrum is >= 0 and bound modes sit
// below `depth`).
struct ModeSet {
    Grid grid;
    std::vector<double> freqs;                // THz, ascending
    std::vector<std::vector<double>> fields;  // L2-normalized: sum psi^2 dx dy = 1
    double depth = 0.0;                       // V_max/h, THz
    double m_ph = 0.0;                        // kg
};

struct Hamiltonian {
    Grid grid;
    Eigen::SparseMatrix<double> mat; // H/h in THz, symmetric, Dirichlet boundary
    double depth = 0.0;              // V_max/h, THz
    double kinetic = 0.0;            // hopping prefactor t = hbar/(4 pi m dx^2), THz
    double m_ph = 0.0;
};

// 5-point finite-difference stencil on the uniform grid. Diagonal
// 4t + (V_max - V), off-diagonal -t; psi = 0 one node outside the grid.
inline Hamiltonian assemble_hamiltonian(const PotentialMap& pmap, const CavityParams& cav) {
    const Grid& g = pmap.grid;
    g.validate(); // rejects non-square cells
    if (pmap.v.size() != g.size())
        throw validation_error("assemble_hamiltonian: potential size mismatch");

    double vmax = 0.0;
    for (double v : pmap.v) {
        if (!std::isfinite(v) || v < 0.0)
            throw validation_error("assemble_hamiltonian: potential must be finite and >= 0");
        vmax = std::max(vmax, v);
    }

    const double dx_m = g.dx * 1e-6;
    const double t = constants::hbar / (4.0 * constants::pi * cav.m_ph * dx_m * dx_m) * 1e-12;

    const int nx = g.nx, ny = g.ny;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * g.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int n = int(g.idx(i, j));
            trip.emplace_back(n, n, 4.0 * t + (vmax - pmap.v[n]));
            if (i > 0) trip.emplace_back(n, n - 1, -t);
            if (i < nx - 1) trip.emplace_back(n, n + 1, -t);
            if (j > 0) trip.emplace_back(n, n - nx, -t);
            if (j < ny - 1) trip.emplace_back(n, n + nx, -t);
        }

    Hamiltonian ham;
    ham.grid = g;
    ham.mat.resize(int(g.size()), int(g.size()));
    ham.mat.setFromTriplets(trip.begin(), trip.end());
    ham.depth = vmax;
    ham.kinetic = t;
    ham.m_ph = cav.m_ph;
    return ham;
}

struct SolverOptions {
    int k = 8;
    double tol = 1e-8;       // relative residual ||H psi - nu psi|| <= tol*|nu|
    std::uint64_t seed = 42; // starting-subspace seed
    int max_iter = 600;
};

namespace detail {

// Fixes the sign of each column so its largest-magnitude entry is positive.
inline void fix_signs(Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Eigen::Index imax;
        m.col(c).cwiseAbs().maxCoeff(&imax);
        if (m(imax, c) < 0.0) m.col(c) = -m.col(c);
    }
}

inline ModeSet modeset_from(const Hamiltonian& ham, const Eigen::VectorXd& vals,
                            const Eigen::MatrixXd& vecs, int k) {
    const Grid& g = ham.grid;
    const double cell = g.dx * g.dy;
    ModeSet ms;
    ms.grid = g;
    ms.depth = ham.depth;
    ms.m_ph = ham.m_ph;
    ms.freqs.resize(k);
    ms.fields.resize(k);
    for (int c = 0; c < k; ++c) {
        ms.freqs[c] = vals[c];
        const double norm = vecs.col(c).norm() * std::sqrt(cell);
        ms.fields[c].resize(g.size());
        Eigen::Map<Eigen::VectorXd>(ms.fields[c].data(), vecs.rows()) = vecs.col(c) / norm;
    }
    return ms;
}

} // namespace detail

// Shift-invert subspace iteration with Rayleigh-Ritz. Deterministic for a
// fixed seed; throws solver_error with the achieved residual on
// non-convergence.
inline ModeSet solve_lowest(const Hamiltonian& ham, const SolverOptions& opts) {
    const int n = int(ham.mat.rows());
    const int kmax = std::min<std::int64_t>(n / 10, 512);
    if (opts.k < 1 || opts.k > kmax)
        throw validation_error("solve_lowest: k must be in [1, " + std::to_string(kmax) +
                               "] for this grid");
    if (!(opts.tol >= 1e-10 && opts.tol <= 1e-4))
        throw validation_error("solve_lowest: tol must be in [1e-10, 1e-4]");

    const int k = opts.k;
    const int p = std::min(n, k + std::max(10, k / 3));

    const double sigma = -std::max(1e-3, 0.01 * ham.depth);
    Eigen::SparseMatrix<double> shifted = ham.mat;
    for (int c = 0; c < n; ++c) shifted.coeffRef(c, c) -= sigma;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw solver_error("solve_lowest: factorization of the shifted operator failed");

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd x(n, p);
    for (int c = 0; c < p; ++c)
        for (int r = 0; r < n; ++r) x(r, c) = gauss(rng);

    Eigen::VectorXd ritz_vals;
    double worst_res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        Eigen::MatrixXd y = ldlt.solve(x);
        // orthonormalize (thin QR)
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
        Eigen::MatrixXd hq = ham.mat * q;
        Eigen::MatrixXd proj = q.transpose() * hq;
        proj = 0.5 * (proj + proj.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
        x.noalias() = q * es.eigenvectors();        // Ritz vectors, ascending
        ritz_vals = es.eigenvalues();

        Eigen::MatrixXd hz = hq * es.eigenvectors();
        worst_res = 0.0;
        for (int c = 0; c < k; ++c) {
            const double res = (hz.col(c) - ritz_vals[c] * x.col(c)).norm();
            const double scale = std::max(std::abs(ritz_vals[c]), 1e-12);
            worst_res = std::max(worst_res, res / scale);
        }
        if (worst_res <= opts.tol) {
            Eigen::MatrixXd vecs = x.leftCols(k);
            detail::fix_signs(vecs);
            return detail::modeset_from(ham, ritz_vals, vecs, k);
        }
    }
    throw solver_error("solve_lowest: no convergence after " + std::to_string(opts.max_iter) +
                       " iterations (achieved relative residual " + std::to_string(worst_res) +
                       ", requested " + std::to_string(opts.tol) + ")");
}

// Dense diagonalization, used as an independent oracle on small grids.
inline ModeSet solve_dense(const Hamiltonian& ham, int k) {
    const int n = int(ham.mat.rows());
    if (n > 64 * 64)
        throw validation_error("solve_dense: grid too large for the dense path (max 64x64)");
    if (k < 1 || k > n) throw validation_error("solve_dense: bad k");
    Eigen::MatrixXd dense(ham.mat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    Eigen::MatrixXd vecs = es.eigenvectors().leftCols(k);
    detail::fix_signs(vecs);
    return detail::modeset_from(ham, es.eigenvalues(), vecs, k);
}

// Fraction of |psi|^2 on the outermost `rings` node rings.
inline double boundary_mass(const Grid& g, const std::vector<double>& field, int rings = 3) {
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (i < rings || i >= g.nx - rings || j < rings || j >= g.ny - rings)
                m += field[g.idx(i, j)] * field[g.idx(i, j)];
    return m * g.dx * g.dy;
}

// Keeps modes below the potential depth whose weight has not leaked to the
// grid boundary (the physical cavity is unbounded; modes feeling the
// Dirichlet wall are artifacts).
inline ModeSet bound_filter(const ModeSet& modes, double boundary_tol = 1e-3) {
    ModeSet out;
    out.grid = modes.grid;
    out.depth = modes.depth;
    out.m_ph = modes.m_ph;
    for (std::size_t i = 0; i < modes.freqs.size(); ++i) {
        if (modes.freqs[i] >= modes.depth) continue;
        if (boundary_mass(modes.grid, modes.fields[i]) >= boundary_tol) continue;
        out.freqs.push_back(modes.freqs[i]);
        out.fields.push_back(modes.fields[i]);
    }
    return out;
}

// CSV manifest (index, nu_THz, bound flag) plus per-mode field files in the
// grid-field format, named mode_000.txt etc.
inline void write_modeset(const ModeSet& modes, const std::string& dir,
                          const std::string& manifest_name = "modes.csv") {
    std::ofstream csv(dir + "/" + manifest_name);
    if (!csv) throw io_error("write_modeset: cannot open " + dir + "/" + manifest_name);
    csv << "index,nu_THz,bound\n";
    for (std::size_t i = 0; i < modes.freqs.size(); ++i) {
        const bool bound = modes.freqs[i] < modes.depth &&
                           boundary_mass(modes.grid, modes.fields[i]) < 1e-3;
        csv << i << ',' << detail::fmt_double(modes.freqs[i]) << ',' << (bound ? 1 : 0) << '\n';
        char name[32];
        std::snprintf(name, sizeof(name), "mode_%03zu.txt", i);
        write_field(modes.grid, modes.fields[i], dir + "/" + name);
    }
}

} // namespace pgl
