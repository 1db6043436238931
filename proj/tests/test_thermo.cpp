#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "pgl/thermo.hpp"

using namespace pgl;

namespace {

// synthetic bound-mode ladder; fields are unused by the statistics
ModeSet ladder(std::vector<double> freqs) {
    ModeSet ms;
    ms.freqs = std::move(freqs);
    ms.fields.resize(ms.freqs.size());
    ms.depth = 1e9;
    return ms;
}

} // namespace

TEST_CASE("be_occupation reference points") {
    const double nu_th = thermal_frequency_at(300.0);
    // nu - mu = ln 2 * kB T / h gives exactly one photon
    CHECK(be_occupation(10.0, 10.0 - nu_th * std::log(2.0), 300.0) ==
          Catch::Approx(1.0).epsilon(1e-12));
    // nu - mu = kB T / h gives 1/(e-1)
    CHECK(be_occupation(10.0, 10.0 - nu_th, 300.0) ==
          Catch::Approx(0.5819767069).epsilon(1e-9));
}

TEST_CASE("be_occupation approaches Boltzmann far above mu") {
    const double nu_th = thermal_frequency_at(300.0);
    const double gap = 20.0 * nu_th;
    const double boltz = std::exp(-gap / nu_th);
    CHECK(be_occupation(10.0 + gap, 10.0, 300.0) == Catch::Approx(boltz).epsilon(1e-8));
}

TEST_CASE("be_occupation domain error at mu >= nu") {
    CHECK_THROWS_AS(be_occupation(10.0, 10.0, 300.0), validation_error);
    CHECK_THROWS_AS(be_occupation(10.0, 10.5, 300.0), validation_error);
}

TEST_CASE("solve_mu on a single mode matches the closed form") {
    // N = 1/expm1((nu-mu)/nu_th)  =>  mu = nu - nu_th*log(1 + 1/N)
    const double nu_th = thermal_frequency_at(300.0);
    ModeSet one = ladder({5.0});
    for (double n : {0.5, 1.0, 55.0, 469.0}) {
        Population p = solve_mu(one, n, 300.0);
        CHECK(p.mu == Catch::Approx(5.0 - nu_th * std::log1p(1.0 / n)).epsilon(1e-7));
        CHECK(p.total_n == n);
        CHECK(p.condensate_fraction == Catch::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("solve_mu conserves the photon number on a multimode set") {
    ModeSet ms = ladder({0.18, 0.45, 0.46, 0.72, 0.91, 0.92, 1.19, 1.55, 2.4, 3.7});
    for (double n : {1.0, 55.0, 144.0, 469.0, 1e4}) {
        Population p = solve_mu(ms, n, 300.0);
        double s = 0.0;
        for (double occ : p.occupations) {
            CHECK(occ > 0.0);
            s += occ;
        }
        CHECK(s == Catch::Approx(n).epsilon(1e-7));
        CHECK(p.mu < ms.freqs.front());
    }
}

TEST_CASE("solve_mu: mu and condensate fraction increase with N") {
    ModeSet ms = ladder({0.18, 0.45, 0.46, 0.72, 0.91, 0.92, 1.19, 1.55});
    double last_mu = -1e9, last_frac = 0.0;
    for (double n : {10.0, 50.0, 200.0, 1000.0, 5000.0}) {
        Population p = solve_mu(ms, n, 300.0);
        CHECK(p.mu > last_mu);
        CHECK(p.condensate_fraction > last_frac);
        last_mu = p.mu;
        last_frac = p.condensate_fraction;
    }
}

TEST_CASE("solve_mu input validation") {
    ModeSet empty = ladder({});
    CHECK_THROWS_AS(solve_mu(empty, 10.0, 300.0), validation_error);
    ModeSet ms = ladder({1.0, 2.0});
    CHECK_THROWS_AS(solve_mu(ms, 0.0, 300.0), validation_error);
    CHECK_THROWS_AS(solve_mu(ms, -5.0, 300.0), validation_error);
}

TEST_CASE("degenerate modes share the occupation evenly") {
    ModeSet single = ladder({0.2, 0.8});
    ModeSet doubled = ladder({0.2, 0.8, 0.8});
    Population ps = solve_mu(single, 100.0, 300.0);
    Population pd = solve_mu(doubled, 100.0, 300.0);
    CHECK(pd.occupations[1] == Catch::Approx(pd.occupations[2]).epsilon(1e-10));
    // extra capacity pulls mu down at fixed N
    CHECK(pd.mu < ps.mu);
}

TEST_CASE("critical_number: two-mode closed form and degeneracy doubling") {
    const double nu_th = thermal_frequency_at(300.0);
    const double gap = 1.3;
    ModeSet two = ladder({0.5, 0.5 + gap});
    CHECK(critical_number(two, 300.0) ==
          Catch::Approx(1.0 / std::expm1(gap / nu_th)).epsilon(1e-12));
    ModeSet three = ladder({0.5, 0.5 + gap, 0.5 + gap});
    CHECK(critical_number(three, 300.0) ==
          Catch::Approx(2.0 * critical_number(two, 300.0)).epsilon(1e-12));
    ModeSet one = ladder({0.5});
    CHECK_THROWS_AS(critical_number(one, 300.0), validation_error);
}

TEST_CASE("critical_number vanishes as T -> 0") {
    ModeSet two = ladder({0.5, 1.5});
    CHECK(critical_number(two, 1.0) < 1e-20); // exp(-h*1THz/kB*1K) ~ 1e-21
    CHECK(critical_number(two, 600.0) > critical_number(two, 300.0));
}

TEST_CASE("thermal_weights: normalization and the Boltzmann form") {
    ModeSet ms = ladder({0.18, 0.45, 0.72, 1.19});
    const double nu_th = thermal_frequency_at(300.0);
    auto w = thermal_weights(ms, WeightKind::boltzmann, 300.0);
    REQUIRE(w.size() == 4);
    CHECK(w[0] == 1.0);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(w[i] == Catch::Approx(std::exp(-(ms.freqs[i] - ms.freqs[0]) / nu_th))
                          .epsilon(1e-12));
}

TEST_CASE("condensation suppresses the relative excited-mode weights") {
    // occ_i/occ_0 <= exp(-(nu_i - nu_0)/nu_th): the ground mode is enhanced
    ModeSet ms = ladder({0.18, 0.45, 0.72, 1.19, 1.55});
    auto wb = thermal_weights(ms, WeightKind::boltzmann, 300.0);
    auto wbose = thermal_weights(ms, WeightKind::bose, 300.0, 469.0);
    CHECK(wbose[0] == 1.0);
    for (std::size_t i = 1; i < wb.size(); ++i)
        CHECK(wbose[i] <= wb[i] * (1.0 + 1e-12));
}

TEST_CASE("write_population emits one row per mode") {
    namespace fs = std::filesystem;
    ModeSet ms = ladder({0.18, 0.45});
    Population p = solve_mu(ms, 42.0, 300.0);
    const std::string path = fs::temp_directory_path() / "pgl_pop.csv";
    write_population(ms, p, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,nu_THz,occupation");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
    fs::remove(path);
}
