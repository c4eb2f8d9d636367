#include <doctest.h>

#include <cmath>

#include "wavekin/collision.hpp"
#include "wavekin/solver.hpp"

using wavekin::Dimension;
using namespace wavekin::collision;
using namespace wavekin::solver;

namespace {

const FrequencyGrid& sgrid() {
    static FrequencyGrid g = FrequencyGrid::log_uniform(1e-3, 40.0, 160);
    return g;
}

const KernelTable& stable() {
    static KernelTable t = [] {
        KernelTableOptions opts;
        opts.omega_cutoff = 30.0;
        return KernelTable::build(Dimension(3), sgrid(), opts);
    }();
    return t;
}

EvolutionState make_state(SpectralDensity rho) { return EvolutionState{0.0, std::move(rho), 0, 0.0}; }

} // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("initial density squares the profile") {
    auto grid = FrequencyGrid::uniform(1.0, 2.0, 2);
    auto rho = initial_density([](double w) { return std::exp(-w); }, grid);
    CHECK(rho.values()[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(rho.values()[1] == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));

    auto zero = initial_density([](double) { return 0.0; }, grid);
    CHECK(zero.values()[0] == 0.0);

    auto gauss = initial_density([](double w) { return std::exp(-0.5 * (w - 2) * (w - 2)); }, grid);
    CHECK(gauss.values()[1] == doctest::Approx(std::exp(-(2.0 - 2.0))).epsilon(1e-14));
}

TEST_CASE("zero spectrum is a fixed point and the step grows to dtau_max") {
    auto state = make_state(SpectralDensity(sgrid(), std::vector<double>(sgrid().size(), 0.0)));
    StepOptions opts;
    opts.tol = 1e-8;
    for (int i = 0; i < 9; ++i) state = step(state, Dimension(3), stable(), opts);
    for (double v : state.rho.values()) CHECK(v == 0.0);
    CHECK(state.last_step == doctest::Approx(opts.dtau_max));
}

TEST_CASE("Rayleigh-Jeans states stay fixed over 100 steps") {
    std::vector<double> v(sgrid().size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.3 / (sgrid().nodes[i] + 0.3);
    auto state = make_state(SpectralDensity(sgrid(), v));
    StepOptions opts;
    opts.tol = 1e-8;
    double sup0 = 0.0;
    for (double x : v) sup0 = std::max(sup0, x);
    for (int i = 0; i < 100; ++i) state = step(state, Dimension(3), stable(), opts);
    double drift = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        drift = std::max(drift, std::fabs(state.rho.values()[i] - v[i]));
    INFO("drift=", drift, " tau=", state.tau);
    CHECK(drift <= 1e-6 * sup0);
    CHECK(state.step_count == 100);
    CHECK(state.tau > 0.0);
}

TEST_CASE("conservation ledger") {
    SUBCASE("zero spectrum") {
        auto state = make_state(SpectralDensity(sgrid(), std::vector<double>(sgrid().size(), 0.0)));
        const auto ledger = conservation_ledger(state, Dimension(3));
        CHECK(ledger.mass == 0.0);
        CHECK(ledger.energy == 0.0);
    }
    SUBCASE("d=2 boxcar has mass 1 and energy 1/2") {
        auto grid = FrequencyGrid::uniform(1e-6, 1.0, 1024);
        auto state = make_state(SpectralDensity(grid, std::vector<double>(grid.size(), 1.0)));
        const auto ledger = conservation_ledger(state, Dimension(2));
        CHECK(std::fabs(ledger.mass - 1.0) <= 1e-6);
        CHECK(std::fabs(ledger.energy - 0.5) <= 1e-6);
    }
}

TEST_CASE("Gaussian evolution conserves mass and energy to 1e-4 over tau in [0, 0.5]") {
    auto rho0 = initial_density(
        [](double w) { return std::exp(-0.5 * (w - 2.0) * (w - 2.0)); }, sgrid());
    auto state = make_state(std::move(rho0));
    const auto ledger0 = conservation_ledger(state, Dimension(3));
    StepOptions opts;
    opts.tol = 1e-8;
    state = evolve(std::move(state), Dimension(3), stable(), 0.5, opts);
    const auto ledger1 = conservation_ledger(state, Dimension(3));
    INFO("mass ", ledger0.mass, " -> ", ledger1.mass, ", energy ", ledger0.energy, " -> ",
         ledger1.energy, " in ", state.step_count, " steps");
    CHECK(std::fabs(state.tau - 0.5) < 1e-12);
    CHECK(std::fabs(ledger1.mass - ledger0.mass) <= 1e-4 * ledger0.mass);
    CHECK(std::fabs(ledger1.energy - ledger0.energy) <= 1e-4 * ledger0.energy);
    for (double v : state.rho.values()) CHECK(v >= 0.0);
}

TEST_CASE("tolerance refinement self-convergence on the Gaussian fixture") {
    auto rho0 = initial_density(
        [](double w) { return std::exp(-0.5 * (w - 2.0) * (w - 2.0)); }, sgrid());
    auto run = [&](double tol) {
        StepOptions opts;
        opts.tol = tol;
        return evolve(make_state(rho0), Dimension(3), stable(), 0.1, opts);
    };
    const auto coarse = run(1e-8);
    const auto fine = run(1e-10);
    double sup = 0.0;
    for (std::size_t i = 0; i < sgrid().size(); ++i)
        sup = std::max(sup, std::fabs(coarse.rho.values()[i] - fine.rho.values()[i]));
    INFO("sup diff ", sup);
    CHECK(sup < 1e-6);
    CHECK(fine.step_count >= coarse.step_count);
}

TEST_CASE("stationarity residual: Rayleigh-Jeans directions are nulls of the scan") {
    const double r_rj = stationarity_residual(Dimension(3), 1.0, sgrid(), stable());
    const double r_const = stationarity_residual(Dimension(3), 0.0, sgrid(), stable());
    const double r_generic = stationarity_residual(Dimension(3), 1.7, sgrid(), stable());
    INFO("r(1)=", r_rj, " r(0)=", r_const, " r(1.7)=", r_generic);
    CHECK(r_rj < 1e-2 * r_generic);
    CHECK(r_const < 1e-2 * r_generic);
}

TEST_CASE("exponent scan reports local minima") {
    const auto scan =
        scan_stationary_exponents(Dimension(3), sgrid(), stable(), 0.0, 2.0, 0.25);
    CHECK(scan.points.size() == 9);
    for (const auto& m : scan.local_minima) {
        CHECK(m.exponent > 0.0);
        CHECK(m.exponent < 2.0);
        CHECK(m.residual >= 0.0);
    }
}

TEST_SUITE_END();
