#include "wavekin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavekin/parallel.hpp"

namespace wavekin::solver {

namespace {

using collision::KernelTable;
using collision::SpectralDensity;

std::vector<double> rhs(const collision::FrequencyGrid& grid, const std::vector<double>& values,
                        const KernelTable& table) {
    const MonotoneCubic interp = collision::make_interpolant(grid, values);
    std::vector<double> out(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        out[i] = collision::collision_operator_unchecked(interp, values[i], i, table);
    });
    return out;
}

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

} // namespace

SpectralDensity initial_density(const std::function<double(double)>& phi,
                                const collision::FrequencyGrid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = phi(grid.nodes[i]);
        require_finite(p, "initial profile value");
        values[i] = p * p;
    }
    return SpectralDensity(grid, std::move(values));
}

EvolutionState step(const EvolutionState& state, Dimension d, const KernelTable& table,
                    const StepOptions& opts) {
    const auto& y0 = state.rho.values();
    const std::size_t n = y0.size();
    double dt = state.last_step > 0.0 ? state.last_step : opts.dtau_init;
    dt = std::min(dt, opts.dtau_max);

    if (d.value() != table.dimension() || state.rho.grid().hash() != table.grid_hash())
        throw domain_error("solver::step: table does not match the state's grid and dimension");
    const auto& grid = state.rho.grid();
    std::vector<std::vector<double>> k(7);
    k[0] = rhs(grid, y0, table);

    const double scale = std::max(1e-300, *std::max_element(y0.begin(), y0.end()));

    for (;;) {
        std::vector<double> y_stage(n);
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
                y_stage[i] = y0[i] + dt * acc;
            }
            k[s] = rhs(grid, y_stage, table);
        }

        std::vector<double> y5(n);
        double err = 0.0;
        bool negative = false;
        std::size_t neg_node = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc5 = 0.0, acc4 = 0.0;
            for (int s = 0; s < 7; ++s) {
                acc5 += kB5[s] * k[s][i];
                acc4 += kB4[s] * k[s][i];
            }
            y5[i] = y0[i] + dt * acc5;
            if (y5[i] < 0.0) {
                negative = true;
                neg_node = i;
            }
            const double e = std::fabs(dt * (acc5 - acc4)) / (opts.tol * scale + opts.tol * std::fabs(y0[i]));
            err = std::max(err, e);
        }

        if (negative) {
            dt *= 0.5;
            if (dt < opts.dtau_min)
                throw convergence_error(
                    "solver::step: step size underflow while enforcing positivity at node " +
                    std::to_string(neg_node) + " (omega = " +
                    std::to_string(state.rho.grid().nodes[neg_node]) + ")");
            continue;
        }

        if (err <= 1.0) {
            EvolutionState next{state.tau + dt, state.rho.with_values(std::move(y5)),
                                state.step_count + 1, 0.0};
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            next.last_step = std::min(opts.dtau_max, dt * std::clamp(grow, 0.2, 5.0));
            return next;
        }

        dt *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
        if (dt < opts.dtau_min)
            throw convergence_error("solver::step: step size underflow (stiffness or blowup), err=" +
                                    std::to_string(err));
    }
}

EvolutionState evolve(EvolutionState state, Dimension d, const KernelTable& table, double tau_end,
                      const StepOptions& opts, const std::function<void(const EvolutionState&)>& on_accept) {
    while (state.tau < tau_end) {
        StepOptions capped = opts;
        capped.dtau_max = std::min(opts.dtau_max, tau_end - state.tau); // never overshoot tau_end
        state = step(state, d, table, capped);
        if (on_accept) on_accept(state);
    }
    return state;
}

ConservationLedger conservation_ledger(const EvolutionState& state, Dimension d) {
    const auto& nodes = state.rho.grid().nodes;
    const auto& vals = state.rho.values();
    const double p = 0.5 * d.value() - 1.0;
    ConservationLedger ledger;
    ledger.tau = state.tau;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double h = nodes[i + 1] - nodes[i];
        const double m0 = std::pow(nodes[i], p) * vals[i];
        const double m1 = std::pow(nodes[i + 1], p) * vals[i + 1];
        ledger.mass += 0.5 * h * (m0 + m1);
        ledger.energy += 0.5 * h * (nodes[i] * m0 + nodes[i + 1] * m1);
    }
    return ledger;
}

namespace {

// Smooth taper in log-omega over the outer 10% of the grid span at each end.
double taper(double omega, double lo, double hi) {
    const double l = std::log(omega), llo = std::log(lo), lhi = std::log(hi);
    const double band = 0.1 * (lhi - llo);
    auto smooth = [](double s) { return s <= 0.0 ? 0.0 : (s >= 1.0 ? 1.0 : s * s * (3.0 - 2.0 * s)); };
    return smooth((l - llo) / band) * smooth((lhi - l) / band);
}

} // namespace

double stationarity_residual(Dimension d, double exponent, const collision::FrequencyGrid& grid,
                             const collision::KernelTable& table) {
    const double lo = grid.omega_min(), hi = grid.omega_max();
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid.nodes[i];
        values[i] = std::pow(w, -exponent) * taper(w, lo, hi);
    }
    const SpectralDensity rho(grid, values);

    const std::size_t margin = grid.size() / 5;
    const double p = 0.5 * d.value() - 1.0;
    std::vector<double> c(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) {
        if (i < margin || i + margin >= grid.size()) return;
        c[i] = collision::collision_operator(d, rho, grid.nodes[i], table);
    });
    double num = 0.0, den = 0.0;
    for (std::size_t i = margin; i + margin < grid.size(); ++i) {
        const double w = i + 1 < grid.size() ? (grid.nodes[i + 1] - grid.nodes[i]) : 0.0;
        const double weight = std::pow(grid.nodes[i], p) * w;
        num += weight * c[i] * c[i];
        den += weight;
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

KzScanResult scan_stationary_exponents(Dimension d, const collision::FrequencyGrid& grid,
                                       const collision::KernelTable& table, double x_min,
                                       double x_max, double x_step) {
    KzScanResult result;
    for (double x = x_min; x <= x_max + 1e-12; x += x_step)
        result.points.push_back({x, stationarity_residual(d, x, grid, table)});
    for (std::size_t i = 1; i + 1 < result.points.size(); ++i) {
        if (result.points[i].residual < result.points[i - 1].residual &&
            result.points[i].residual < result.points[i + 1].residual)
            result.local_minima.push_back(result.points[i]);
    }
    return result;
}

} // namespace wavekin::solver
