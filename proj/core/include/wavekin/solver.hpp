#ifndef WAVEKIN_SOLVER_HPP
#define WAVEKIN_SOLVER_HPP

#include <functional>
#include <vector>

#include "wavekin/collision.hpp"
#include "wavekin/common.hpp"

namespace wavekin::solver {

struct EvolutionState {
    double tau = 0.0;
    collision::SpectralDensity rho;
    long step_count = 0;
    double last_step = 0.0;
};

struct ConservationLedger {
    double mass = 0.0;   // int omega^{d/2-1} rho domega over the grid
    double energy = 0.0; // int omega^{d/2}   rho domega
    double tau = 0.0;
};

struct StepOptions {
    double tol = 1e-8;
    double dtau_min = 1e-10;
    double dtau_max = 0.25;
    double dtau_init = 1e-4;
};

// rho(0, omega) = |phi(omega)|^2 sampled on the grid.
collision::SpectralDensity initial_density(const std::function<double(double)>& phi,
                                           const collision::FrequencyGrid& grid);

// One accepted step of d rho/d tau = C[rho] with the Dormand-Prince 5(4)
// embedded pair. Steps producing a negative node are rejected and halved;
// below dtau_min a convergence_error reports the offending node.
EvolutionState step(const EvolutionState& state, Dimension d, const collision::KernelTable& table,
                    const StepOptions& opts);

// Integrates to tau_end, invoking on_accept after every accepted step.
EvolutionState evolve(EvolutionState state, Dimension d, const collision::KernelTable& table,
                      double tau_end, const StepOptions& opts,
                      const std::function<void(const EvolutionState&)>& on_accept = nullptr);

ConservationLedger conservation_ledger(const EvolutionState& state, Dimension d);

// Weighted L2 residual of the collision operator on rho = omega^{-x} with
// smooth log-space tapers at both grid ends; nodes within a 20% margin of
// either end are excluded from the norm.
double stationarity_residual(Dimension d, double exponent, const collision::FrequencyGrid& grid,
                             const collision::KernelTable& table);

struct ScanPoint {
    double exponent;
    double residual;
};

struct KzScanResult {
    std::vector<ScanPoint> points;
    std::vector<ScanPoint> local_minima;
};

// Residual scan over a range of spectral exponents; reports local minima
// without asserting any literature value.
KzScanResult scan_stationary_exponents(Dimension d, const collision::FrequencyGrid& grid,
                                       const collision::KernelTable& table, double x_min,
                                       double x_max, double x_step);

} // namespace wavekin::solver

#endif
