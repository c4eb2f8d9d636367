#ifndef WAVEKIN_MICROSIM_HPP
#define WAVEKIN_MICROSIM_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wavekin/common.hpp"

namespace wavekin::microsim {

// Dilated flat torus [0, L]^d with an N^d Fourier truncation. The mode
// lattice is k = m/L, m integer, with frequencies omega_m = |2 pi m / L|^2;
// vol of the undilated torus is 1, so gamma = L^{-d}.
struct TorusModel {
    TorusModel(Dimension d, double L, int n_modes, double eps);

    Dimension d;
    double L;
    int n_modes;
    double eps;

    double gamma() const;
    std::size_t mode_count() const;
    // Signed lattice coordinate of FFT index j along one axis.
    int signed_index(int j) const { return j > n_modes / 2 ? j - n_modes : j; }
    double omega_of(const int* m_signed) const;
    // Highest frequency kept by the 2/3-rule dealias band.
    double omega_dealias_max() const;
};

// Mode amplitudes A_m in the u-hat(k) normalization: |A_m(0)| = phi(omega_m).
// The L^{-d/2} of the physical field lives in the transform, not here.
struct ModeField {
    TorusModel model;
    std::vector<std::complex<double>> amps; // FFTW row-major, N^d
    double time = 0.0;
};

// Prepared random-phase data: A_m = phi(omega_m) e^{i theta_m} on retained
// modes (|m_i| < N/2), theta_m i.i.d. uniform keyed by (seed, mode index).
// Throws when phi is not negligible (> 1e-8 of its max) at the truncation
// edge.
ModeField prepared_data(const TorusModel& model, const std::function<double(double)>& phi,
                        std::uint64_t seed);

double mass(const ModeField& field); // sum |A_m|^2

// Global Wick phase B = A e^{2 i eps gamma m t} with m the field's own mass.
ModeField wick_shift(const ModeField& field, double t);

// Strang split-step pseudo-spectral evolution with 2/3-rule dealiasing.
// Requires dt * max retained omega <= 0.5; mass is monitored and a drift
// beyond 1e-8 relative raises an accuracy_error.
ModeField evolve_nls(const ModeField& field, double t_final, double dt);

struct EnsembleSpectrum {
    std::vector<double> shell_edges;       // size S+1
    std::vector<double> mean;              // per shell; NaN where empty
    std::vector<double> stderr_;           // per shell (0 for one realization)
    std::vector<std::int64_t> mode_count;  // lattice modes per shell (0 = empty)
    std::int64_t realizations = 0;
};

// Bins |A_m|^2 by omega_m; empty shells are flagged by mode_count = 0 and a
// NaN mean, never zero-filled.
EnsembleSpectrum shell_average(const ModeField& field, const std::vector<double>& shell_edges);

// Pools two ensembles over the same edges (weighted mean / variance merge).
EnsembleSpectrum merge_spectra(const EnsembleSpectrum& a, const EnsembleSpectrum& b);

std::vector<double> default_shell_edges(double omega_max, int count);

struct PairingCase {
    std::string label;
    std::complex<double> mean;
    double stderr_;
    double expected;   // nonzero for paired quadruples
    double z;
    bool pass;
};

struct PairingReport {
    std::vector<PairingCase> cases;
    double z_threshold;
    bool all_pass;
};

// Empirical check of E[conj(c_n) c_n1 conj(c_n2) c_n3] on prepared data:
// paired quadruples match |phi|^2 |phi|^2 products, all others are
// statistically zero (Bonferroni-adjusted threshold over the set).
PairingReport pairing_expectation_check(const TorusModel& model,
                                        const std::function<double(double)>& phi,
                                        int n_realizations, std::uint64_t seed);

// Continuum prediction for the broadened collision operator in the angular
// (full-space) representation, by Monte-Carlo over two wavevectors:
//   C_t(omega) = (2 pi / t) s(d)^2 int g g F K_t(Omega) domega1 domega2 dtheta1 dtheta2.
// Used as the first-iterate and early-drift reference; cross-checks the
// radial kernel route at d = 3.
struct AngularPrediction {
    double value = 0.0;
    double stderr_ = 0.0;
};

AngularPrediction broadened_angular_prediction(Dimension d, const std::function<double(double)>& rho,
                                               double omega, double t, bool gain_only,
                                               double omega_hi, std::int64_t samples,
                                               std::uint64_t seed);

struct FirstIterateShell {
    double omega_center;
    double measured;   // shell mean of E|B^1_n|^2
    double stderr_;
    double predicted;  // (t L^{2d} / pi) C_gain(omega, t)
    double ratio;
};

struct FirstIterateReport {
    std::vector<FirstIterateShell> shells;
};

// E|B^1_n|^2 by direct evaluation of the truncated Duhamel sum over resonant
// lattice quadruples, shell-averaged and compared with the sinc^2-broadened
// gain prediction. Throws resource_error when the occupied lattice exceeds
// the quadruple enumeration budget.
FirstIterateReport first_iterate_variance(const TorusModel& model,
                                          const std::function<double(double)>& phi, double t,
                                          int n_realizations, std::uint64_t seed,
                                          const std::vector<double>& shell_edges,
                                          std::int64_t budget = 2000000000);

struct DriftShell {
    double omega_center;
    double measured;  // E|A|^2(t) - E|A|^2(0), ensemble mean over realizations
    double stderr_;
    double predicted; // (eps^2 t / pi) C_t(omega)
    bool resolved;    // |predicted| > 3 stderr
    bool sign_match;
};

struct DriftReport {
    std::vector<DriftShell> shells;
    int resolved_count = 0;
    int sign_matches = 0;
};

// Full nonlinear ensemble drift at early times against the broadened
// collision prediction; sign agreement is required on resolved shells only.
DriftReport drift_experiment(const TorusModel& model, const std::function<double(double)>& phi,
                             double t_final, double dt, int n_realizations, std::uint64_t seed,
                             const std::vector<double>& shell_edges,
                             std::int64_t prediction_samples = 2000000);

} // namespace wavekin::microsim

#endif
