#ifndef WAVEKIN_COLLISION_HPP
#define WAVEKIN_COLLISION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavekin/common.hpp"
#include "wavekin/interaction.hpp"
#include "wavekin/pchip.hpp"

namespace wavekin::collision {

enum class Spacing { uniform, log_uniform };

struct FrequencyGrid {
    std::vector<double> nodes;
    Spacing spacing = Spacing::uniform;

    static FrequencyGrid uniform(double lo, double hi, int n);
    static FrequencyGrid log_uniform(double lo, double hi, int n);

    double omega_max() const { return nodes.back(); }
    double omega_min() const { return nodes.front(); }
    std::size_t size() const { return nodes.size(); }

    // Order-sensitive hash of the node bits; keys kernel-table caches.
    std::uint64_t hash() const;

    void validate() const;
};

// Interpolation abscissa for a grid: log-uniform grids interpolate in
// log(omega), which keeps the Hermite stencils uniform and the relative
// accuracy flat across the infrared end.
double grid_abscissa(const FrequencyGrid& grid, double omega);

// Monotone piecewise-cubic interpolant of node values over the grid's
// interpolation abscissa.
MonotoneCubic make_interpolant(const FrequencyGrid& grid, const std::vector<double>& values);

// Radial spectrum rho(omega) on a grid: nonnegative node values with a
// monotone piecewise-cubic interpolant that reproduces the nodes exactly and
// evaluates to zero outside the grid range.
class SpectralDensity {
public:
    SpectralDensity(FrequencyGrid grid, std::vector<double> values);

    const FrequencyGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const MonotoneCubic& interpolant() const { return interp_; }
    double operator()(double omega) const {
        if (omega < grid_.omega_min() || omega > grid_.omega_max()) return 0.0;
        return interp_(grid_abscissa(grid_, omega));
    }

    SpectralDensity with_values(std::vector<double> values) const {
        return SpectralDensity(grid_, std::move(values));
    }

private:
    FrequencyGrid grid_;
    std::vector<double> values_;
    MonotoneCubic interp_;
};

// Resonance modulus Omega = w0 - w1 + w2 - w3.
double resonance_modulus(const interaction::FrequencyQuad& quad);

// Alternating sum of triple products sum_j (-1)^j prod_{l != j} rho_l.
double f_term(double r0, double r1, double r2, double r3);

// (pi^2/2) (s(d)/(2pi)^d)^3.
double kstar_prefactor(Dimension d);

// Smooth kernel density K~ = prefactor * (w1 w2 w3)^{d/2-1} * I(quad);
// the frequency delta is factored out, so the quad need not be resonant.
// d=3 goes through the exact closed form for I, d=2 through the quadrature.
double kernel_kstar(Dimension d, const interaction::FrequencyQuad& quad, double tol);

struct KernelTableOptions {
    double tol = 1e-6;            // interaction-integral tolerance (d=2 path)
    int panels_per_dim = 8;       // base panels per direction and region
    int gl_points = 6;            // Gauss-Legendre points per panel direction
    int kink_refine_depth = 3;    // quadtree refinement across |sigma.a| kinks
    double omega_cutoff = 0.0;    // 0: use grid omega_max
};

// Precomputed quadrature stencil of the delta-resolved (omega1, omega2)
// integration: per grid node, points carrying weight x kernel plus the
// interpolation slots of the three rho arguments. rho-independent, reused
// across all solver steps.
class KernelTable {
public:
    struct Point {
        double wk;            // quadrature weight x K~
        double t1, t2, t3;    // local Hermite coordinates of omega_{1,2,3}
        std::int32_t i1, i2, i3; // grid intervals; -1 means rho = 0 there
    };

    static KernelTable build(Dimension d, const FrequencyGrid& grid, const KernelTableOptions& opts);

    // Binary cache with a validating header; mismatched or corrupted files
    // yield nullopt and the caller rebuilds.
    void save(const std::string& path) const;
    static std::optional<KernelTable> load(const std::string& path, Dimension d,
                                           const FrequencyGrid& grid, const KernelTableOptions& opts);

    // Load when a valid cache exists, otherwise build and save (best effort).
    static KernelTable load_or_build(Dimension d, const FrequencyGrid& grid,
                                     const KernelTableOptions& opts, const std::string& cache_dir);

    int dimension() const { return d_; }
    double omega_cutoff() const { return cutoff_; }
    double tol() const { return tol_; }
    std::uint64_t grid_hash() const { return grid_hash_; }
    const std::vector<Point>& stencil(std::size_t node) const { return stencils_[node]; }
    std::size_t total_points() const;

private:
    int d_ = 3;
    double tol_ = 0.0;
    double cutoff_ = 0.0;
    std::uint64_t grid_hash_ = 0;
    std::uint64_t opts_hash_ = 0;
    std::vector<std::vector<Point>> stencils_;
};

// Collision operator C[rho](omega) at a grid node: 2D quadrature of
// K~(omega, w1, w2) F(rho...) over {w1, w2 >= floor, floor <= w3 <= cutoff},
// with the frequency delta resolved in w3 = omega - w1 + w2. omega must be a
// node of the grid the table was built for.
double collision_operator(Dimension d, const SpectralDensity& rho, double omega,
                          const KernelTable& table);

// Same contraction on a bare interpolant; used by the time stepper on
// internal Runge-Kutta stages, which may transiently dip negative and so
// cannot be wrapped in a SpectralDensity.
double collision_operator_unchecked(const MonotoneCubic& interp, double rho_at_node,
                                    std::size_t node_index, const KernelTable& table);

struct BroadenedOptions {
    double tol = 1e-6;        // d=2 kernel tolerance
    int outer_panels = 10;    // (w1, w2) panels per direction
    int outer_gl = 6;
    int kink_refine_depth = 3;
    int lobes = 64;           // sinc^2 lobes resolved on each side of Omega = 0
    double omega_cutoff = 0.0;
    bool gain_only = false;   // keep only the rho1 rho2 rho3 term of F
};

// Time-broadened variant: 3D quadrature with the frequency delta replaced by
// sin(t Omega / 2)^2 / (2 pi t (Omega/2)^2); approaches collision_operator as
// t grows. The inner w3 quadrature is graded lobe-by-lobe around Omega = 0.
double broadened_collision_operator(Dimension d, const SpectralDensity& rho, double omega,
                                    double t, const BroadenedOptions& opts = {});

} // namespace wavekin::collision

#endif
