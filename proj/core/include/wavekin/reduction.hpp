#ifndef WAVEKIN_REDUCTION_HPP
#define WAVEKIN_REDUCTION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wavekin/common.hpp"
#include "wavekin/interaction.hpp"

namespace wavekin::reduction {

// Reproducible batch of quadruples of unit vectors on S^{d-1}.
struct SphereSampleBatch {
    int d = 3;
    std::int64_t count = 0;
    std::uint64_t seed = 0;
    std::vector<double> unit_vectors; // count x 4 x d, row-major

    const double* quad_begin(std::int64_t i) const { return unit_vectors.data() + i * 4 * d; }
};

SphereSampleBatch make_sphere_batch(Dimension d, std::int64_t count, std::uint64_t seed,
                                    std::uint64_t stream = 0);

struct SmoothedDeltaConfig {
    std::vector<double> sigmas = {0.8, 0.4, 0.2, 0.1}; // strictly decreasing, halving
    std::int64_t samples_per_sigma = 100000;           // >= 1e4

    void validate() const;
};

enum class CheckStatus { pass, fail, inconclusive };

struct McLevel {
    double sigma;
    double value;
    double stderr_;
};

// Four-sphere Monte-Carlo estimate of the delta overlap
//   J = s(d)^3 <delta_{R^d}(sqrt(w0) t0 - sqrt(w1) t1 + sqrt(w2) t2 - sqrt(w3) t3)>
// (uniform probability on each sphere), mollified by a Gaussian of width
// sigma and Richardson-extrapolated sigma -> 0. The identity
// J = s(d)^3 I(quad) / (2 pi)^d ties it to the interaction integral.
struct FourSphereReport {
    std::vector<McLevel> levels;
    double extrapolated = 0.0;
    double extrapolated_stderr = 0.0;
    bool extrapolation_stable = true;
};

FourSphereReport four_sphere_delta_mc(Dimension d, const interaction::FrequencyQuad& quad,
                                      const SmoothedDeltaConfig& cfg, std::uint64_t seed);

struct IdentityReport {
    interaction::FrequencyQuad quad;
    FourSphereReport mc;
    double target = 0.0;        // s(d)^3 I / (2 pi)^d from the quadrature path
    double target_error = 0.0;
    double z_score = 0.0;
    CheckStatus status = CheckStatus::inconclusive;
};

// Runs the Monte-Carlo estimate and checks the identity within 3 combined
// standard errors. When expect_infeasible is set the target is taken as 0
// (one wavenumber exceeds the sum of the others).
IdentityReport verify_identity(Dimension d, const interaction::FrequencyQuad& quad,
                               const SmoothedDeltaConfig& cfg, std::uint64_t seed,
                               bool expect_infeasible = false);

// Integrates the radially reduced kernel against a test profile in omega1
// (the frequency delta pins omega3 = omega - omega1 + omega2) along two
// routes: (a) the kernel_kstar path, (b) the g-weighted four-sphere
// Monte-Carlo average of the full-space kernel. Verifies the reduction
// identity within 3 combined standard errors.
struct ReductionCheckReport {
    double kernel_route = 0.0;
    double mc_route = 0.0;
    double mc_stderr = 0.0;
    double rel_discrepancy = 0.0;
    CheckStatus status = CheckStatus::inconclusive;
};

ReductionCheckReport radial_reduction_check(Dimension d, double omega, double omega2,
                                            const std::function<double(double)>& test_profile,
                                            double support_lo, double support_hi,
                                            const SmoothedDeltaConfig& cfg, std::uint64_t seed);

// Monochromatic random wave Phi(x) = sqrt(2/n) sum_j cos(sqrt(lambda)
// theta_j . x + phi_j); realizations are indexed and reproducible.
class MonochromaticWave {
public:
    MonochromaticWave(Dimension d, double lambda, int n_plane_waves, std::uint64_t seed);

    // Field of realization r evaluated at x (array of d coordinates).
    double operator()(std::int64_t realization, const double* x) const;

    int dimension() const { return d_; }
    double lambda() const { return lambda_; }

private:
    int d_;
    double lambda_;
    int n_;
    std::uint64_t seed_;
};

} // namespace wavekin::reduction

#endif
