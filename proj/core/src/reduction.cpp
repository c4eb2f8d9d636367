#include "wavekin/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "wavekin/collision.hpp"
#include "wavekin/parallel.hpp"
#include "wavekin/quadrature.hpp"
#include "wavekin/rng.hpp"
#include "wavekin/specfun.hpp"

namespace wavekin::reduction {

namespace {

constexpr std::int64_t kMcBlock = 16384;

struct BlockMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t n = 0;
};

// Gaussian-mollified delta at the four-vector combination, averaged over
// uniform sphere quadruples; returns s(d)^3 x sample moments.
BlockMoments mc_block(Dimension dim, const interaction::FrequencyQuad& quad, double sigma,
                      std::int64_t count, std::uint64_t seed, std::uint64_t stream) {
    const int d = dim.value();
    const double s3 = std::pow(specfun::sphere_area(dim), 3);
    const double norm = std::pow(2.0 * M_PI * sigma * sigma, -0.5 * d);
    const double a[4] = {std::sqrt(quad.w[0]), -std::sqrt(quad.w[1]), std::sqrt(quad.w[2]),
                         -std::sqrt(quad.w[3])};
    CounterRng rng(seed, stream);
    BlockMoments m;
    double theta[3];
    double s_vec[3];
    for (std::int64_t i = 0; i < count; ++i) {
        for (int c = 0; c < d; ++c) s_vec[c] = 0.0;
        for (int j = 0; j < 4; ++j) {
            rng.unit_vector(d, theta);
            for (int c = 0; c < d; ++c) s_vec[c] += a[j] * theta[c];
        }
        double r2 = 0.0;
        for (int c = 0; c < d; ++c) r2 += s_vec[c] * s_vec[c];
        const double g = s3 * norm * std::exp(-0.5 * r2 / (sigma * sigma));
        m.sum += g;
        m.sum_sq += g * g;
        ++m.n;
    }
    return m;
}

McLevel run_level(Dimension d, const interaction::FrequencyQuad& quad, double sigma,
                  std::int64_t samples, std::uint64_t seed, std::uint64_t level_tag) {
    const std::int64_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<BlockMoments> partial(blocks);
    parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
        const std::int64_t lo = static_cast<std::int64_t>(b) * kMcBlock;
        const std::int64_t n = std::min<std::int64_t>(kMcBlock, samples - lo);
        partial[b] = mc_block(d, quad, sigma, n, seed, (level_tag << 32) | b);
    });
    BlockMoments total;
    for (const auto& m : partial) { // fixed merge order, thread-count independent
        total.sum += m.sum;
        total.sum_sq += m.sum_sq;
        total.n += m.n;
    }
    const double mean = total.sum / total.n;
    const double var = std::max(0.0, total.sum_sq / total.n - mean * mean);
    return {sigma, mean, std::sqrt(var / total.n)};
}

// Richardson/Neville extrapolation in sigma^2 to sigma = 0; returns the
// linear weights of the input levels so the variance can be propagated.
std::vector<double> extrapolation_weights(const std::vector<double>& sigmas) {
    const std::size_t n = sigmas.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = sigmas[i] * sigmas[i];
    std::vector<double> weights(n, 0.0);
    for (std::size_t basis = 0; basis < n; ++basis) {
        std::vector<double> t(n, 0.0);
        t[basis] = 1.0;
        for (std::size_t j = 1; j < n; ++j)
            for (std::size_t k = n - 1; k >= j; --k) {
                const double ratio = h[k - j] / h[k];
                t[k] = t[k] + (t[k] - t[k - 1]) / (ratio - 1.0);
                if (k == j) break;
            }
        weights[basis] = t[n - 1];
    }
    return weights;
}

} // namespace

void SmoothedDeltaConfig::validate() const {
    if (sigmas.empty()) throw domain_error("SmoothedDeltaConfig: need at least one sigma");
    for (std::size_t i = 1; i < sigmas.size(); ++i)
        if (!(sigmas[i] < sigmas[i - 1]))
            throw domain_error("SmoothedDeltaConfig: sigma sequence must strictly decrease");
    if (sigmas.back() <= 0.0) throw domain_error("SmoothedDeltaConfig: sigmas must be positive");
    if (samples_per_sigma < 10000)
        throw domain_error("SmoothedDeltaConfig: need at least 1e4 samples per sigma");
}

SphereSampleBatch make_sphere_batch(Dimension d, std::int64_t count, std::uint64_t seed,
                                    std::uint64_t stream) {
    SphereSampleBatch batch;
    batch.d = d.value();
    batch.count = count;
    batch.seed = seed;
    batch.unit_vectors.resize(static_cast<std::size_t>(count) * 4 * d.value());
    CounterRng rng(seed, stream);
    for (std::size_t i = 0; i < batch.unit_vectors.size(); i += d.value())
        rng.unit_vector(d.value(), batch.unit_vectors.data() + i);
    return batch;
}

FourSphereReport four_sphere_delta_mc(Dimension d, const interaction::FrequencyQuad& quad,
                                      const SmoothedDeltaConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    for (double w : quad.w)
        if (w < kOmegaFloor) throw domain_error("four_sphere_delta_mc: frequency below floor");

    FourSphereReport report;
    for (std::size_t l = 0; l < cfg.sigmas.size(); ++l)
        report.levels.push_back(
            run_level(d, quad, cfg.sigmas[l], cfg.samples_per_sigma, seed, l));

    const std::size_t n = report.levels.size();
    if (n == 1) {
        report.extrapolated = report.levels[0].value;
        report.extrapolated_stderr = report.levels[0].stderr_;
        return report;
    }
    // Diagonal of the extrapolation tableau using the first k levels;
    // instability shows up as growing corrections beyond the noise.
    std::vector<double> diagonal(n);
    std::vector<double> diag_err(n);
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<double> sig(k);
        for (std::size_t i = 0; i < k; ++i) sig[i] = report.levels[i].sigma;
        const auto w = extrapolation_weights(sig);
        double value = 0.0, var = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            value += w[i] * report.levels[i].value;
            var += w[i] * w[i] * report.levels[i].stderr_ * report.levels[i].stderr_;
        }
        diagonal[k - 1] = value;
        diag_err[k - 1] = std::sqrt(var);
    }
    report.extrapolated = diagonal[n - 1];
    report.extrapolated_stderr = diag_err[n - 1];
    for (std::size_t j = 2; j < n; ++j) {
        const double prev = std::fabs(diagonal[j - 1] - diagonal[j - 2]);
        const double cur = std::fabs(diagonal[j] - diagonal[j - 1]);
        const double noise = 3.0 * (diag_err[j] + diag_err[j - 1]);
        if (cur > 2.0 * prev + noise) report.extrapolation_stable = false;
    }
    return report;
}

IdentityReport verify_identity(Dimension d, const interaction::FrequencyQuad& quad,
                               const SmoothedDeltaConfig& cfg, std::uint64_t seed,
                               bool expect_infeasible) {
    IdentityReport report{quad, four_sphere_delta_mc(d, quad, cfg, seed), 0.0, 0.0, 0.0,
                          CheckStatus::inconclusive};
    if (expect_infeasible) {
        // The mollified estimates decay exponentially in 1/sigma^2 here, which
        // polynomial extrapolation overshoots; the statistical-zero statement
        // is about the resolving level itself.
        const auto& last = report.mc.levels.back();
        report.z_score = last.stderr_ > 0.0 ? std::fabs(last.value) / last.stderr_
                                            : (last.value == 0.0 ? 0.0 : HUGE_VAL);
        report.status = report.z_score <= 3.0 ? CheckStatus::pass : CheckStatus::fail;
        return report;
    }
    {
        const auto ii = interaction::interaction_integral(d, quad, 1e-7);
        const double scale = std::pow(specfun::sphere_area(d), 3) /
                             std::pow(2.0 * M_PI, d.value());
        report.target = scale * ii.value;
        report.target_error = scale * ii.abs_error_estimate;
    }
    const double combined = std::sqrt(report.mc.extrapolated_stderr * report.mc.extrapolated_stderr +
                                      report.target_error * report.target_error);
    report.z_score = combined > 0.0
                         ? std::fabs(report.mc.extrapolated - report.target) / combined
                         : HUGE_VAL;
    if (!report.mc.extrapolation_stable)
        report.status = CheckStatus::inconclusive;
    else if (report.z_score <= 3.0)
        report.status = CheckStatus::pass;
    else
        report.status = CheckStatus::fail;
    return report;
}

ReductionCheckReport radial_reduction_check(Dimension d, double omega, double omega2,
                                            const std::function<double(double)>& test_profile,
                                            double support_lo, double support_hi,
                                            const SmoothedDeltaConfig& cfg, std::uint64_t seed) {
    if (!(support_hi > support_lo) || support_lo < kOmegaFloor)
        throw domain_error("radial_reduction_check: bad test support");
    if (omega - support_hi + omega2 < kOmegaFloor)
        throw domain_error("radial_reduction_check: induced omega3 leaves the domain");

    const int n_nodes = 12;
    const auto& rule = gauss_legendre(n_nodes);
    const double mid = 0.5 * (support_lo + support_hi);
    const double half = 0.5 * (support_hi - support_lo);
    const double two_pi_d = std::pow(2.0 * M_PI, d.value());
    auto g_weight = [&](double w) {
        return 0.5 / two_pi_d * std::pow(w, 0.5 * d.value() - 1.0);
    };

    ReductionCheckReport report;
    double var = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double w1 = mid + half * rule.nodes[i];
        const double w3 = omega - w1 + omega2;
        const double wgt = half * rule.weights[i] * test_profile(w1);
        const interaction::FrequencyQuad quad{omega, w1, omega2, w3};

        report.kernel_route += wgt * collision::kernel_kstar(d, quad, 1e-7);

        const auto mc = four_sphere_delta_mc(d, quad, cfg, seed + 1000003 * i);
        // K~ from the full-space kernel: (g1 g2 g3 / s) (2 pi)^d (4 pi^2) J_delta.
        // The sampler returns J_delta / s (probability measures times s^3),
        // so the 1/s and the s cancel against one factor of the estimate.
        const double geom = g_weight(w1) * g_weight(omega2) * g_weight(w3) * two_pi_d *
                            4.0 * M_PI * M_PI;
        report.mc_route += wgt * geom * mc.extrapolated;
        var += wgt * geom * mc.extrapolated_stderr * wgt * geom * mc.extrapolated_stderr;
    }
    report.mc_stderr = std::sqrt(var);
    const double denom = std::max(std::fabs(report.kernel_route), 1e-300);
    report.rel_discrepancy = std::fabs(report.kernel_route - report.mc_route) / denom;
    if (report.mc_stderr > 0.35 * denom)
        report.status = CheckStatus::inconclusive;
    else if (std::fabs(report.kernel_route - report.mc_route) <= 3.0 * report.mc_stderr)
        report.status = CheckStatus::pass;
    else
        report.status = CheckStatus::fail;
    return report;
}

MonochromaticWave::MonochromaticWave(Dimension d, double lambda, int n_plane_waves,
                                     std::uint64_t seed)
    : d_(d.value()), lambda_(lambda), n_(n_plane_waves), seed_(seed) {
    if (n_plane_waves < 64) throw domain_error("MonochromaticWave: need at least 64 plane waves");
    if (!(lambda > 0.0)) throw domain_error("MonochromaticWave: lambda must be positive");
}

double MonochromaticWave::operator()(std::int64_t realization, const double* x) const {
    CounterRng rng(seed_, static_cast<std::uint64_t>(realization));
    const double k = std::sqrt(lambda_);
    double theta[3];
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) {
        rng.unit_vector(d_, theta);
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        double dot = 0.0;
        for (int c = 0; c < d_; ++c) dot += theta[c] * x[c];
        acc += std::cos(k * dot + phase);
    }
    return std::sqrt(2.0 / n_) * acc;
}

} // namespace wavekin::reduction
