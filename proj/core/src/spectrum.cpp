#include "wavekin/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "wavekin/quadrature.hpp"
#include "wavekin/rng.hpp"
#include "wavekin/specfun.hpp"

namespace wavekin::spectrum {

ManifoldModel::ManifoldModel(Dimension d_, double volume_, double L_)
    : d(d_), volume(volume_), c_m(0.0), L(L_) {
    if (!(volume > 0.0)) throw domain_error("ManifoldModel: volume must be positive");
    if (!(L > 0.0)) throw domain_error("ManifoldModel: L must be positive");
    c_m = std::tgamma(0.5 * d.value() + 1.0) / volume;
}

SyntheticSpectrum weyl_eigenvalues(const ManifoldModel& model, int count, Generation generation,
                                   std::uint64_t seed) {
    if (count < 1) throw domain_error("weyl_eigenvalues: count must be >= 1");
    SyntheticSpectrum spec{model, generation, seed, {}};
    spec.eigenvalues.resize(count);
    const double inv_l2 = 1.0 / (model.L * model.L);
    const double expo = 2.0 / model.d.value();
    CounterRng rng(seed, 0);
    for (int n = 0; n < count; ++n) {
        double lambda = 4.0 * M_PI * std::pow(model.c_m * n, expo);
        if (generation == Generation::weyl_jittered) lambda *= 1.0 + rng.uniform(-0.1, 0.1);
        spec.eigenvalues[n] = lambda * inv_l2;
    }
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end());
    return spec;
}

double counting_ratio(const SyntheticSpectrum& spectrum, double lambda) {
    const auto& model = spectrum.model;
    const double l2 = model.L * model.L;
    std::size_t count = 0;
    for (double ev : spectrum.eigenvalues)
        if (ev * l2 <= lambda) ++count;
    const double d = model.d.value();
    const double weyl = std::pow(2.0 * M_PI, -d) * specfun::ball_volume(model.d) * model.volume *
                        std::pow(lambda, 0.5 * d);
    if (weyl <= 0.0) throw domain_error("counting_ratio: lambda too small");
    return count / weyl;
}

double sum_to_integral_check(const SyntheticSpectrum& spectrum,
                             const std::function<double(double)>& chi, double support_lo,
                             double support_hi) {
    if (!(support_hi > support_lo) || support_lo < 0.0)
        throw domain_error("sum_to_integral_check: bad support");
    if (spectrum.eigenvalues.back() < support_hi)
        throw domain_error("sum_to_integral_check: chi support exceeds spectral coverage");

    double lhs = 0.0;
    for (double ev : spectrum.eigenvalues)
        if (ev >= support_lo && ev <= support_hi) lhs += chi(ev);

    const auto& model = spectrum.model;
    const double d = model.d.value();
    const double zeta = d * std::pow(model.L, d) /
                        (2.0 * model.c_m * std::pow(4.0 * M_PI, 0.5 * d));
    const double integral = adaptive_integrate(
        [&](double w) { return std::pow(w, 0.5 * d - 1.0) * chi(w); }, support_lo, support_hi,
        1e-12);
    const double rhs = zeta * integral;
    if (rhs == 0.0 && lhs == 0.0) return 0.0;
    return std::fabs(lhs - rhs) / std::fabs(rhs);
}

RegimeVerdict regime_validator(double L, double eps, Dimension d, double factor) {
    if (!(L > 1.0)) throw domain_error("regime_validator: L must be > 1");
    if (!(eps > 0.0)) throw domain_error("regime_validator: epsilon must be > 0");
    RegimeVerdict verdict{};
    verdict.margin_resonance = eps * std::pow(L, 1.5 * d.value());
    verdict.margin_weakness = 1.0 / eps;
    verdict.kinetic = verdict.margin_resonance >= factor && verdict.margin_weakness >= factor;
    return verdict;
}

KineticConstant kinetic_constant(Dimension d, double volume, double L, double eps, double t) {
    if (!(volume > 0.0 && L > 0.0)) throw domain_error("kinetic_constant: bad model constants");
    const double dd = d.value();
    const double gamma = std::pow(L, -dd) / volume;
    const double c_m = std::tgamma(0.5 * dd + 1.0) / volume;
    const double zeta = dd * std::pow(L, dd) / (2.0 * c_m * std::pow(4.0 * M_PI, 0.5 * dd));
    KineticConstant kc{};
    kc.lhs = 4.0 * M_PI * t * eps * eps * std::pow(gamma * zeta, 3.0);
    const double ratio = specfun::sphere_area(d) / std::pow(2.0 * M_PI, dd);
    kc.rhs = 0.5 * M_PI * M_PI * ratio * ratio * ratio * eps * eps * t / M_PI;
    kc.rel_diff = std::fabs(kc.lhs - kc.rhs) / std::max(std::fabs(kc.lhs), 1e-300);
    return kc;
}

} // namespace wavekin::spectrum
