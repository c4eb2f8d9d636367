#ifndef WAVEKIN_RNG_HPP
#define WAVEKIN_RNG_HPP

#include <cmath>
#include <cstdint>

namespace wavekin {

// Counter-based splittable RNG keyed by (seed, stream). Every draw is a pure
// hash of (seed, stream, counter), so parallel streams are reproducible and
// independent regardless of scheduling. The mixer is the splitmix64
// finalizer applied twice, which is enough to decorrelate adjacent counters.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream ^ 0x9e3779b97f4a7c15ULL))), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        return mix(mix(z));
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; draws two uniforms per call.
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Uniform point on S^{d-1} via a normalized isotropic Gaussian vector.
    void unit_vector(int d, double* out) {
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (int i = 0; i < d; ++i) {
                out[i] = gaussian();
                norm_sq += out[i] * out[i];
            }
        } while (norm_sq < 1e-24);
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (int i = 0; i < d; ++i) out[i] *= inv;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace wavekin

#endif
