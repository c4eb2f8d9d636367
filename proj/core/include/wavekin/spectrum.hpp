#ifndef WAVEKIN_SPECTRUM_HPP
#define WAVEKIN_SPECTRUM_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "wavekin/common.hpp"

namespace wavekin::spectrum {

// Synthetic manifold bookkeeping: C_M = Gamma(d/2 + 1) / vol(M), dilation L.
struct ManifoldModel {
    ManifoldModel(Dimension d, double volume, double L);

    Dimension d;
    double volume;
    double c_m;
    double L;
};

enum class Generation { weyl_deterministic, weyl_jittered };

struct SyntheticSpectrum {
    ManifoldModel model;
    Generation generation;
    std::uint64_t seed = 0;
    std::vector<double> eigenvalues; // dilated: lambda_n / L^2, nondecreasing
};

// lambda_n = 4 pi (C_M n)^{2/d}, optionally jittered by (1 + u_n) with
// u_n uniform in [-0.1, 0.1] and re-sorted, then divided by L^2.
SyntheticSpectrum weyl_eigenvalues(const ManifoldModel& model, int count, Generation generation,
                                   std::uint64_t seed = 0);

// #{lambda_n <= Lambda} / ((2 pi)^{-d} v(d) vol Lambda^{d/2}) on the
// undilated spectrum; tends to 1 under the counting law.
double counting_ratio(const SyntheticSpectrum& spectrum, double lambda);

// Relative error of sum_n chi(lambda_n^L) against
// zeta int omega^{d/2-1} chi(omega) domega, zeta = d L^d / (2 C_M (4 pi)^{d/2}).
// chi must be supported in [support_lo, support_hi] within spectral coverage.
double sum_to_integral_check(const SyntheticSpectrum& spectrum,
                             const std::function<double(double)>& chi, double support_lo,
                             double support_hi);

struct RegimeVerdict {
    double margin_resonance;   // epsilon / L^{-3d/2}
    double margin_weakness;    // 1 / epsilon
    bool kinetic;
};

// Operational reading of L^{-3d/2} << epsilon << 1 with "<<" meaning a
// factor of at least `factor` (default 10).
RegimeVerdict regime_validator(double L, double eps, Dimension d, double factor = 10.0);

struct KineticConstant {
    double lhs;      // 4 pi t eps^2 gamma^3 zeta^3
    double rhs;      // (pi^2/2) (s(d)/(2 pi)^d)^3 eps^2 t / pi
    double rel_diff;
};

// Both sides of the kinetic-constant identity; an algebraic identity in the
// model constants, so rel_diff is at roundoff for any inputs.
KineticConstant kinetic_constant(Dimension d, double volume, double L, double eps, double t);

} // namespace wavekin::spectrum

#endif
