#ifndef WAVEKIN_INTERACTION_HPP
#define WAVEKIN_INTERACTION_HPP

#include <array>

#include "wavekin/common.hpp"

namespace wavekin::interaction {

// Ordered quadruple of nonnegative frequencies (eigenvalue scale).
struct FrequencyQuad {
    std::array<double, 4> w;

    FrequencyQuad(double w0, double w1, double w2, double w3) : w{w0, w1, w2, w3} {
        for (double v : w) {
            require_finite(v, "FrequencyQuad entry");
            if (v < 0.0) throw domain_error("FrequencyQuad: entries must be >= 0");
        }
    }

    FrequencyQuad scaled(double factor) const {
        return {w[0] * factor, w[1] * factor, w[2] * factor, w[3] * factor};
    }
};

enum class TailMethod { zero_partitioned_accelerated, closed_form_d3 };

struct QuadratureReport {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int panels_used = 0;
    TailMethod tail_method = TailMethod::zero_partitioned_accelerated;
};

// The four-point interaction integral
//   I(w0..w3) = s(d) * int_0^inf q^{d-1} prod_j Lambda_d(sqrt(w_j) q) dq.
// The integrand's zeros are bracketed (union of the factors' zero lattices),
// each panel integrated by Gauss-Legendre, and the remaining tail handled by
// Euler acceleration of the alternating panel series (d=2) or by an exact
// cosine-decomposition tail (d=3). Symmetric in the four arguments.
//
// tol is interpreted relative to max(1, |I|). Throws domain_error for d=1,
// entries below the positivity floor, or tol < 1e-10; convergence_error when
// the d=2 tail acceleration stagnates (which provably happens whenever some
// signed combination of the four wavenumbers vanishes).
QuadratureReport interaction_integral(Dimension d, const FrequencyQuad& quad, double tol);

// Relative residual of the scaling law I(quad / L^2) = L^d I(quad).
double scaling_check(Dimension d, const FrequencyQuad& quad, double L, double tol = 1e-8);

// d=3 exact reduction: I = (4 pi / prod a_j) * int_0^inf q^{-2} prod sin(a_j q) dq
// with a_j = sqrt(w_j), the integral in closed piecewise-linear form
//   -(pi/32) sum_{sigma in {+-1}^4} (prod sigma) |sigma . a|.
double interaction_integral_closed_d3(const FrequencyQuad& quad);

} // namespace wavekin::interaction

#endif
