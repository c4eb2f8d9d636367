#ifndef WAVEKIN_TEST_ORACLES_HPP
#define WAVEKIN_TEST_ORACLES_HPP

#include <cmath>
#include <functional>

// Independent oracles used by the tests. These deliberately avoid the library
// code paths they are checking.

namespace oracles {

// J0 via the integral representation (1/pi) int_0^pi cos(q sin t) dt,
// trapezoid on the periodic integrand (exponentially convergent).
inline double j0_integral_rep(double q, int n = 4096) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = M_PI * (i + 0.5) / n;
        sum += std::cos(q * std::sin(t));
    }
    return sum / n;
}

// Sphere average of the plane wave over S^{d-1} by direct angular quadrature:
// d=1 two-point mean, d=2 trapezoid over the circle, d=3 midpoint in the
// polar cosine.
inline double sphere_average_plane_wave(int d, double q, int n = 8192) {
    if (d == 1) return std::cos(q);
    double sum = 0.0;
    if (d == 2) {
        for (int i = 0; i < n; ++i) {
            const double phi = 2.0 * M_PI * (i + 0.5) / n;
            sum += std::cos(q * std::cos(phi));
        }
        return sum / n;
    }
    // d=3: (1/2) int_{-1}^{1} cos(q mu) dmu by composite Simpson.
    const double h = 2.0 / n;
    sum = std::cos(-q) + std::cos(q);
    for (int i = 1; i < n; ++i) sum += std::cos(q * (-1.0 + i * h)) * (i % 2 ? 4.0 : 2.0);
    return 0.5 * sum * h / 3.0;
}

// Composite-Simpson helper for the brute-force integrals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace oracles

#endif
