#ifndef WAVEKIN_QUADRATURE_HPP
#define WAVEKIN_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace wavekin {

// Gauss-Legendre rule on [-1, 1]; nodes/weights computed once per order via
// Newton iteration on the Legendre recurrence and cached.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int n);

// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b, int n = 16);

// Globally adaptive Gauss-Kronrod-style bisection: per-panel error taken as
// the difference between n-point and 2n-point Gauss rules. Used for the
// brute-force oracles and the smooth 1D integrals; not for oscillatory tails.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 40);

} // namespace wavekin

#endif
