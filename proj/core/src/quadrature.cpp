#include "wavekin/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wavekin {

namespace {

GaussLegendre compute_rule(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p_prime = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            p_prime = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / p_prime;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * p_prime * p_prime);
    }
    return rule;
}

} // namespace

const GaussLegendre& gauss_legendre(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

namespace {

double adaptive_panel(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int depth, int max_depth) {
    const double coarse = gl_integrate(f, a, b, 8);
    const double fine = gl_integrate(f, a, b, 16);
    const double err = std::fabs(fine - coarse);
    if (err <= abs_tol || depth >= max_depth) return fine;
    const double mid = 0.5 * (a + b);
    return adaptive_panel(f, a, mid, 0.5 * abs_tol, depth + 1, max_depth) +
           adaptive_panel(f, mid, b, 0.5 * abs_tol, depth + 1, max_depth);
}

} // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (!(b >= a)) throw std::invalid_argument("adaptive_integrate: b < a");
    if (a == b) return 0.0;
    return adaptive_panel(f, a, b, abs_tol, 0, max_depth);
}

} // namespace wavekin
