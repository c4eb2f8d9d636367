#include "wavekin/specfun.hpp"

#include <cmath>

namespace wavekin::specfun {

namespace {

constexpr double kSeriesAsymptoticCrossover = 14.0;

// Ascending series sum_k (-1)^k (q/2)^{2k} / (k! Gamma(nu+k+1)), times
// (q/2)^nu. Long double keeps the cancellation loss near the crossover at
// ~1e-14 absolute (the double-precision loss there is ~1e-10).
double bessel_series(double nu, double q) {
    const long double x = q;
    const long double quarter_sq = 0.25L * x * x;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
        term *= -quarter_sq / (static_cast<long double>(k) * (nu + k));
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-20 * (1.0 + std::fabs(static_cast<double>(sum))))
            break;
    }
    const long double prefactor =
        std::pow(0.5L * x, static_cast<long double>(nu)) / std::tgamma(static_cast<long double>(nu) + 1.0L);
    return static_cast<double>(prefactor * sum);
}

// Hankel expansion J_nu(q) ~ sqrt(2/(pi q)) [cos(chi) P - sin(chi) Q],
// chi = q - (nu/2 + 1/4) pi. Truncated at the smallest term; for half-integer
// nu the series terminates and the result is exact up to roundoff.
double bessel_asymptotic(double nu, double q, double* err_estimate) {
    const long double x = q;
    const long double mu = 4.0L * nu * nu;
    long double p_sum = 1.0L;
    long double q_sum = 0.0L;
    long double term = 1.0L;
    long double smallest = 1.0L;
    for (int k = 1; k < 80; ++k) {
        const long double num = mu - static_cast<long double>(2 * k - 1) * (2 * k - 1);
        term *= num / (8.0L * k * x);
        const long double mag = std::fabs(static_cast<double>(term));
        if (mag > smallest) {
            // Divergent part of the asymptotic series reached; the first
            // omitted term bounds the truncation error.
            smallest = mag;
            break;
        }
        smallest = mag;
        const int phase = k % 4;
        if (phase == 1) q_sum += term;
        else if (phase == 2) p_sum -= term;
        else if (phase == 3) q_sum -= term;
        else p_sum += term;
        if (mag < 1e-22) { smallest = mag; break; }
    }
    const long double chi = x - (0.5L * nu + 0.25L) * 3.14159265358979323846264338327950288L;
    const long double amp = std::sqrt(2.0L / (3.14159265358979323846264338327950288L * x));
    if (err_estimate) *err_estimate = static_cast<double>(amp * smallest);
    return static_cast<double>(amp * (std::cos(chi) * p_sum - std::sin(chi) * q_sum));
}

} // namespace

double sphere_area(Dimension d) {
    const double half = 0.5 * d.value();
    return 2.0 * std::pow(M_PI, half) / std::tgamma(half);
}

double ball_volume(Dimension d) {
    const double half = 0.5 * d.value();
    return std::pow(M_PI, half) / std::tgamma(half + 1.0);
}

double bessel_j(double nu, double q) {
    require_finite(nu, "bessel_j nu");
    require_finite(q, "bessel_j q");
    if (q < 0.0) throw domain_error("bessel_j: q must be >= 0");
    if (nu <= -1.0) throw domain_error("bessel_j: order must be > -1");
    if (q == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw domain_error("bessel_j: J_nu(0) diverges for nu < 0");
    }
    if (q <= kSeriesAsymptoticCrossover) return bessel_series(nu, q);
    double err = 0.0;
    const double value = bessel_asymptotic(nu, q, &err);
    if (err > 1e-12)
        throw accuracy_error("bessel_j: cannot certify 1e-12 for nu=" + std::to_string(nu) +
                             ", q=" + std::to_string(q) + " (asymptotic floor " + std::to_string(err) + ")");
    return value;
}

double lambda_d(Dimension d, double q) {
    require_finite(q, "lambda_d q");
    if (q < 0.0) throw domain_error("lambda_d: q must be >= 0");
    const int dim = d.value();
    if (q < 1e-3) {
        // Even Taylor series of the sphere average through q^8:
        // sum_k (-1)^k Gamma(d/2) / (k! Gamma(k + d/2)) (q/2)^{2k}.
        const double half = 0.5 * dim;
        const double z = 0.25 * q * q;
        double coeff = 1.0;
        double sum = 1.0;
        for (int k = 1; k <= 4; ++k) {
            coeff *= -z / (k * (half + k - 1.0));
            sum += coeff;
        }
        return sum;
    }
    switch (dim) {
        case 1: return std::sqrt(M_PI) * std::sqrt(0.5 * q) * bessel_j(-0.5, q);
        case 2: return bessel_j(0.0, q);
        default: return std::tgamma(1.5) * std::sqrt(2.0 / q) * bessel_j(0.5, q);
    }
}

} // namespace wavekin::specfun
