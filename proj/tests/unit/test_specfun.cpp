#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wavekin/specfun.hpp"

using wavekin::Dimension;
namespace sf = wavekin::specfun;

TEST_SUITE_BEGIN("specfun");

TEST_CASE("sphere area and ball volume closed forms") {
    CHECK(sf::sphere_area(Dimension(1)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sf::sphere_area(Dimension(2)) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(sf::sphere_area(Dimension(3)) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(sf::ball_volume(Dimension(1)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sf::ball_volume(Dimension(2)) == doctest::Approx(M_PI).epsilon(1e-14));
    CHECK(sf::ball_volume(Dimension(3)) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
}

TEST_CASE("unsupported dimensions are rejected") {
    CHECK_THROWS_AS(Dimension(0), std::invalid_argument);
    CHECK_THROWS_AS(Dimension(4), std::invalid_argument);
    CHECK_THROWS_AS(Dimension(-2), std::invalid_argument);
}

TEST_CASE("J0 matches the integral representation on [0, 500]") {
    for (int i = 0; i <= 200; ++i) {
        const double q = 500.0 * i / 200.0;
        const double ref = oracles::j0_integral_rep(q, 8192);
        CHECK(std::fabs(sf::bessel_j(0.0, q) - ref) < 5e-12);
    }
}

TEST_CASE("J0 first zero located by bisection on the oracle") {
    // Sign-change bisection on the independent integral-representation oracle.
    double lo = 2.0, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (oracles::j0_integral_rep(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    const double zero = 0.5 * (lo + hi);
    CHECK(zero == doctest::Approx(2.404826).epsilon(1e-6));
    CHECK(std::fabs(sf::bessel_j(0.0, zero)) < 1e-9);
    CHECK(sf::bessel_j(0.0, 0.0) == 1.0);
}

TEST_CASE("half-integer orders reduce to trigonometric forms") {
    CHECK(std::fabs(sf::bessel_j(0.5, M_PI)) < 1e-12);
    for (double q : {0.3, 1.7, 14.1, 55.0, 320.0, 499.0}) {
        const double ref_p = std::sqrt(2.0 / (M_PI * q)) * std::sin(q);
        const double ref_m = std::sqrt(2.0 / (M_PI * q)) * std::cos(q);
        CHECK(std::fabs(sf::bessel_j(0.5, q) - ref_p) < 1e-12);
        CHECK(std::fabs(sf::bessel_j(-0.5, q) - ref_m) < 1e-12);
    }
}

TEST_CASE("bessel_j domain errors") {
    CHECK_THROWS_AS(sf::bessel_j(0.0, -1.0), wavekin::domain_error);
    CHECK_THROWS_AS(sf::bessel_j(-0.5, 0.0), wavekin::domain_error);
}

TEST_CASE("lambda_d closed-form identities to 1e-10 on (0, 100]") {
    for (int i = 1; i <= 400; ++i) {
        const double q = 100.0 * i / 400.0;
        CHECK(std::fabs(sf::lambda_d(Dimension(1), q) - std::cos(q)) < 1e-10);
        CHECK(std::fabs(sf::lambda_d(Dimension(2), q) - oracles::j0_integral_rep(q, 8192)) < 1e-10);
        CHECK(std::fabs(sf::lambda_d(Dimension(3), q) - std::sin(q) / q) < 1e-10);
    }
}

TEST_CASE("lambda_d spot values") {
    CHECK(std::fabs(sf::lambda_d(Dimension(3), M_PI)) < 1e-12);
    CHECK(std::fabs(sf::lambda_d(Dimension(1), M_PI / 3.0) - 0.5) < 1e-12);
    for (int d = 1; d <= 3; ++d) CHECK(sf::lambda_d(Dimension(d), 0.0) == 1.0);
}

TEST_CASE("lambda_d agrees with direct sphere-average quadrature") {
    for (int d = 1; d <= 3; ++d) {
        double max_abs = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double q = 50.0 * i / 199.0;
            const double ref = oracles::sphere_average_plane_wave(d, q);
            const double diff = std::fabs(sf::lambda_d(Dimension(d), q) - ref);
            max_abs = std::max(max_abs, diff);
            CHECK(std::fabs(sf::lambda_d(Dimension(d), q)) <= 1.0 + 1e-14);
        }
        CHECK(max_abs < 1e-8);
    }
}

TEST_CASE("lambda_d is flat at q -> 0+") {
    for (int d = 2; d <= 3; ++d) {
        const double slope = (sf::lambda_d(Dimension(d), 1e-6) - sf::lambda_d(Dimension(d), 0.0)) / 1e-6;
        CHECK(std::fabs(slope) < 1e-4);
    }
}

TEST_SUITE_END();
