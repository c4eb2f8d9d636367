#ifndef WAVEKIN_SPECFUN_HPP
#define WAVEKIN_SPECFUN_HPP

#include "wavekin/common.hpp"

namespace wavekin::specfun {

// Area of the unit sphere S^{d-1}: s(d) = 2 pi^{d/2} / Gamma(d/2).
double sphere_area(Dimension d);

// Volume of the unit ball in R^d: v(d) = pi^{d/2} / Gamma(d/2 + 1).
double ball_volume(Dimension d);

// Bessel function of the first kind J_nu(q), q >= 0.
//
// Power series below q = 14, Hankel-type asymptotic expansion above, both
// accumulated in long double. For nu in {-1/2, 0, 1/2} this is accurate to
// better than 1e-12 absolute on q in [0, 500] (the asymptotic series for the
// half-integer orders terminates exactly). Other orders nu > -1 go through
// the same machinery; an accuracy_error is raised if the internal error
// estimate cannot certify 1e-12.
double bessel_j(double nu, double q);

// Correlation function of the monochromatic random wave: the average of the
// plane wave e^{i q theta . e} over directions theta on S^{d-1}, which equals
// Gamma(d/2) (q/2)^{-nu} J_nu(q) with nu = d/2 - 1. Lambda_d(0) = 1 is the
// limit value; an even Taylor series is used below q = 1e-3 to sidestep the
// removable 0/0 in the closed form.
double lambda_d(Dimension d, double q);

} // namespace wavekin::specfun

#endif
