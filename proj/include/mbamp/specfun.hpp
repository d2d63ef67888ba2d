#pragma once

#include "mbamp/types.hpp"

namespace mbamp {

/// Modified Bessel function of the first kind I_nu(x) for 0 <= nu <= 50, 0 <= x <= 700.
/// Power series up to x = 30, asymptotic expansion beyond (Hankel for nu < 2,
/// Debye's uniform expansion otherwise).
double bessel_i(double nu, double x);

/// The two branches, exposed so the switch point can be checked.
double bessel_i_series(double nu, double x);
double bessel_i_asymptotic(double nu, double x);

/// ln I_nu(x); avoids overflow for large x.
double log_bessel_i(double nu, double x);

inline constexpr double kBesselSwitch = 30.0;

struct GammaValue {
  double modulus = 0.0;
  double argument = 0.0;  // principal value in (-pi, pi]
};

/// Lanczos log-gamma for Re z >= 1/2.
cplx log_gamma(cplx z);

/// Gamma(iy) for 1e-8 <= y <= 50.
GammaValue gamma_imag(double y);

/// arg Gamma(iy) without wrapping, continuous in y, tending to -pi/2 as y -> 0+.
double arg_gamma_imag_continuous(double y);

}  // namespace mbamp
