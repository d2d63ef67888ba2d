#include "doctest.h"
#include "mbamp/errors.hpp"
#include "mbamp/specfun.hpp"

#include <cmath>

using namespace mbamp;

namespace {

// I_nu(x) = sum (x/2)^(2k+nu) / (k! Gamma(k+nu+1)), summed until the terms stop mattering
double series_oracle(double nu, double x) {
  long double term = std::pow(0.5L * x, nu) / std::tgamma(nu + 1.0L);
  long double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= 0.25L * x * x / (k * (k + nu));
    sum += term;
    if (term < 1e-22L * sum) break;
  }
  return static_cast<double>(sum);
}

// arg Gamma(iy) from the Weierstrass product, with the tail of the sum estimated
double arg_gamma_oracle(double y) {
  const double euler = 0.57721566490153286061;
  long double s = 0;
  const int K = 2000000;
  for (int k = K; k >= 1; --k) s += y / static_cast<long double>(k) - std::atan(y / static_cast<long double>(k));
  // sum_{k > K} (y/k)^3 / 3 ~ y^3 / (6 K^2)
  s += std::pow(y, 3) / (6.0L * K * K);
  return static_cast<double>(-euler * y - kPi / 2 + s);
}

double wrap(double a) { return std::remainder(a, 2 * kPi); }

}  // namespace

TEST_CASE("Bessel values at the origin and closed forms") {
  CHECK(bessel_i(0, 0) == 1.0);
  CHECK(bessel_i(1, 0) == 0.0);
  CHECK(bessel_i(0.5, 1) == doctest::Approx(std::sqrt(2 / kPi) * std::sinh(1.0)).epsilon(1e-14));
  CHECK(bessel_i(0.5, 1) == doctest::Approx(0.9376749).epsilon(1e-7));
  CHECK(bessel_i(0, 1) == doctest::Approx(series_oracle(0, 1)).epsilon(1e-14));
  CHECK(bessel_i(0, 1) == doctest::Approx(1.2660658).epsilon(1e-7));
}

TEST_CASE("Bessel half-integer order is exact across the switch") {
  for (double x : {0.5, 2.0, 10.0, 29.0, 31.0, 60.0, 200.0}) {
    const double exact = std::sqrt(2 / (kPi * x)) * std::sinh(x);
    CHECK(std::fabs(bessel_i(0.5, x) / exact - 1) < (x <= 30 ? 1e-12 : 1e-9));
  }
}

TEST_CASE("Bessel series against a long-double oracle") {
  for (double nu : {0.0, 1.0, 1.5, 3.0, 7.25, 20.0}) {
    for (double x : {0.1, 1.0, 5.0, 15.0, 29.5}) {
      CHECK(std::fabs(bessel_i(nu, x) / series_oracle(nu, x) - 1) < 1e-12);
    }
  }
}

TEST_CASE("Bessel recurrence") {
  for (int nu = 1; nu <= 10; ++nu) {
    for (double x = 0.5; x <= 20.0; x += 0.5) {
      const double lhs = bessel_i(nu - 1, x) - bessel_i(nu + 1, x);
      const double rhs = 2.0 * nu / x * bessel_i(nu, x);
      CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::fabs(rhs));
    }
  }
}

TEST_CASE("Bessel large-argument form") {
  for (double nu : {0.0, 1.0, 2.0, 5.0}) {
    for (double x : {50.0, 100.0, 400.0}) {
      CHECK(std::fabs(bessel_i(nu, x) * std::sqrt(2 * kPi * x) * std::exp(-x) - 1) <= std::fabs(4 * nu * nu - 1) / (8 * x) * (1 + (4 * nu * nu + 9) / (8 * x)));
    }
  }
}

TEST_CASE("Bessel branches agree at the switch point") {
  for (double nu : {0.0, 1.0, 1.7, 4.0, 12.0}) {
    const double s = bessel_i_series(nu, kBesselSwitch), a = bessel_i_asymptotic(nu, kBesselSwitch);
    CHECK(std::fabs(a / s - 1) < 1e-9);
  }
}

TEST_CASE("Bessel log form and guards") {
  CHECK(log_bessel_i(1.0, 900.0) == doctest::Approx(900 - 0.5 * std::log(2 * kPi * 900)).epsilon(1e-6));
  CHECK_THROWS_AS(bessel_i(1.0, 800.0), Error);
  CHECK_THROWS_AS(bessel_i(-1.0, 1.0), Error);
}

TEST_CASE("Gamma on the imaginary axis: reflection identity") {
  for (double y : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const GammaValue g = gamma_imag(y);
    CHECK(std::fabs(g.modulus * g.modulus * y * std::sinh(kPi * y) / kPi - 1) < 1e-10);
  }
  CHECK(gamma_imag(1.0).modulus == doctest::Approx(std::sqrt(kPi / std::sinh(kPi))).epsilon(1e-13));
}

TEST_CASE("Gamma argument") {
  CHECK(gamma_imag(1e-8).argument == doctest::Approx(-kPi / 2).epsilon(1e-7));
  for (double y : {0.05, 0.3, 1.0, 2.5, 7.0}) {
    CHECK(std::fabs(wrap(gamma_imag(y).argument - arg_gamma_oracle(y))) < 1e-9);
  }
  double prev = arg_gamma_imag_continuous(0.01);
  for (double y = 0.02; y <= 50.0; y += 0.01) {
    const double cur = arg_gamma_imag_continuous(y);
    CHECK(std::fabs(cur - prev) < 0.1);
    prev = cur;
  }
  CHECK_THROWS_AS(gamma_imag(0.0), Error);
  CHECK_THROWS_AS(gamma_imag(60.0), Error);
}
