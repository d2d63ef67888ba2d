#include "doctest.h"
#include "mbamp/errors.hpp"
#include "mbamp/lightcone_asym.hpp"

#include <cmath>
#include <random>

using namespace mbamp;

TEST_CASE("classification examples") {
  CHECK(classify(3, 4, 2).region == Region::Causal);
  CHECK(classify(4, 4, 2).region == Region::Causal);
  CHECK(classify(100.005, 100, 2).region == Region::PartI);
  const double x = std::exp(10.0), m = 2, L = 10, LL = std::log(10.0);
  const double tau = std::pow(m * L + (1 - m) * LL, 2) / (4 * x) * (1 + 1e-6);
  const RegionTag tag = classify_retarded(x, tau, m);
  CHECK(tag.region == Region::PartIV);
  CHECK(tag.n == 1);
  CHECK(classify(20, 10, 2).region == Region::Tail);
  CHECK(classify(1e6, 10, 2).region == Region::Unsupported);
}

TEST_CASE("classification is a partition with consistent diagnostics") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> lx(-2, 25), lt(-12, 3);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::exp(lx(rng));
    const double tau = x * std::exp(lt(rng)) * (i % 3 == 0 ? 1e-6 : 1);
    const RegionTag t = classify_retarded(x, tau, 2.0);
    CHECK(t.region != Region::Causal);
    CHECK(t.k0 == doctest::Approx(0.5 * std::sqrt(x / tau)));
    CHECK(t.xi == doctest::Approx(2 * std::sqrt(x * tau)));
    if (t.region == Region::PartIV) CHECK(t.n >= 0);
    if (t.region != Region::Tail && t.region != Region::Unsupported) {
      CHECK(tau >= t.band_lo * (1 - 1e-12));
      CHECK(tau <= t.band_hi * (1 + 1e-12));
    }
  }
}

TEST_CASE("band parameters are validated") {
  BandParams bp;
  CHECK_NOTHROW(bp.validate(2));
  bp.eps2 = 0.6;
  CHECK_THROWS_AS(bp.validate(2), Error);
  bp = {};
  bp.K = 1.0;
  CHECK_THROWS_AS(bp.validate(2), Error);
}

TEST_CASE("formulas vanish with the reflection coefficient") {
  ScatteringData sd(Pulse::smooth_bump(1e-9, 2.0, 1.0));
  const LightconeValue v = bessel_formula(20, 0.01, sd, false);
  CHECK(std::abs(v.field.E) < 1e-7);
  CHECK(std::fabs(v.field.N - 1) < 1e-14);
  CHECK(std::abs(v.field.rho) < 1e-7);
}

TEST_CASE("Part I is continuous with the causal region") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  double prev = 1e300;
  for (double tau : {1e-3, 1e-5, 1e-7, 1e-9}) {
    const double e = std::abs(bessel_formula(20, tau, sd, false).field.E);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("soliton-train peaks") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  const double x = std::exp(20.0);
  double prev = 0;
  for (int n = 0; n < 3; ++n) {
    const PeakPrediction pk = predict_peaks(x, n, sd);
    CHECK(std::fabs(pk.theta) < 1e-10);
    CHECK(std::fabs(theta_n(x, pk.tau, n, sd)) < 1e-10);
    CHECK(pk.tau > prev);
    prev = pk.tau;
    // the inversion seed is already close
    CHECK(std::fabs(pk.seed_tau / pk.tau - 1) < 1e-3);
    const LightconeValue v = soliton_train_formula(x, pk.tau, n, sd);
    CHECK(v.field.N == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(std::abs(v.field.E) == doctest::Approx(2 * std::sqrt(x / pk.tau)).epsilon(1e-9));
    CHECK(std::abs(v.field.rho) < 1e-9);
  }
}

TEST_CASE("Part IV output stays on the Bloch sphere") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  const double x = std::exp(15.0);
  const PeakPrediction pk = predict_peaks(x, 1, sd);
  for (double f : {0.9, 0.97, 1.0, 1.02, 1.1}) {
    const FieldTriple v = soliton_train_formula(x, pk.tau * f, 1, sd).field;
    CHECK(std::fabs(v.N * v.N + std::norm(v.rho) - 1) < 1e-12);
  }
}

TEST_CASE("Part III and Part IV(0) agree in their overlap") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  const double x = std::exp(20.0), L = 20;
  const double tau = band_edge_tau(x, 2.0, -2.5);
  const LightconeValue a = exponential_formula(x, tau, sd);
  const LightconeValue b = soliton_train_formula(x, tau, 0, sd);
  const double scale = 2 * std::sqrt(x / tau);
  CHECK(std::abs(a.field.E - b.field.E) / scale < 5 / std::sqrt(L));
}

TEST_CASE("wrong region and assumption checks") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  RegionTag tag = classify(20, 10, 2);
  try {
    eval_lightcone(tag, 10, 10, sd);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WrongRegion);
  }
  ScatteringData box(Pulse::box(1.0, 1.0));
  tag = classify(100.005, 100, 2);
  try {
    eval_lightcone(tag, 100, 0.005, box);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AssumptionViolated);
  }
  try {
    predict_peaks(2.0, 3, sd);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoRoot);
  }
}

TEST_CASE("inversion seed") {
  // y - g ln y = z
  for (double z : {10.0, 50.0, 200.0}) {
    for (double g : {-0.75, 0.25, 1.0}) {
      const double y = inversion_seed(z, g);
      const double lz = std::log(z);
      CHECK(std::fabs(y - g * std::log(y) - z) < 5 * std::pow(lz, 3) / (z * z));
    }
  }
}

TEST_CASE("Parts II and III agree near their common edge") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  for (double L : {8.0, 12.0, 16.0, 20.0}) {
    for (double beta : {-3.0, -2.5, -2.25}) {
      const double x = std::exp(L), tau = band_edge_tau(x, 2.0, beta);
      const LightconeValue two = bessel_formula(x, tau, sd, true), three = exponential_formula(x, tau, sd);
      const double dev = std::abs(two.field.E - three.field.E) / std::abs(three.field.E);
      CHECK(dev <= std::max(two.error_scale, three.error_scale));
      // leading correction of the Bessel asymptotic, (4 nu^2 - 1) / (8 xi) with nu = m - 1
      const double xi = 2 * std::sqrt(x * tau);
      CHECK(dev == doctest::Approx(3 / (8 * xi)).epsilon(0.2));
    }
  }
}
