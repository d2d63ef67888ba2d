#include "doctest.h"
#include "mbamp/errors.hpp"
#include "mbamp/soliton_spectrum.hpp"

#include <cmath>
#include <random>

using namespace mbamp;

namespace {

// zeros of (A / 2w) sin(wT) e^{ikT} in the upper half-plane: w T = n pi with w < A / 2
std::vector<double> box_zeros(double A, double T) {
  std::vector<double> out;
  for (int n = 1; n * kPi / T < A / 2; ++n) out.push_back(std::sqrt(A * A / 4 - n * n * kPi * kPi / (T * T)));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("small box has no solitons") {
  ScatteringData sd(Pulse::box(1.0, 1.0));
  CHECK(find_zeros(sd, Rect{-3, 3, 1e-4, 3}).empty());
  CHECK(find_zeros(sd).empty());
}

TEST_CASE("Box(5, 2) has one zero") {
  ScatteringData sd(Pulse::box(5.0, 2.0));
  const SolitonSpectrum s = find_zeros(sd, Rect{-3, 3, 1e-4, 3});
  REQUIRE(s.size() == 1);
  const double exact = box_zeros(5, 2)[0];
  CHECK(std::abs(s.zeros[0].k - cplx(0, exact)) < 1e-8);
  CHECK(std::abs(s.zeros[0].k - cplx(0, 1.944888)) < 1e-5);
  CHECK(std::abs(sd.ab(s.zeros[0].k).b) <= 1e-10);
  const SolitonZero& z = s.zeros[0];
  CHECK(std::abs(z.gamma - 1.0 / (z.a * z.b_dot)) < 1e-12 * std::abs(z.gamma));
  CHECK(z.velocity == doctest::Approx(0.93800524).epsilon(1e-7));
  // default box finds the same zero
  const SolitonSpectrum d = find_zeros(sd);
  REQUIRE(d.size() == 1);
  CHECK(std::abs(d.zeros[0].k - s.zeros[0].k) < 1e-9);
}

TEST_CASE("Box(7, 2) has two zeros, sorted by modulus") {
  ScatteringData sd(Pulse::box(7.0, 2.0));
  const SolitonSpectrum s = find_zeros(sd, Rect{-4, 4, 1e-4, 4});
  const auto ex = box_zeros(7, 2);
  REQUIRE(s.size() == 2);
  REQUIRE(ex.size() == 2);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(s.zeros[j].k - cplx(0, ex[j])) < 1e-8);
  CHECK(std::abs(s.zeros[0].k) < std::abs(s.zeros[1].k));
  for (const auto& z : s.zeros) {
    CHECK(z.velocity > 0);
    CHECK(z.velocity < 1);
  }
}

TEST_CASE("argument-principle count equals the refined count on sub-rectangles") {
  ScatteringData sd(Pulse::box(7.0, 2.0));
  const SolitonSpectrum all = find_zeros(sd, Rect{-4, 4, 1e-4, 4});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(-3, 3), im(0.05, 3.8);
  auto b = [&](cplx k) { return sd.ab(k).b; };
  for (int trial = 0; trial < 8; ++trial) {
    double r0 = re(rng), r1 = re(rng), i0 = im(rng), i1 = im(rng);
    if (r0 > r1) std::swap(r0, r1);
    if (i0 > i1) std::swap(i0, i1);
    const Rect r{r0 - 0.3, r1 + 0.3, i0, i1 + 0.2};
    std::size_t inside = 0;
    for (const auto& z : all.zeros) inside += r.contains(z.k);
    CHECK(count_zeros_rect(b, r, 1e-10) == static_cast<int>(inside));
  }
}

TEST_CASE("spectrum is stable under a finer ODE tolerance") {
  ScatteringOptions fine;
  fine.tol = fine.tol.scaled(0.5);
  const auto a = find_zeros(ScatteringData(Pulse::box(7.0, 2.0)), Rect{-4, 4, 1e-4, 4});
  const auto b = find_zeros(ScatteringData(Pulse::box(7.0, 2.0), fine), Rect{-4, 4, 1e-4, 4});
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a.zeros[j].k - b.zeros[j].k) < 1e-8);
}

TEST_CASE("velocity matching") {
  SolitonSpectrum empty;
  CHECK_FALSE(velocity_match(empty, 10, 5, 0.01).has_value());
  SolitonSpectrum one;
  SolitonZero z;
  z.k = cplx(0, 1.944888);
  z.velocity = soliton_velocity(z.k);
  one.zeros.push_back(z);
  CHECK(z.velocity == doctest::Approx(0.93799).epsilon(1e-5));
  const auto j = velocity_match(one, 1000, 938, 0.01);
  REQUIRE(j.has_value());
  CHECK(*j == 0);
  CHECK_FALSE(velocity_match(one, 1000, 500, 0.01).has_value());
  CHECK(default_velocity_eps(one) == 0.02);
  SolitonSpectrum two = one;
  z.k = cplx(0, 2.0);
  z.velocity = soliton_velocity(z.k);
  two.zeros.push_back(z);
  try {
    velocity_match(two, 1000, 939, 0.1);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AmbiguousMatch);
  }
  const double eps = default_velocity_eps(two);
  CHECK(eps == doctest::Approx(0.5 * (two.zeros[1].velocity - two.zeros[0].velocity)));
}
