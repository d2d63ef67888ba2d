#include "doctest.h"
#include "mbamp/errors.hpp"
#include "mbamp/scattering.hpp"

#include <cmath>

using namespace mbamp;

namespace {

struct BoxAB {
  cplx a, b, b_dot;
};

// transfer coefficients of a box of height A on [0, T] from the matrix exponential
BoxAB box_closed(double A, double T, cplx k) {
  const cplx w = std::sqrt(k * k + A * A / 4);
  const cplx e = std::exp(kI * k * T);
  const cplx s = std::sin(w * T), c = std::cos(w * T);
  const cplx wd = k / w;
  BoxAB r;
  r.a = e * (c - kI * (k / w) * s);
  r.b = A / (2.0 * w) * s * e;
  r.b_dot = 0.5 * A * e * (-wd / (w * w) * s + T * wd / w * c + kI * T * s / w);
  return r;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::NonConvergence;
}

}  // namespace

TEST_CASE("free equation") {
  const Pulse z = Pulse::zero(1.0);
  for (cplx k : {cplx(0, 0), cplx(2.5, 0), cplx(-1, 0.5)}) {
    const Mat2 m = jost_matrix(z, k);
    CHECK(std::abs(m[0] - 1.0) < 1e-12);
    CHECK(std::abs(m[1]) < 1e-12);
    CHECK(std::abs(m[2]) < 1e-12);
    CHECK(std::abs(m[3] - 1.0) < 1e-12);
    ScatteringData sd(z);
    CHECK(std::abs(sd.reflection(k)) < 1e-12);
    if (k.imag() > 0) CHECK(std::abs(sd.b_deriv(k)) < 1e-12);
  }
}

TEST_CASE("box at k = 0") {
  const ABValue v = ab_direct(Pulse::box(5.0, 2.0), 0.0);
  CHECK(v.a.real() == doctest::Approx(std::cos(5.0)).epsilon(1e-10));
  CHECK(v.b.real() == doctest::Approx(std::sin(5.0)).epsilon(1e-10));
  CHECK(v.a.real() == doctest::Approx(0.28366).epsilon(1e-5));
  CHECK(v.b.real() == doctest::Approx(-0.95892).epsilon(1e-5));
}

TEST_CASE("box against the closed form") {
  const Pulse p = Pulse::box(5.0, 2.0);
  ScatteringData sd(p);
  for (cplx k : {cplx(-3.1, 0), cplx(0.4, 0), cplx(7.7, 0), cplx(0, 0.8), cplx(0, 3), cplx(0, 20), cplx(1.3, 2.2)}) {
    const ABValue v = sd.ab(k);
    const BoxAB c = box_closed(5, 2, k);
    CHECK(std::abs(v.a - c.a) < 1e-8 * std::max(1.0, std::abs(c.a)));
    CHECK(std::abs(v.b - c.b) < 1e-8 * std::max(1.0, std::abs(c.b)));
  }
}

TEST_CASE("unitarity, symmetry and structure on the real line") {
  for (const Pulse& p : {Pulse::box(5.0, 2.0), Pulse::smooth_bump(1.0, 2.0, 1.0)}) {
    ScatteringData sd(p);
    double worst = 0, sym = 0;
    for (int i = 0; i < 400; ++i) {
      const double k = -20 + 40.0 * (i + 0.5) / 400;
      const ABValue v = sd.ab(k);
      worst = std::max(worst, std::fabs(std::norm(v.a) + std::norm(v.b) - 1));
      const ABValue m = sd.ab(-k);
      sym = std::max({sym, std::abs(m.a - std::conj(v.a)), std::abs(m.b - std::conj(v.b))});
    }
    CHECK(worst < 1e-8);
    CHECK(sym < 1e-8);
    const Mat2 J = jost_matrix(p, 1.7);
    CHECK(std::abs(J[0] - std::conj(J[3])) < 1e-9);
    CHECK(std::abs(J[2] + std::conj(J[1])) < 1e-9);
  }
}

TEST_CASE("unimodular Jost matrix") {
  const Pulse p = Pulse::box(5.0, 2.0);
  for (cplx k : {cplx(0, 0), cplx(-4, 0), cplx(9, 0), cplx(0.5, 0.5), cplx(-1, 1)}) {
    CHECK(std::abs(det(jost_matrix(p, k)) - 1.0) < 1e-9);
  }
}

TEST_CASE("reflection symmetry and the box zero") {
  ScatteringData sd(Pulse::box(5.0, 2.0));
  for (double k : {0.3, 1.1, 4.0}) CHECK(std::abs(sd.reflection(-k) - std::conj(sd.reflection(k))) < 1e-8);
  CHECK(std::abs(sd.ab(cplx(0, 1.944888)).b) < 1e-6);
}

TEST_CASE("derivative of b") {
  ScatteringData sd(Pulse::box(5.0, 2.0));
  const cplx kz(0, std::sqrt(6.25 - kPi * kPi / 4));
  CHECK(std::abs(sd.b_deriv(kz) - box_closed(5, 2, kz).b_dot) < 1e-8);
  const cplx k(0.3, 0.5);
  const double h = 1e-5;
  const cplx fd = (sd.ab(k + h).b - sd.ab(k - h).b) / (2 * h);
  CHECK(std::abs(sd.b_deriv(k) - fd) < 1e-6 * std::abs(fd));
  const ScatteringData s2(Pulse::smooth_bump(cplx(1, 0.5), 2.0, 1.0));
  const cplx fd2 = (s2.ab(k + h).b - s2.ab(k - h).b) / (2 * h);
  CHECK(std::abs(s2.b_deriv(k) - fd2) < 1e-6 * std::abs(fd2));
}

TEST_CASE("real-line cache") {
  ScatteringData sd(Pulse::box(5.0, 2.0));
  for (double s : {-5.93, -0.017, 0.5, 2.71, 5.5}) {
    CHECK(std::abs(sd.reflection_real(s) - sd.reflection(s)) < 1e-7 * std::max(1.0, std::abs(sd.reflection(s))));
  }
  CHECK(sd.cache_nodes() > 10);
  // real zeros of b: sin(wT) = 0 with w = n pi / T > A / 2
  const auto dips = sd.real_dips(0.0, 6.0);
  REQUIRE(dips.size() == 3);
  for (std::size_t n = 0; n < dips.size(); ++n) {
    const double w = (n + 2) * kPi / 2;
    CHECK(dips[n] == doctest::Approx(std::sqrt(w * w - 6.25)).epsilon(1e-10));
  }
}

TEST_CASE("tail fit") {
  ScatteringData sd(Pulse::power_start(1.0, 2.0, 1.0));
  const TailFit f = sd.fit();
  CHECK(f.m >= 1.9);
  CHECK(f.m <= 2.1);
  ScatteringData sb(Pulse::smooth_bump(1.0, 2.0, 1.0));
  const TailFit g = sb.fit();
  CHECK(std::fabs(g.m - 2.0) < 0.1);
  ScatteringOptions fine;
  fine.tol = fine.tol.scaled(0.1);
  CHECK(std::fabs(ScatteringData(Pulse::smooth_bump(1.0, 2.0, 1.0), fine).fit().m - g.m) < 1e-6);
}

TEST_CASE("tail constant is linear in a small amplitude") {
  const TailFit a = ScatteringData(Pulse::smooth_bump(0.05, 2.0, 1.0)).fit();
  const TailFit b = ScatteringData(Pulse::smooth_bump(0.1, 2.0, 1.0)).fit();
  CHECK(std::abs(b.C) / std::abs(a.C) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("r(i kappa) kappa^m stays of one order") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  double lo = 1e300, hi = 0;
  for (double kap = 10; kap <= 100; kap += 5) {
    const double v = std::abs(sd.reflection_imag(kap)) * kap * kap;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo > 0.02);
  CHECK(hi / lo < 3);
}

TEST_CASE("tail model past the fit window") {
  ScatteringData sd(Pulse::smooth_bump(1.0, 2.0, 1.0));
  const TailModel tm = sd.tail_model();
  CHECK(tm.m == 2.0);
  const double k = 1000;
  CHECK(std::abs(sd.reflection_imag(k) - tm.C * std::pow(cplx(0, k), -2.0)) < 1e-15);
}

TEST_CASE("scattering errors") {
  const Pulse p = Pulse::box(5.0, 2.0);
  CHECK(kind_of([&] { jost_matrix(p, cplx(0, 301)); }) == ErrorKind::Overflow);
  CHECK(kind_of([&] { jost_matrix(p, cplx(0, -1)); }) == ErrorKind::DomainError);
  CHECK(kind_of([&] { ScatteringData(p).fit(); }) == ErrorKind::FitRejected);
}
