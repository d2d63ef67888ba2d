#include "doctest.h"
#include "mbamp/errors.hpp"
#include "mbamp/mb_oracle.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>

using namespace mbamp;

namespace {

SimSpec spec(double h, double t, double x) {
  SimSpec s;
  s.h = h;
  s.t_max = t;
  s.x_max = x;
  return s;
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

TEST_CASE("zero input leaves the medium untouched") {
  const SimGrid g = simulate(Pulse::zero(), spec(0.02, 4, 4));
  for (std::size_t i = 0; i < g.nt(); ++i) {
    for (std::size_t j = 0; j < g.nx(); ++j) {
      const FieldTriple& f = g.at(i, j);
      CHECK(f.E == cplx(0, 0));
      CHECK(f.N == 1.0);
      CHECK(f.rho == cplx(0, 0));
    }
  }
  const InvariantReport r = check_invariants(g);
  CHECK(r.conservation == 0.0);
  CHECK(r.causality == 0.0);
  CHECK(r.boundary == 0.0);
}

TEST_CASE("nothing moves ahead of the light cone") {
  const SimGrid g = simulate(Pulse::box(1.0, 1.0), spec(0.01, 6, 6));
  double worst = 0;
  for (std::size_t i = 0; i < g.nt(); ++i) {
    for (std::size_t j = i; j < g.nx(); ++j) {
      const FieldTriple& f = g.at(i, j);
      worst = std::max({worst, std::abs(f.E), std::abs(f.rho), std::fabs(f.N - 1)});
    }
  }
  CHECK(worst <= 1e-9);
  CHECK(check_invariants(g).causality <= 1e-9);
}

TEST_CASE("Bloch sphere and second-order convergence") {
  const Pulse p = Pulse::box(1.0, 1.0);
  std::vector<std::pair<double, double>> pts;
  for (double t = 2; t <= 10; t += 2) {
    for (double x = 0.5; x < t; x += 1.5) pts.emplace_back(t, x);
  }
  std::vector<std::vector<FieldTriple>> runs;
  for (double h : {0.02, 0.01, 0.005}) {
    SimSpec s = spec(h, 10, 10);
    s.store = false;
    const ProbeRun r = simulate_probes(p, s, pts);
    CHECK(r.report.conservation <= 1e-10);
    runs.push_back(r.values);
  }
  auto diff = [&](int a, int b) {
    double m = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      m = std::max({m, std::abs(runs[a][k].E - runs[b][k].E), std::abs(runs[a][k].rho - runs[b][k].rho)});
    }
    return m;
  };
  const double ratio = diff(0, 1) / diff(1, 2);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("Heun stepper converges to the same solution") {
  const Pulse p = Pulse::smooth_bump(0.5, 2.0, 1.0);
  SimSpec a = spec(0.005, 5, 5), b = spec(0.005, 5, 5);
  a.store = b.store = false;
  b.stepper = BlochStepper::Heun;
  const std::vector<std::pair<double, double>> pts{{4, 2}, {5, 1}, {4.5, 4}};
  const ProbeRun ra = simulate_probes(p, a, pts), rb = simulate_probes(p, b, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(ra.values[k].E - rb.values[k].E) < 1e-4);
}

TEST_CASE("probing") {
  const Pulse p = Pulse::smooth_bump(1.0, 2.0, 1.0);
  const SimGrid g = simulate(p, spec(0.01, 3, 3));
  CHECK(probe(g, 2.5, 1.2).E == g.at(250, 120).E);
  CHECK(probe(g, 2.5, 1.2).N == g.at(250, 120).N);
  CHECK(std::abs(probe(g, 0.537, 0.0).E - p(0.537)) < 1e-8);
  const FieldTriple ahead = probe(g, 1.0, 1.5);
  CHECK(ahead.E == cplx(0, 0));
  CHECK(ahead.N == 1.0);
  // off-node probes agree with a finer run
  SimSpec fine = spec(0.0025, 3, 3);
  fine.store = false;
  const ProbeRun r = simulate_probes(p, fine, {{2.4567, 1.1234}});
  const FieldTriple c = probe(g, 2.4567, 1.1234);
  CHECK(std::abs(c.E - r.values[0].E) < 1e-4);
  CHECK(kind_of([&] { probe(g, 3.5, 1.0); }) == ErrorKind::OutOfDomain);
}

TEST_CASE("probe runs and stored grids agree at nodes") {
  const Pulse p = Pulse::box(2.0, 1.0);
  SimSpec s = spec(0.01, 4, 4);
  const SimGrid g = simulate(p, s);
  s.store = false;
  const std::vector<std::pair<double, double>> pts{{3.0, 1.0}, {2.0, 0.5}, {3.99, 0.01}};
  const ProbeRun r = simulate_probes(p, s, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const FieldTriple f = probe(g, pts[k].first, pts[k].second);
    CHECK(std::abs(f.E - r.values[k].E) < 1e-12);
    CHECK(std::fabs(f.N - r.values[k].N) < 1e-12);
  }
  CHECK(r.report.nodes == g.report().nodes);
}

TEST_CASE("strip runs match the full grid") {
  const Pulse p = Pulse::box(2.0, 1.0);
  SimSpec full = spec(0.01, 6, 4), strip = spec(0.01, 6, 4);
  full.store = strip.store = false;
  strip.tau_max = 2.5;
  const std::vector<std::pair<double, double>> pts{{5.0, 3.0}, {2.0, 0.5}, {4.2, 3.9}};
  const ProbeRun a = simulate_probes(p, full, pts), b = simulate_probes(p, strip, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(a.values[k].E - b.values[k].E) < 1e-13);
  CHECK(b.report.nodes < a.report.nodes);
}

TEST_CASE("stride and file round trip") {
  const Pulse p = Pulse::box(1.0, 1.0);
  SimSpec s = spec(0.01, 2, 2);
  s.stride = 4;
  const SimGrid g = simulate(p, s);
  CHECK(g.h() == doctest::Approx(0.04));
  CHECK(g.nt() == 51);
  const auto path = (std::filesystem::temp_directory_path() / "mbamp_grid_test.bin").string();
  write_grid(g, path);
  const SimGrid h = read_grid(path);
  std::remove(path.c_str());
  REQUIRE(h.node_count() == g.node_count());
  for (std::size_t i = 0; i < g.nt(); ++i) {
    for (std::size_t j = 0; j < g.nx(); ++j) {
      CHECK(h.at(i, j).E == g.at(i, j).E);
      CHECK(h.at(i, j).N == g.at(i, j).N);
    }
  }
  CHECK(probe(h, 1.5, 0.3).E == probe(g, 1.5, 0.3).E);
}

TEST_CASE("precondition errors") {
  const Pulse p = Pulse::box(1.0, 1.0);
  CHECK(kind_of([&] { simulate(p, spec(0.05, 1, 1)); }) == ErrorKind::CFLViolation);
  CHECK(kind_of([&] { simulate(p, spec(0.001, 20, 1)); }) == ErrorKind::CFLViolation);
  CHECK(kind_of([&] { simulate(Pulse::box(1.0, 0.5), spec(0.003, 1, 1)); }) == ErrorKind::CFLViolation);
  SimSpec heun = spec(0.02, 40, 40);
  heun.stepper = BlochStepper::Heun;
  heun.store = false;
  CHECK(kind_of([&] { simulate(p, heun); }) == ErrorKind::NonPhysical);
}
