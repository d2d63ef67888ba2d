#include "mbamp/soliton_spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "mbamp/errors.hpp"

namespace mbamp {

double soliton_velocity(cplx k) {
  const double q = 4.0 * std::norm(k);
  return q / (1.0 + q);
}

namespace {

constexpr double kBottom = 1e-4;
constexpr double kZeroTol = 1e-10;

struct Search {
  const ScatteringData& sd;
  double root_tol;
  std::vector<cplx> roots;

  cplx b(cplx k) const { return sd.ab(k).b; }

  int count(const Rect& r) const {
    return count_zeros_rect([&](cplx k) { return b(k); }, r, root_tol);
  }

  // Count with the rectangle nudged if b vanishes on its boundary.
  int count_nudged(Rect& r) const {
    for (int attempt = 0; attempt < 8; ++attempt) {
      try {
        return count(r);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BoundaryZero) throw;
        const double d = 1e-3 * (attempt + 1) * std::max(r.width(), r.height());
        r.re_min -= d;
        r.re_max += 0.7 * d;
        r.im_max += 0.9 * d;
      }
    }
    fail(ErrorKind::BoundaryZero, "b vanishes on the search box boundary after repeated perturbation");
  }

  // Damped Newton on b that gives up as soon as an iterate leaves `cell`.
  std::optional<cplx> confined_newton(cplx z, const Rect& cell) const {
    ABJet j = sd.ab_jet(z);
    for (int it = 0; it < 60; ++it) {
      if (std::abs(j.b) <= kZeroTol) return z;
      if (j.b_dot == cplx(0.0, 0.0)) return std::nullopt;
      const cplx step = j.b / j.b_dot;
      double lambda = 1.0;
      bool moved = false;
      for (int half = 0; half < 12; ++half, lambda *= 0.5) {
        const cplx trial = z - lambda * step;
        if (!cell.contains(trial) || !(trial.imag() > 0)) continue;
        const ABJet jt = sd.ab_jet(trial);
        if (std::abs(jt.b) < std::abs(j.b)) {
          z = trial;
          j = jt;
          moved = true;
          break;
        }
      }
      if (!moved) return std::nullopt;
    }
    return std::abs(j.b) <= kZeroTol ? std::optional<cplx>(z) : std::nullopt;
  }

  std::optional<cplx> newton_in(const Rect& r) const {
    const double mx = 0.05 * r.width(), my = 0.05 * r.height();
    const Rect grown{r.re_min - mx, r.re_max + mx, r.im_min, r.im_max + my};
    const std::array<cplx, 5> seeds = {r.center(), cplx(r.re_min + 0.25 * r.width(), r.im_min + 0.25 * r.height()),
                                       cplx(r.re_min + 0.75 * r.width(), r.im_min + 0.75 * r.height()),
                                       cplx(r.re_min + 0.25 * r.width(), r.im_min + 0.75 * r.height()),
                                       cplx(r.re_min + 0.75 * r.width(), r.im_min + 0.25 * r.height())};
    for (cplx seed : seeds) {
      if (auto z = confined_newton(seed, grown)) return z;
    }
    return std::nullopt;
  }

  void split(const Rect& r, int n, int depth) {
    if (n == 0) return;
    if (n == 1) {
      if (auto z = newton_in(r)) {
        roots.push_back(*z);
        return;
      }
    }
    if (depth > 24) {
      std::ostringstream os;
      os << n << " zeros of b could not be separated near " << r.center() << " (multiple zero?)";
      fail(ErrorKind::AssumptionViolated, os.str());
    }
    // Quadrants; the split lines are shifted off-centre (and moved again if b vanishes on them).
    for (int attempt = 0; attempt < 6; ++attempt) {
      const double fx = 0.5 + 0.0137 * (attempt + 1) * (attempt % 2 ? -1 : 1);
      const double fy = 0.5 + 0.0191 * (attempt + 1) * (attempt % 2 ? 1 : -1);
      const double xm = r.re_min + fx * r.width();
      const double ym = r.im_min + fy * r.height();
      const std::array<Rect, 4> q = {Rect{r.re_min, xm, r.im_min, ym}, Rect{xm, r.re_max, r.im_min, ym},
                                     Rect{r.re_min, xm, ym, r.im_max}, Rect{xm, r.re_max, ym, r.im_max}};
      std::array<int, 4> c{};
      try {
        for (int i = 0; i < 4; ++i) c[i] = count(q[i]);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BoundaryZero) throw;
        continue;
      }
      if (c[0] + c[1] + c[2] + c[3] != n) {
        std::ostringstream os;
        os << "argument principle is not additive on " << r.center() << ": " << n << " vs "
           << c[0] + c[1] + c[2] + c[3];
        fail(ErrorKind::NonConvergence, os.str());
      }
      for (int i = 0; i < 4; ++i) split(q[i], c[i], depth + 1);
      return;
    }
    fail(ErrorKind::BoundaryZero, "could not place quadtree split lines clear of zeros of b");
  }
};

}  // namespace

Rect default_search_box(const ScatteringData& sd) {
  const Pulse& p = sd.pulse();
  const double T = p.support_end();
  double sup = 0.0;
  for (int i = 0; i <= 2000; ++i) sup = std::max(sup, std::abs(p(T * i / 2000.0)));
  // Zeros of b for a box pulse satisfy Im k < sup|E|/2; start 50% beyond that.
  const double K0 = std::max(1.0, 0.75 * sup);
  double K = K0;
  double bmax = 0.0;
  for (int i = -200; i <= 200; ++i) bmax = std::max(bmax, std::abs(sd.ab(cplx(K * i / 200.0, 0.0)).b));
  // |b| decays only like |k|^(-m) along the top edge, so growth is capped at 2 K0.
  const double kcap = std::min(2.0 * K0, 0.5 * kMaxGrowthExponent / T);
  while (K < kcap) {
    double top = 0.0;
    for (int i = -40; i <= 40; ++i) top = std::max(top, std::abs(sd.ab(cplx(K * i / 40.0, K)).b));
    if (top < 1e-3 * bmax) break;
    K = std::min(1.25 * K, kcap);
  }
  return {-K, K, kBottom, K};
}

SolitonSpectrum find_zeros(const ScatteringData& sd) { return find_zeros(sd, default_search_box(sd)); }

SolitonSpectrum find_zeros(const ScatteringData& sd, const Rect& box_in) {
  if (!(box_in.im_min > 0) || !(box_in.width() > 0) || !(box_in.height() > 0)) {
    fail(ErrorKind::DomainError, "search box must be a nondegenerate rectangle in Im k > 0");
  }
  SolitonSpectrum spec;
  spec.box = box_in;
  if (sd.pulse().is_trivial()) return spec;

  Search s{sd, sd.tolerances().root_tol, {}};
  const int n = s.count_nudged(spec.box);
  s.split(spec.box, n, 0);

  // Drop duplicates from neighbouring cells.
  std::vector<cplx> roots;
  for (cplx z : s.roots) {
    if (std::none_of(roots.begin(), roots.end(), [&](cplx w) { return std::abs(w - z) < 1e-7 * (1 + std::abs(z)); }))
      roots.push_back(z);
  }
  if (static_cast<int>(roots.size()) != n) {
    std::ostringstream os;
    os << "argument principle counts " << n << " zeros but " << roots.size() << " were refined";
    fail(ErrorKind::AssumptionViolated, os.str());
  }
  std::sort(roots.begin(), roots.end(), [](cplx u, cplx v) { return std::abs(u) < std::abs(v); });

  for (cplx z : roots) {
    if (!(z.imag() > 1e-8)) fail(ErrorKind::AssumptionViolated, "zero of b on the real line");
    const ABJet j = sd.ab_jet(z);
    if (!(std::abs(j.b_dot) > 1e-10)) {
      std::ostringstream os;
      os << "zero of b at " << z << " is not simple (|b'| = " << std::abs(j.b_dot) << ")";
      fail(ErrorKind::AssumptionViolated, os.str());
    }
    SolitonZero sz;
    sz.k = z;
    sz.a = j.a;
    sz.b_dot = j.b_dot;
    sz.gamma = 1.0 / (j.a * j.b_dot);
    sz.velocity = soliton_velocity(z);
    spec.zeros.push_back(sz);
  }
  for (std::size_t i = 1; i < spec.zeros.size(); ++i) {
    const double m0 = std::abs(spec.zeros[i - 1].k), m1 = std::abs(spec.zeros[i].k);
    if (m1 - m0 <= 1e-6 * m1) {
      std::ostringstream os;
      os << "zeros " << spec.zeros[i - 1].k << " and " << spec.zeros[i].k << " have equal moduli";
      fail(ErrorKind::AssumptionViolated, os.str());
    }
  }
  return spec;
}

double default_velocity_eps(const SolitonSpectrum& spec) {
  if (spec.size() < 2) return 0.02;
  double gap = 1.0;
  for (std::size_t i = 1; i < spec.size(); ++i)
    gap = std::min(gap, std::fabs(spec.zeros[i].velocity - spec.zeros[i - 1].velocity));
  return 0.5 * gap;
}

std::optional<std::size_t> velocity_match(const SolitonSpectrum& spec, double t, double x, double eps) {
  if (!(t > 0) || !(eps > 0)) fail(ErrorKind::DomainError, "velocity_match needs t > 0 and eps > 0");
  const double v = x / t;
  std::optional<std::size_t> hit;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (std::fabs(v - spec.zeros[j].velocity) < eps) {
      if (hit) fail(ErrorKind::AmbiguousMatch, "two soliton velocities within eps of x/t; decrease eps");
      hit = j;
    }
  }
  return hit;
}

}  // namespace mbamp
