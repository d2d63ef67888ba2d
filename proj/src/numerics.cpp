#include "mbamp/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "mbamp/errors.hpp"

namespace mbamp {

void Tolerances::validate() const {
  const double eps = std::numeric_limits<double>::epsilon();
  if (!(ode_rel > 0 && ode_abs > 0 && quad_tol > 0 && root_tol > 0)) {
    fail(ErrorKind::DomainError, "tolerances must be strictly positive");
  }
  if (quad_tol < 10 * eps) fail(ErrorKind::DomainError, "quad_tol below 10 machine epsilon");
}

Tolerances Tolerances::scaled(double factor) const {
  Tolerances t{ode_rel * factor, ode_abs * factor, quad_tol * factor, root_tol * factor};
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082,
                                       0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975,
                                       0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const RealFn& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = hw * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double value = resk * hw;
  const double err = std::fabs((resk - resg) * hw);
  if (!std::isfinite(value)) fail(ErrorKind::NonConvergence, "non-finite integrand value");
  return {a, b, value, err};
}

}  // namespace

double adaptive_quad(const RealFn& f, double a, double b, double tol, const QuadOptions& opt) {
  if (a == b) return 0.0;
  if (!(tol > 0)) fail(ErrorKind::DomainError, "quadrature tolerance must be positive");
  std::priority_queue<Panel> heap;
  Panel first = gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double total_err = first.error;
  const double min_width = opt.min_width_rel * std::fabs(b - a);
  int count = 1;
  while (total_err > tol * (1.0 + std::fabs(total))) {
    if (count >= opt.max_intervals) {
      std::ostringstream os;
      os << "adaptive_quad exceeded " << opt.max_intervals << " panels on [" << a << ", " << b
         << "], error estimate " << total_err;
      fail(ErrorKind::NonConvergence, os.str());
    }
    Panel worst = heap.top();
    heap.pop();
    if (std::fabs(worst.b - worst.a) < min_width) {
      fail(ErrorKind::NonConvergence, "adaptive_quad subdivision depth exceeded");
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the rounding accumulated by the incremental updates.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Argument principle

namespace {

cplx boundary_point(const Rect& r, double s) {
  // s in [0, 4): bottom, right, top, left, counter-clockwise.
  const int edge = std::min(3, static_cast<int>(std::floor(s)));
  const double u = s - edge;
  switch (edge) {
    case 0: return {r.re_min + u * r.width(), r.im_min};
    case 1: return {r.re_max, r.im_min + u * r.height()};
    case 2: return {r.re_max - u * r.width(), r.im_max};
    default: return {r.re_min, r.im_max - u * r.height()};
  }
}

}  // namespace

int count_zeros_rect(const ComplexFn& f, const Rect& rect, double root_tol) {
  if (!(rect.width() > 0 && rect.height() > 0)) fail(ErrorKind::DomainError, "degenerate rectangle");
  constexpr int kInitialPerEdge = 24;
  constexpr int kMaxEvaluations = 200000;
  constexpr double kMaxStep = kPi / 2;

  struct Sample {
    double s;
    cplx v;
  };
  int evaluations = 0;
  auto eval = [&](double s) {
    const cplx v = f(boundary_point(rect, s));
    ++evaluations;
    if (!(std::abs(v) >= root_tol)) {
      std::ostringstream os;
      os << "|f| = " << std::abs(v) << " on the boundary at k = " << boundary_point(rect, s);
      fail(ErrorKind::BoundaryZero, os.str());
    }
    return Sample{s, v};
  };

  double total_phase = 0.0;
  const int n0 = 4 * kInitialPerEdge;
  Sample prev = eval(0.0);
  const Sample start = prev;
  for (int i = 1; i <= n0; ++i) {
    const Sample next = (i == n0) ? Sample{4.0, start.v} : eval(4.0 * i / n0);
    // Depth-first refinement of [prev, next] until each phase step is below pi/2.
    std::vector<Sample> stack{next};
    Sample left = prev;
    while (!stack.empty()) {
      const Sample right = stack.back();
      const double step = std::arg(right.v / left.v);
      if (std::fabs(step) < kMaxStep) {
        total_phase += step;
        left = right;
        stack.pop_back();
        continue;
      }
      if (evaluations > kMaxEvaluations || right.s - left.s < 1e-12) {
        fail(ErrorKind::NonConvergence, "argument principle: phase refinement did not resolve");
      }
      stack.push_back(eval(0.5 * (left.s + right.s)));
    }
    prev = next;
  }
  return static_cast<int>(std::lround(total_phase / (2 * kPi)));
}

// ---------------------------------------------------------------------------
// Newton

NewtonResult complex_newton_trace(const ComplexFn& f, const ComplexFn& df, cplx seed, double tol,
                                  int max_iter) {
  NewtonResult res{seed, 0, {}};
  cplx z = seed;
  cplx fz = f(z);
  res.residuals.push_back(std::abs(fz));
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fz) <= tol) {
      res.root = z;
      res.iterations = it;
      return res;
    }
    const cplx d = df(z);
    if (d == cplx(0.0, 0.0) || !std::isfinite(std::abs(d))) break;
    const cplx step = fz / d;
    // Backtrack when a full step increases |f| (keeps iterates in the basin).
    double lambda = 1.0;
    cplx z_new = z - step;
    cplx f_new = f(z_new);
    for (int bt = 0; bt < 8 && std::abs(f_new) > std::abs(fz); ++bt) {
      lambda *= 0.5;
      z_new = z - lambda * step;
      f_new = f(z_new);
    }
    if (z_new == z) break;  // no further progress is representable
    z = z_new;
    fz = f_new;
    res.residuals.push_back(std::abs(fz));
  }
  if (std::abs(fz) <= tol) {
    res.root = z;
    res.iterations = static_cast<int>(res.residuals.size()) - 1;
    return res;
  }
  std::ostringstream os;
  os << "Newton did not reach |f| <= " << tol << " from seed " << seed << " (last |f| = " << std::abs(fz)
     << ")";
  fail(ErrorKind::Diverged, os.str());
}

cplx complex_newton(const ComplexFn& f, const ComplexFn& df, cplx seed, double tol, int max_iter) {
  return complex_newton_trace(f, df, seed, tol, max_iter).root;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeState ode_advance(const OdeRhs& rhs, double t0, double t1, OdeState y, double rel_tol, double abs_tol,
                     OdeStats* stats) {
  if (t0 == t1) return y;
  if (!(rel_tol > 0 && abs_tol > 0)) fail(ErrorKind::DomainError, "ODE tolerances must be positive");
  const std::size_t n = y.size();
  const double span = std::fabs(t1 - t0);
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double h_min = 1e-14 * span;

  OdeState k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
  double t = t0;
  rhs(t, y, k1);

  // Initial step guess (Hairer-Norsett-Wanner II.4).
  double d0 = 0, d1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = abs_tol + rel_tol * std::abs(y[i]);
    d0 += std::norm(y[i]) / (sc * sc);
    d1 += std::norm(k1[i]) / (sc * sc);
  }
  d0 = std::sqrt(d0 / std::max<std::size_t>(n, 1));
  d1 = std::sqrt(d1 / std::max<std::size_t>(n, 1));
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
  h = std::min(h, span);

  constexpr double kSafety = 0.9, kAlpha = 0.7 / 5, kBeta = 0.4 / 5;
  constexpr double kMinFac = 0.2, kMaxFac = 10.0;
  double err_prev = 1e-4;
  bool rejected_last = false;
  int accepted = 0, rejected = 0;

  while (dir * (t1 - t) > 0) {
    if (h < h_min) fail(ErrorKind::StepUnderflow, "required step below 1e-14 of the interval");
    bool last = false;
    if (h >= dir * (t1 - t)) {
      h = dir * (t1 - t);
      last = true;
    }
    const double hs = dir * h;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    rhs(t + c2 * hs, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * hs, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * hs, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * hs, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + hs, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + hs, y_new, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err += std::norm(e) / (sc * sc);
    }
    err = std::sqrt(err / std::max<std::size_t>(n, 1));
    if (!std::isfinite(err)) {
      h *= kMinFac;
      rejected_last = true;
      ++rejected;
      continue;
    }

    if (err <= 1.0) {
      double fac = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_prev, kBeta);
      fac = std::clamp(fac, kMinFac, kMaxFac);
      if (rejected_last) fac = std::min(fac, 1.0);
      err_prev = std::max(err, 1e-4);
      t = last ? t1 : t + hs;
      y.swap(y_new);
      k1.swap(k7);
      ++accepted;
      rejected_last = false;
      h *= fac;
    } else {
      const double fac = std::max(kMinFac, kSafety * std::pow(err, -kAlpha));
      h *= fac;
      rejected_last = true;
      ++rejected;
    }
  }
  if (stats) {
    stats->accepted = accepted;
    stats->rejected = rejected;
  }
  return y;
}

}  // namespace mbamp
