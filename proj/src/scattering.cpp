#include "mbamp/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "mbamp/errors.hpp"

namespace mbamp {

namespace {

void check_k(const Pulse& p, cplx k) {
  if (k.imag() < 0) fail(ErrorKind::DomainError, "scattering data are evaluated on Im k >= 0 only");
  if (p.support_end() * k.imag() > kMaxGrowthExponent) {
    std::ostringstream os;
    os << "T Im k = " << p.support_end() * k.imag() << " exceeds " << kMaxGrowthExponent;
    fail(ErrorKind::Overflow, os.str());
  }
}

// Both columns are integrated in the gauge Phi = e^{-ik sigma_3 (t - c)} W, c = T/2,
// which leaves only the off-diagonal couplings -E/2 e^{2ik(t-c)} and conj(E)/2 e^{-2ik(t-c)}.
struct Gauge {
  const Pulse& p;
  cplx k;
  double c;

  void couplings(double t, cplx& up, cplx& down) const {
    const cplx e = p(t);
    const cplx ph = std::exp(2.0 * kI * k * (t - c));
    up = -0.5 * e * ph;
    down = 0.5 * std::conj(e) / ph;
  }
};

}  // namespace

Mat2 jost_matrix(const Pulse& p, cplx k, const Tolerances& tol) {
  check_k(p, k);
  if (p.is_trivial()) return {1.0, 0.0, 0.0, 1.0};
  const double T = p.support_end();
  const Gauge g{p, k, 0.5 * T};
  OdeRhs rhs = [&](double t, const OdeState& y, OdeState& dy) {
    cplx up, down;
    g.couplings(t, up, down);
    dy[0] = up * y[1];
    dy[1] = down * y[0];
    dy[2] = up * y[3];
    dy[3] = down * y[2];
  };
  const OdeState w = ode_advance(rhs, T, 0.0, {1.0, 0.0, 0.0, 1.0}, tol);
  const cplx e = std::exp(kI * k * T);
  return {w[0], e * w[2], w[1] / e, w[3]};
}

ABValue ab_direct(const Pulse& p, cplx k, const Tolerances& tol) {
  check_k(p, k);
  if (p.is_trivial()) return {};
  const double T = p.support_end();
  const Gauge g{p, k, 0.5 * T};
  OdeRhs rhs = [&](double t, const OdeState& y, OdeState& dy) {
    cplx up, down;
    g.couplings(t, up, down);
    dy[0] = up * y[1];
    dy[1] = down * y[0];
  };
  const OdeState w = ode_advance(rhs, T, 0.0, {0.0, 1.0}, tol);
  return {w[1], std::exp(kI * k * T) * w[0]};
}

ABJet ab_jet_direct(const Pulse& p, cplx k, const Tolerances& tol) {
  check_k(p, k);
  if (p.is_trivial()) return {};
  const double T = p.support_end();
  const double c = 0.5 * T;
  const Gauge g{p, k, c};
  OdeRhs rhs = [&](double t, const OdeState& y, OdeState& dy) {
    cplx up, down;
    g.couplings(t, up, down);
    const cplx s = 2.0 * kI * (t - c);
    dy[0] = up * y[1];
    dy[1] = down * y[0];
    dy[2] = up * (s * y[1] + y[3]);
    dy[3] = down * (-s * y[0] + y[2]);
  };
  const OdeState w = ode_advance(rhs, T, 0.0, {0.0, 1.0, 0.0, 0.0}, tol);
  const cplx e = std::exp(kI * k * T);
  ABJet j;
  j.a = w[1];
  j.a_dot = w[3];
  j.b = e * w[0];
  j.b_dot = kI * T * e * w[0] + e * w[2];
  return j;
}

// ---------------------------------------------------------------------------

struct ScatteringData::Impl {
  std::once_flag cache_once;
  std::vector<double> nodes;
  std::vector<ABJet> jets;

  std::once_flag tail_once;
  std::optional<TailFit> fit;
  std::optional<Error> fit_error;
  TailModel model;
};

ScatteringData::ScatteringData(Pulse pulse, ScatteringOptions opt)
    : pulse_(std::move(pulse)), opt_(opt), impl_(std::make_shared<Impl>()) {
  opt_.tol.validate();
  if (!(opt_.cache_extent > 0) || !(opt_.cache_tol > 0)) fail(ErrorKind::DomainError, "cache extent and tolerance must be positive");
  if (!(opt_.fit_kappa_min > 0) || !(opt_.fit_kappa_max > opt_.fit_kappa_min) || opt_.fit_points < 4) {
    fail(ErrorKind::DomainError, "tail fit window must satisfy 0 < kappa_min < kappa_max with at least 4 points");
  }
}

ABValue ScatteringData::ab(cplx k) const { return ab_direct(pulse_, k, opt_.tol); }

ABJet ScatteringData::ab_jet(cplx k) const { return ab_jet_direct(pulse_, k, opt_.tol); }

namespace {

cplx safe_ratio(cplx b, cplx a) {
  if (std::abs(a) < 1e-12) fail(ErrorKind::DivisionNearZero, "|a(k)| < 1e-12: k is close to a zero of a");
  return b / a;
}

cplx hermite(double u, double h, cplx f0, cplx d0, cplx f1, cplx d1) {
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * f0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * f1 + (u3 - u2) * h * d1;
}

ABValue interpolate(const ABJet& l, const ABJet& r, double s0, double s1, double s) {
  const double h = s1 - s0;
  const double u = (s - s0) / h;
  return {hermite(u, h, l.a, l.a_dot, r.a, r.a_dot), hermite(u, h, l.b, l.b_dot, r.b, r.b_dot)};
}

}  // namespace

cplx ScatteringData::reflection(cplx k) const {
  const ABValue v = ab(k);
  return safe_ratio(v.b, v.a);
}

cplx ScatteringData::b_deriv(cplx k) const { return ab_jet(k).b_dot; }

namespace {

void refine(const Pulse& p, const Tolerances& tol, double cache_tol, double s0, const ABJet& j0, double s1,
            const ABJet& j1, int depth, std::vector<double>& nodes, std::vector<ABJet>& jets) {
  const double sm = 0.5 * (s0 + s1);
  const ABJet jm = ab_jet_direct(p, sm, tol);
  const ABValue guess = interpolate(j0, j1, s0, s1, sm);
  const double err = std::max(std::abs(guess.a - jm.a), std::abs(guess.b - jm.b));
  if (err > cache_tol && depth < 40) {
    refine(p, tol, cache_tol, s0, j0, sm, jm, depth + 1, nodes, jets);
    refine(p, tol, cache_tol, sm, jm, s1, j1, depth + 1, nodes, jets);
    return;
  }
  nodes.push_back(sm);
  jets.push_back(jm);
  nodes.push_back(s1);
  jets.push_back(j1);
}

}  // namespace

ABValue ScatteringData::ab_real(double s) const {
  const double L = opt_.cache_extent;
  if (pulse_.is_trivial()) return {};
  if (!(std::fabs(s) <= L)) return ab(s);
  std::call_once(impl_->cache_once, [&] {
    const int n0 = std::max(8, static_cast<int>(std::ceil(2 * L / 0.1)));
    std::vector<double> nodes{-L};
    std::vector<ABJet> jets{ab_jet_direct(pulse_, -L, opt_.tol)};
    for (int i = 1; i <= n0; ++i) {
      const double s1 = -L + 2 * L * i / n0;
      const ABJet j1 = ab_jet_direct(pulse_, s1, opt_.tol);
      refine(pulse_, opt_.tol, opt_.cache_tol, nodes.back(), jets.back(), s1, j1, 0, nodes, jets);
    }
    impl_->nodes = std::move(nodes);
    impl_->jets = std::move(jets);
  });
  const auto& nodes = impl_->nodes;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
  std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - nodes.begin(), 1, static_cast<std::ptrdiff_t>(nodes.size() - 1)));
  return interpolate(impl_->jets[i - 1], impl_->jets[i], nodes[i - 1], nodes[i], s);
}

cplx ScatteringData::reflection_real(double s) const {
  const ABValue v = ab_real(s);
  return safe_ratio(v.b, v.a);
}

std::size_t ScatteringData::cache_nodes() const {
  ab_real(0.0);
  return impl_->nodes.size();
}

std::vector<double> ScatteringData::real_dips(double lo, double hi) const {
  std::vector<double> out;
  if (pulse_.is_trivial()) return out;
  ab_real(0.0);
  const auto& nodes = impl_->nodes;
  const auto& jets = impl_->jets;
  double bmax = 0.0;
  for (const auto& j : jets) bmax = std::max(bmax, std::abs(j.b));
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    const double bi = std::abs(jets[i].b);
    if (!(bi <= std::abs(jets[i - 1].b) && bi <= std::abs(jets[i + 1].b))) continue;
    if (bi > 0.05 * bmax) continue;
    // Newton on b projected onto the real line; keep the result only if b really vanishes there.
    double s = nodes[i];
    double cand = s;
    for (int it = 0; it < 30; ++it) {
      const ABJet j = ab_jet_direct(pulse_, cand, opt_.tol);
      if (std::abs(j.b_dot) == 0.0) break;
      const double step = (j.b / j.b_dot).real();
      cand -= step;
      if (std::fabs(step) < 1e-14 * (1 + std::fabs(cand))) break;
    }
    if (std::fabs(cand - s) < nodes[i + 1] - nodes[i - 1] && std::abs(ab_direct(pulse_, cand, opt_.tol).b) < 1e-9) s = cand;
    if (s > lo && s < hi) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

cplx power_i(double kappa, double m) {
  // (i kappa)^(-m) on the principal branch
  return std::pow(kappa, -m) * std::exp(cplx(0.0, -m * kPi / 2));
}

}  // namespace

TailFit ScatteringData::fit() const {
  const auto kind = pulse_.kind();
  if (kind != PulseKind::PowerStart && kind != PulseKind::SmoothBump) {
    fail(ErrorKind::FitRejected, "tail fit needs a pulse with a power-law start of order m > 1");
  }
  const double T = pulse_.support_end();
  const double kmax = std::min(opt_.fit_kappa_max, 0.9 * kMaxGrowthExponent / T);
  const double kmin = std::min(opt_.fit_kappa_min, 0.5 * kmax);
  const int n = opt_.fit_points;
  std::vector<double> lk(n), lr(n);
  std::vector<cplx> rv(n);
  for (int i = 0; i < n; ++i) {
    const double kappa = kmin * std::pow(kmax / kmin, static_cast<double>(i) / (n - 1));
    rv[i] = reflection(cplx(0.0, kappa));
    lk[i] = std::log(kappa);
    lr[i] = std::log(std::abs(rv[i]));
  }
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += lk[i];
    my += lr[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (lk[i] - mx) * (lr[i] - my);
    sxx += (lk[i] - mx) * (lk[i] - mx);
  }
  TailFit f;
  f.m = -sxy / sxx;
  const double log_c = my + f.m * mx;
  cplx phasor = 0.0;
  for (int i = 0; i < n; ++i) phasor += rv[i] / std::abs(rv[i]) * std::exp(cplx(0.0, f.m * kPi / 2));
  f.C = std::exp(log_c) * phasor / std::abs(phasor);
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kappa = std::exp(lk[i]);
    ss += std::norm((rv[i] - f.C * power_i(kappa, f.m)) / rv[i]);
  }
  f.residual = std::sqrt(ss / n);
  f.kappa_min = kmin;
  f.kappa_max = kmax;
  const double m0 = pulse_.start_exponent();
  if (f.residual > opt_.fit_max_residual || std::fabs(f.m - m0) > 0.05 * m0) {
    std::ostringstream os;
    os << "tail fit m = " << f.m << " (nominal " << m0 << "), residual " << f.residual;
    fail(ErrorKind::FitRejected, os.str());
  }
  return f;
}

TailModel ScatteringData::tail_model() const {
  std::call_once(impl_->tail_once, [&] {
    if (pulse_.is_trivial()) return;
    const auto kind = pulse_.kind();
    try {
      if (kind == PulseKind::PowerStart || kind == PulseKind::SmoothBump) impl_->fit = fit();
    } catch (const Error& e) {
      impl_->fit_error = e;
      return;
    }
    const double T = pulse_.support_end();
    TailModel tm;
    tm.m = pulse_.start_exponent();
    tm.kappa_ref = std::min(opt_.fit_kappa_max, 0.9 * kMaxGrowthExponent / T);
    tm.C = reflection(cplx(0.0, tm.kappa_ref)) / power_i(tm.kappa_ref, tm.m);
    impl_->model = tm;
  });
  if (impl_->fit_error) throw *impl_->fit_error;
  return impl_->model;
}

cplx ScatteringData::reflection_imag(double kappa) const {
  if (!(kappa > 0)) fail(ErrorKind::DomainError, "reflection_imag needs kappa > 0");
  if (pulse_.is_trivial()) return 0.0;
  const double kref = std::min(opt_.fit_kappa_max, 0.9 * kMaxGrowthExponent / pulse_.support_end());
  if (kappa <= kref) return reflection(cplx(0.0, kappa));
  const TailModel tm = tail_model();
  return tm.C * power_i(kappa, tm.m);
}

}  // namespace mbamp
