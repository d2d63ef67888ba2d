#include "mbamp/tail_asym.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mbamp/errors.hpp"
#include "mbamp/specfun.hpp"

namespace mbamp {

namespace {

constexpr double kMinReflection = 1e-12;

double checked_abs_r(const ScatteringData& sd, double s) {
  const double r = std::abs(sd.reflection_real(s));
  if (r < kMinReflection) {
    std::ostringstream os;
    os << "|r(" << s << ")| = " << r << " is below 1e-12";
    fail(ErrorKind::ReflectionZero, os.str());
  }
  return r;
}

// ln(1 + |r(s)|^-2)
double log_weight(const ScatteringData& sd, double s) {
  const double n = std::norm(sd.reflection_real(s));
  return std::log1p(1.0 / std::max(n, 1e-300));
}

double nu_from_abs(double r) { return std::log1p(1.0 / (r * r)) / (2 * kPi); }

}  // namespace

double tail_k0(double t, double x) {
  if (!(x > 0 && t > x)) fail(ErrorKind::DomainError, "tail formulas need t > x > 0");
  return 0.5 * std::sqrt(x / (t - x));
}

NuPair nu_pair(const ScatteringData& sd, double k0) {
  if (!(k0 > 0)) fail(ErrorKind::DomainError, "nu_pair needs k0 > 0");
  return {nu_from_abs(checked_abs_r(sd, -k0)), nu_from_abs(checked_abs_r(sd, k0))};
}

double real_line_quad(const ScatteringData& sd, const std::function<double(double)>& f, double lo, double hi) {
  std::vector<double> cuts{lo};
  for (double d : sd.real_dips(lo, hi)) cuts.push_back(d);
  cuts.push_back(hi);
  const double tol = sd.tolerances().quad_tol;
  QuadOptions opt;
  opt.max_intervals = 20000;
  double sum = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] > cuts[i - 1]) sum += adaptive_quad(f, cuts[i - 1], cuts[i], tol, opt);
  }
  return sum;
}

namespace {

// int_{-k0}^{k0} (g(s) - g(e)) / (s - e) ds for an endpoint e = -k0 or k0; the
// quotient is replaced by g'(e) within a small panel where it would cancel.
double removable_integral(const ScatteringData& sd, double k0, double e) {
  const double ge = log_weight(sd, e);
  const double h = 1e-5 * k0;
  const double inward = e < 0 ? 1.0 : -1.0;
  // one-sided second-order difference, staying inside [-k0, k0]
  const double g1 = log_weight(sd, e + inward * h), g2 = log_weight(sd, e + 2 * inward * h);
  const double slope = inward * (-3 * ge + 4 * g1 - g2) / (2 * h);
  const double panel = 1e-6 * k0;
  return real_line_quad(
      sd,
      [&](double s) {
        const double d = s - e;
        if (std::fabs(d) < panel) return slope;
        return (log_weight(sd, s) - ge) / d;
      },
      -k0, k0);
}

}  // namespace

TailPhases omega_pair_k0(const ScatteringData& sd, const SolitonSpectrum& spec, double k0, double tau) {
  if (!(k0 > 0 && tau > 0)) fail(ErrorKind::DomainError, "omega_pair needs k0 > 0 and tau > 0");
  TailPhases ph;
  ph.nu = nu_pair(sd, k0);
  ph.integral_l = removable_integral(sd, k0, -k0);
  ph.integral_r = removable_integral(sd, k0, k0);
  for (const auto& z : spec.zeros) {
    if (std::abs(z.k) < k0) {
      ph.soliton_sum_l += 2 * std::arg((k0 + std::conj(z.k)) / (k0 + z.k));
      ph.soliton_sum_r += 2 * std::arg((k0 - std::conj(z.k)) / (k0 - z.k));
    }
  }
  const ABValue left = sd.ab_real(-k0), right = sd.ab_real(k0);
  const double lg = std::log(16 * tau * k0);
  ph.omega_l = 4 * tau * k0 - ph.nu.l * lg - ph.integral_l / kPi + std::arg(left.a * left.b) +
               gamma_imag(ph.nu.l).argument + ph.soliton_sum_l - kPi / 4;
  ph.omega_r = -4 * tau * k0 + ph.nu.r * lg - ph.integral_r / kPi + std::arg(right.a * right.b) -
               gamma_imag(ph.nu.r).argument + ph.soliton_sum_r + kPi / 4;
  return ph;
}

TailPhases omega_pair(const ScatteringData& sd, const SolitonSpectrum& spec, double t, double x) {
  return omega_pair_k0(sd, spec, tail_k0(t, x), t - x);
}

SolitonState soliton_profile(cplx kj, double log_w_abs, double w_arg) {
  SolitonState st;
  const double kappa = kj.imag();
  st.log_w_abs = log_w_abs;
  st.w_abs = std::exp(log_w_abs);
  st.w_arg = w_arg;
  // A = 2 Im k |w|^2 / (1 + |w|^2),  |B| = 2 Im k |w| / (1 + |w|^2), written via ln|w|
  st.A = kappa * (1 + std::tanh(log_w_abs));
  const double b_abs = kappa / std::cosh(log_w_abs);
  st.B = -b_abs * std::polar(1.0, -w_arg);
  st.P = 1 - 2 * std::norm(st.B) / std::norm(kj);
  st.Q = -2.0 * kI * st.B / std::conj(kj) * (1.0 - kI * st.A / kj);
  return st;
}

SolitonState soliton_state(const ScatteringData& sd, const SolitonSpectrum& spec, std::size_t j, double t, double x) {
  if (j >= spec.size()) fail(ErrorKind::DomainError, "soliton index out of range");
  const double k0 = tail_k0(t, x);
  const double tau = t - x;
  const SolitonZero& z = spec.zeros[j];
  const cplx kj = z.k;
  const double re = kj.real(), im = kj.imag(), mod2 = std::norm(kj);

  const double poisson = real_line_quad(
      sd, [&](double s) { return log_weight(sd, s) / ((s - re) * (s - re) + im * im); }, -k0, k0);
  const double conj_poisson = real_line_quad(
      sd, [&](double s) { return (s - re) * log_weight(sd, s) / ((s - re) * (s - re) + im * im); }, -k0, k0);

  double log_prod = 0.0, arg_sum = 0.0;
  for (std::size_t p = 0; p < spec.size(); ++p) {
    if (std::abs(spec.zeros[p].k) < std::abs(kj)) {
      const cplx q = (kj - spec.zeros[p].k) / (kj - std::conj(spec.zeros[p].k));
      log_prod += 2 * std::log(std::abs(q));
      arg_sum += 2 * std::arg(q);
    }
  }
  const cplx ab = z.a * z.b_dot;
  const double log_w = -std::log(2 * im * std::abs(ab)) - 2 * im * (tau - x / (4 * mod2)) - im / kPi * poisson + log_prod;
  const double arg_w = -std::arg(ab) + 2 * re * (tau + x / (4 * mod2)) + conj_poisson / kPi + arg_sum;

  SolitonState st = soliton_profile(kj, log_w, arg_w);
  st.j = j;

  const TailPhases ph = omega_pair_k0(sd, spec, k0, tau);
  const double sl = std::sqrt(ph.nu.l), sr = std::sqrt(ph.nu.r);
  const double scale = 1 / (2 * std::sqrt(k0 * tau));
  const cplx el = std::polar(1.0, ph.omega_l), er = std::polar(1.0, ph.omega_r);
  const cplx A = st.A, B = st.B;
  const cplx kjc = std::conj(kj);
  st.X = sl * scale * ((1.0 + kI * A / (k0 + kjc)) * B / el / (k0 + kjc) - (1.0 - kI * A / (k0 + kj)) * std::conj(B) * el / (k0 + kj)) +
         sr * scale * ((1.0 - kI * A / (k0 - kjc)) * B / er / (k0 - kjc) - (1.0 + kI * A / (k0 - kj)) * std::conj(B) * er / (k0 - kj));
  const cplx gl = el * std::pow(1.0 - kI * A / (k0 + kj), 2) + B * B / el / std::pow(k0 + kjc, 2);
  const cplx gr = er * std::pow(1.0 + kI * A / (k0 - kj), 2) + B * B / er / std::pow(k0 - kjc, 2);
  st.Y = kI * sl * scale * gl - kI * sr * scale * gr;
  return st;
}

TailValue eval_tail(const ScatteringData& sd, const SolitonSpectrum& spec, double t, double x, double eps) {
  const double k0 = tail_k0(t, x);
  const double tau = t - x;
  if (!(eps > 0)) eps = default_velocity_eps(spec);
  TailValue out;
  out.error_scale = 1 / tau;
  out.soliton = velocity_match(spec, t, x, eps);
  if (!out.soliton) {
    const TailPhases ph = omega_pair_k0(sd, spec, k0, tau);
    const double sl = std::sqrt(ph.nu.l), sr = std::sqrt(ph.nu.r);
    const cplx el = std::polar(1.0, ph.omega_l), er = std::polar(1.0, ph.omega_r);
    out.field.E = 2 * std::sqrt(k0) / std::sqrt(tau) * (sl * el + sr * er);
    out.field.N = -1.0;
    out.field.rho = 1 / (std::sqrt(tau) * std::sqrt(k0)) * (sl * el * kI - sr * er * kI);
    return out;
  }
  const std::size_t j = *out.soliton;
  const SolitonState st = soliton_state(sd, spec, j, t, x);
  const TailPhases ph = omega_pair_k0(sd, spec, k0, tau);
  const cplx kj = spec.zeros[j].k, kjc = std::conj(kj);
  const cplx A = st.A, B = st.B;
  const cplx el = std::polar(1.0, ph.omega_l), er = std::polar(1.0, ph.omega_r);
  const double amp = 2 / std::sqrt(tau);
  out.field.E = 4.0 * B +
                amp * std::sqrt(k0 * ph.nu.l) * (std::pow(1.0 - kI * A / (k0 + kj), 2) * el + B * B / el / std::pow(k0 + kjc, 2)) +
                amp * std::sqrt(k0 * ph.nu.r) * (std::pow(1.0 + kI * A / (k0 - kj), 2) * er + B * B / er / std::pow(k0 - kjc, 2));
  out.field.N = -st.P + (st.Q * std::conj(st.Y) + std::conj(st.Q) * st.Y).real();
  out.field.rho = st.Q + 2.0 * st.Y * st.P + 2.0 * st.X * st.Q;
  out.w_abs = st.w_abs;
  out.w_arg = st.w_arg;
  return out;
}

}  // namespace mbamp
