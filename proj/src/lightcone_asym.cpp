#include "mbamp/lightcone_asym.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mbamp/errors.hpp"
#include "mbamp/specfun.hpp"

namespace mbamp {

std::string to_string(Region r) {
  switch (r) {
    case Region::Causal: return "Causal";
    case Region::PartI: return "PartI";
    case Region::PartII: return "PartII";
    case Region::PartIII: return "PartIII";
    case Region::PartIV: return "PartIV";
    case Region::Tail: return "Tail";
    case Region::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

void BandParams::validate(double m) const {
  std::ostringstream os;
  if (!(eps1 > 0)) os << "eps1 must be positive; ";
  if (!(eps2 > 0 && eps2 < 0.5)) os << "eps2 must lie in (0, 1/2); ";
  if (K > 0 && K < m + eps1) os << "K must be at least m + eps1; ";
  if (!std::isfinite(C)) os << "C must be finite; ";
  if (!(sigma > 0 && sigma < 0.5)) os << "sigma must lie in (0, 1/2); ";
  if (!os.str().empty()) fail(ErrorKind::InvalidConfig, os.str());
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double band_edge(double x, double m, double beta) {
  if (!(x > std::exp(1.0))) return kNaN;
  const double L = std::log(x);
  const double base = m * L + beta * std::log(L);
  if (!(base > 0)) return kNaN;
  return x + base * base / (4 * x);
}

double band_edge_tau(double x, double m, double beta) {
  if (!(x > std::exp(1.0))) return kNaN;
  const double L = std::log(x);
  const double base = m * L + beta * std::log(L);
  if (!(base > 0)) return kNaN;
  return base * base / (4 * x);
}

RegionTag classify(double t, double x, double m, const BandParams& bp) {
  if (!(t > 0 && x > 0)) fail(ErrorKind::DomainError, "classify needs t, x > 0");
  return classify_retarded(x, t - x, m, bp);
}

RegionTag classify_retarded(double x, double tau, double m, const BandParams& bp) {
  RegionTag tag;
  tag.beta = kNaN;
  if (!(x > 0) || !(x + tau > 0)) fail(ErrorKind::DomainError, "classify needs t, x > 0");
  if (tau <= 0) {
    tag.region = Region::Causal;
    return tag;
  }
  const double t = x + tau;
  tag.xi = 2 * std::sqrt(x * tau);
  tag.k0 = 0.5 * std::sqrt(x / tau);

  if (x > std::exp(1.0)) {
    const double L = std::log(x), LL = std::log(L);
    const double beta = (tag.xi - m * L) / LL;
    tag.beta = beta;
    const double cap2 = m * m * L * L + bp.C * L * LL;
    const bool under_cap = cap2 > 0 && tag.xi * tag.xi <= cap2;
    const double K = bp.K_for(m);

    if (under_cap && beta >= -m) {
      const int n = static_cast<int>(std::floor(beta + m));
      const double lo = band_edge_tau(x, m, n - m), hi = band_edge_tau(x, m, n + 1 - m);
      if (std::isfinite(lo)) {
        tag.region = Region::PartIV;
        tag.n = n;
        tag.band_lo = lo;
        tag.band_hi = std::isfinite(hi) ? std::min(hi, cap2 / (4 * x)) : hi;
        return tag;
      }
    }
    const double hi3 = -(m + bp.eps2 - 0.5);
    if (beta >= -K && beta <= hi3 && m * L - K * LL > 0) {
      tag.region = Region::PartIII;
      tag.band_lo = band_edge_tau(x, m, -K);
      tag.band_hi = band_edge_tau(x, m, hi3);
      return tag;
    }
    const double hi2 = -(m + bp.eps1);
    if (tag.xi >= 2 && beta <= hi2 && m * L + hi2 * LL > 0) {
      tag.region = Region::PartII;
      tag.band_lo = 1 / x;
      tag.band_hi = band_edge_tau(x, m, hi2);
      return tag;
    }
  }
  if (tag.xi <= 2) {
    tag.region = Region::PartI;
    tag.band_lo = 0;
    tag.band_hi = 1 / x;
    return tag;
  }
  if (t >= x / (1 - bp.sigma) && t <= x / bp.sigma) {
    tag.region = Region::Tail;
    return tag;
  }
  tag.region = Region::Unsupported;
  return tag;
}

// ---------------------------------------------------------------------------

namespace {

double nominal_m(const ScatteringData& sd) {
  const double m = sd.pulse().start_exponent();
  if (!(m > 1)) fail(ErrorKind::AssumptionViolated, "the light-cone formulas need a pulse with m > 1");
  return m;
}

void check_cone(double x, double tau) {
  if (!(x > 0 && tau > 0)) fail(ErrorKind::DomainError, "light-cone formulas need t > x > 0");
}

}  // namespace

LightconeDiagnostics lightcone_point(double x, double tau, double m, const ScatteringData& sd) {
  check_cone(x, tau);
  LightconeDiagnostics d;
  const double s = std::sqrt(x * tau);
  d.k0 = 0.5 * std::sqrt(x / tau);
  d.xi = 2 * s;
  d.p1 = m * std::log(x) - m * std::log(s) - d.xi;
  d.p2 = m * std::log(x) - d.xi - (m - 0.5) * std::log(s);
  d.r = sd.reflection_imag(d.k0);
  return d;
}

double chi_n(double k0, int n, const ScatteringData& sd) {
  const double r = std::abs(sd.reflection_imag(k0));
  if (!(r > 0)) fail(ErrorKind::ReflectionZero, "r(i k0) vanishes; chi_n is undefined");
  return std::log(r) + std::lgamma(n + 1.0) - 0.5 * std::log(kPi) - (3.0 * n + 2.0) * std::log(2.0);
}

double theta_n(double x, double tau, int n, const ScatteringData& sd) {
  check_cone(x, tau);
  const double s = std::sqrt(x * tau);
  const double k0 = 0.5 * std::sqrt(x / tau);
  return 2 * s - (n + 0.5) * std::log(s) + chi_n(k0, n, sd);
}

LightconeValue bessel_formula(double x, double tau, const ScatteringData& sd, bool part_two) {
  const double m = nominal_m(sd);
  const LightconeDiagnostics d = lightcone_point(x, tau, m, sd);
  const double im1 = bessel_i(m - 1, d.xi), im = bessel_i(m, d.xi);
  LightconeValue v;
  v.field.E = 4 * d.k0 * d.r * im1;
  v.field.N = 1 - 2 * std::norm(d.r) * im * im;
  v.field.rho = 2.0 * d.r * im;
  if (part_two) {
    const double e = std::exp(-d.p1);
    v.error_scale = e + d.k0 * e * e;
  } else {
    v.error_scale = std::pow(d.k0, -m);
  }
  return v;
}

LightconeValue exponential_formula(double x, double tau, const ScatteringData& sd) {
  const double m = nominal_m(sd);
  const LightconeDiagnostics d = lightcone_point(x, tau, m, sd);
  const double s2 = x * tau;
  const double g = std::exp(d.xi) / (std::sqrt(kPi) * std::pow(s2, 0.25));
  LightconeValue v;
  v.field.E = 2 * d.k0 * d.r * g;
  v.field.N = 1 - std::norm(d.r) * std::exp(2 * d.xi) / (2 * kPi * std::sqrt(s2));
  v.field.rho = d.r * g;
  v.error_scale = 1 / std::log(x) + std::exp(-d.p2);
  return v;
}

LightconeValue soliton_train_formula(double x, double tau, int n, const ScatteringData& sd) {
  nominal_m(sd);
  check_cone(x, tau);
  if (n < 0) fail(ErrorKind::DomainError, "band index must be nonnegative");
  const double k0 = 0.5 * std::sqrt(x / tau);
  const cplx r = sd.reflection_imag(k0);
  const double th = theta_n(x, tau, n, sd);
  const cplx phase = std::polar(1.0, std::arg(r));
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  const double ch = std::cosh(th);
  LightconeValue v;
  v.field.E = 2 * std::sqrt(x / tau) * sign * phase / ch;
  v.field.N = 1 - 2 / (ch * ch);
  v.field.rho = -2.0 * sign * phase * std::tanh(th) / ch;
  v.error_scale = 1 / std::sqrt(std::log(x));
  return v;
}

LightconeValue eval_lightcone(const RegionTag& tag, double x, double tau, const ScatteringData& sd) {
  switch (tag.region) {
    case Region::PartI: return bessel_formula(x, tau, sd, false);
    case Region::PartII: return bessel_formula(x, tau, sd, true);
    case Region::PartIII: return exponential_formula(x, tau, sd);
    case Region::PartIV: return soliton_train_formula(x, tau, tag.n, sd);
    default: break;
  }
  fail(ErrorKind::WrongRegion, "eval_lightcone called for region " + to_string(tag.region));
}

// ---------------------------------------------------------------------------

double inversion_seed(double z, double gamma) {
  if (!(z > 1)) fail(ErrorKind::DomainError, "inversion seed needs z > 1");
  const double lz = std::log(z);
  return z + gamma * lz + gamma * gamma * lz / z + gamma * gamma * gamma * (2 * lz - lz * lz) / (2 * z * z);
}

PeakPrediction predict_peaks(double x, int n, const ScatteringData& sd) {
  const double m = nominal_m(sd);
  if (n < 0) fail(ErrorKind::DomainError, "band index must be nonnegative");
  if (!std::isfinite(band_edge_tau(x, m, n - m)) || !std::isfinite(band_edge_tau(x, m, n + 1 - m))) {
    std::ostringstream os;
    os << "band " << n << " is empty at x = " << x;
    fail(ErrorKind::NoRoot, os.str());
  }
  // Theta_n as a function of s = sqrt(x (t - x)).
  auto theta_s = [&](double s) { return 2 * s - (n + 0.5) * std::log(s) + chi_n(x / (2 * s), n, sd); };

  // Seed: tail model r = C k0^(-m) turns Theta_n = 0 into s - gamma ln s = z.
  PeakPrediction out;
  double s = 0.0;
  {
    const TailModel tm = sd.tail_model();
    const double beta = n + 0.5 - m;
    const double c = std::log(std::abs(tm.C)) + m * std::log(2.0) + std::lgamma(n + 1.0) - 0.5 * std::log(kPi) -
                     (3.0 * n + 2.0) * std::log(2.0);
    const double z = 0.5 * (m * std::log(x) - c);
    if (z > 1) s = inversion_seed(z, 0.5 * beta);
  }
  if (!(s > 0)) s = 0.5 * (m * std::log(x));
  out.seed_tau = s * s / x;
  out.seed_t = x + out.seed_tau;

  // Bracket on s > s_min where Theta is increasing, then safeguarded Newton.
  const double s_min = std::max(0.5 * (n + 0.5) * 1.0001, 1e-6);
  double lo = std::max(s_min, 0.5 * s), hi = std::max(2 * s, lo * 2);
  int guard = 0;
  while (theta_s(lo) > 0 && lo > s_min * 1.0000001 && guard++ < 200) lo = std::max(s_min, 0.5 * lo);
  guard = 0;
  while (theta_s(hi) < 0 && guard++ < 200) hi *= 2;
  if (theta_s(lo) > 0 || theta_s(hi) < 0) fail(ErrorKind::NoRoot, "Theta_n does not change sign on the band");

  s = std::clamp(s, lo, hi);
  double f = theta_s(s);
  int it = 0;
  for (; it < 100 && std::fabs(f) > 1e-12; ++it) {
    if (f < 0) lo = s;
    else hi = s;
    const double h = 1e-6 * s;
    const double df = (theta_s(s + h) - theta_s(s - h)) / (2 * h);
    double next = s - f / df;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    s = next;
    f = theta_s(s);
  }
  out.tau = s * s / x;
  out.t = x + out.tau;
  out.theta = theta_n(x, out.tau, n, sd);
  out.iterations = it;
  if (!(std::fabs(out.theta) < 1e-9)) fail(ErrorKind::NoRoot, "peak search did not converge");
  return out;
}

}  // namespace mbamp
