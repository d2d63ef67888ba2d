#include "mbamp/specfun.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "mbamp/errors.hpp"

namespace mbamp {

namespace {

void check_bessel_domain(double nu, double x) {
  if (!(nu >= 0 && nu <= 50) || !(x >= 0)) {
    std::ostringstream os;
    os << "bessel_i requires 0 <= nu <= 50 and x >= 0 (nu = " << nu << ", x = " << x << ")";
    fail(ErrorKind::DomainError, os.str());
  }
}

// Debye polynomials U_k(p) as coefficient vectors in p, from
//   U_{k+1} = p^2 (1 - p^2) U_k' / 2 + 1/8 int_0^p (1 - 5 t^2) U_k(t) dt.
const std::vector<std::vector<double>>& debye_polynomials() {
  static const std::vector<std::vector<double>> polys = [] {
    constexpr int kTerms = 13;
    std::vector<std::vector<double>> u{{1.0}};
    for (int k = 0; k + 1 < kTerms; ++k) {
      const auto& cur = u.back();
      std::vector<double> next(cur.size() + 3, 0.0);
      for (std::size_t i = 1; i < cur.size(); ++i) {
        const double d = static_cast<double>(i) * cur[i];  // coefficient of p^(i-1) in U_k'
        next[i + 1] += 0.5 * d;
        next[i + 3] -= 0.5 * d;
      }
      for (std::size_t i = 0; i < cur.size(); ++i) {
        next[i + 1] += cur[i] / (8.0 * static_cast<double>(i + 1));
        next[i + 3] -= 5.0 * cur[i] / (8.0 * static_cast<double>(i + 3));
      }
      u.push_back(std::move(next));
    }
    return u;
  }();
  return polys;
}

double horner(const std::vector<double>& c, double p) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * p + *it;
  return s;
}

// ln I_nu(x) from the Hankel large-argument expansion; valid for x >> nu^2.
double log_hankel(double nu, double x) {
  const double mu = 4 * nu * nu;
  double term = 1.0, sum = 1.0, prev = 1e300;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    if (std::fabs(term) > prev) break;  // asymptotic series: stop at the smallest term
    sum += term;
    prev = std::fabs(term);
    if (prev < 1e-17 * std::fabs(sum)) break;
  }
  return x - 0.5 * std::log(2 * kPi * x) + std::log(sum);
}

double log_debye(double nu, double x) {
  const double z = x / nu;
  const double root = std::sqrt(1 + z * z);
  const double p = 1.0 / root;
  const double nu_eta = nu * root + nu * std::log(z / (1 + root));
  const auto& u = debye_polynomials();
  double sum = 0.0, scale = 1.0;
  for (const auto& poly : u) {
    sum += horner(poly, p) * scale;
    scale /= nu;
  }
  return nu_eta - 0.5 * std::log(2 * kPi * nu) - 0.25 * std::log(1 + z * z) + std::log(sum);
}

}  // namespace

double bessel_i_series(double nu, double x) {
  check_bessel_domain(nu, x);
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double q = 0.25 * x * x;
  double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1));
  double sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double bessel_i_asymptotic(double nu, double x) {
  check_bessel_domain(nu, x);
  if (x > 700) fail(ErrorKind::Overflow, "bessel_i: e^x exceeds the floating range");
  return std::exp(nu < 2.0 ? log_hankel(nu, x) : log_debye(nu, x));
}

double log_bessel_i(double nu, double x) {
  check_bessel_domain(nu, x);
  if (x <= kBesselSwitch) return std::log(bessel_i_series(nu, x));
  return nu < 2.0 ? log_hankel(nu, x) : log_debye(nu, x);
}

double bessel_i(double nu, double x) {
  check_bessel_domain(nu, x);
  if (x > 700) fail(ErrorKind::Overflow, "bessel_i: e^x exceeds the floating range");
  return x <= kBesselSwitch ? bessel_i_series(nu, x) : bessel_i_asymptotic(nu, x);
}

// ---------------------------------------------------------------------------

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) fail(ErrorKind::DomainError, "log_gamma requires Re z >= 1/2");
  // Lanczos, g = 7, n = 9.
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const cplx zm = z - 1.0;
  cplx a = c[0];
  for (int k = 1; k < 9; ++k) a += c[k] / (zm + static_cast<double>(k));
  const cplx t = zm + 7.5;
  return 0.5 * std::log(2 * kPi) + (zm + 0.5) * std::log(t) - t + std::log(a);
}

double arg_gamma_imag_continuous(double y) {
  if (!(y >= 1e-8 && y <= 50)) {
    std::ostringstream os;
    os << "gamma_imag requires 1e-8 <= y <= 50 (y = " << y << ")";
    fail(ErrorKind::DomainError, os.str());
  }
  // Gamma(iy) = Gamma(1 + iy) / (iy)
  return log_gamma(cplx(1.0, y)).imag() - kPi / 2;
}

GammaValue gamma_imag(double y) {
  const double arg = arg_gamma_imag_continuous(y);
  const double log_mod = log_gamma(cplx(1.0, y)).real() - std::log(y);
  double principal = std::remainder(arg, 2 * kPi);
  if (principal <= -kPi) principal += 2 * kPi;
  return {std::exp(log_mod), principal};
}

}  // namespace mbamp
