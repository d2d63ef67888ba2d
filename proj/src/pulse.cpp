#include "mbamp/pulse.hpp"

#include <cmath>
#include <sstream>

#include "mbamp/errors.hpp"
#include "mbamp/numerics.hpp"

namespace mbamp {

std::string to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::Zero: return "zero";
    case PulseKind::Box: return "box";
    case PulseKind::SmoothBump: return "smooth_bump";
    case PulseKind::PowerStart: return "power_start";
  }
  return "unknown";
}

PulseKind pulse_kind_from_string(const std::string& name) {
  if (name == "zero") return PulseKind::Zero;
  if (name == "box") return PulseKind::Box;
  if (name == "smooth_bump") return PulseKind::SmoothBump;
  if (name == "power_start") return PulseKind::PowerStart;
  fail(ErrorKind::InvalidPulse, "unknown pulse kind '" + name + "'");
}

namespace {

void check_support(double T) {
  if (!(T > 0) || !std::isfinite(T)) fail(ErrorKind::InvalidPulse, "support end T must be finite and positive");
}

void check_amplitude(cplx c1) {
  if (c1 == cplx(0.0, 0.0) || !std::isfinite(std::abs(c1))) {
    fail(ErrorKind::InvalidPulse, "amplitude must be finite and nonzero (the pulse must be nontrivial)");
  }
}

void check_exponent(double m) {
  if (!(m > 1) || !std::isfinite(m)) fail(ErrorKind::InvalidPulse, "start exponent m must exceed 1");
}

}  // namespace

Pulse Pulse::zero(double support_end) {
  check_support(support_end);
  return Pulse(PulseKind::Zero, 0.0, 0.0, support_end);
}

Pulse Pulse::box(cplx amplitude, double support_end) {
  check_support(support_end);
  check_amplitude(amplitude);
  return Pulse(PulseKind::Box, amplitude, 1.0, support_end);
}

Pulse Pulse::smooth_bump(cplx c1, double start_exponent, double support_end) {
  check_support(support_end);
  check_amplitude(c1);
  check_exponent(start_exponent);
  return Pulse(PulseKind::SmoothBump, c1, start_exponent, support_end);
}

Pulse Pulse::power_start(cplx c1, double start_exponent, double support_end) {
  check_support(support_end);
  check_amplitude(c1);
  check_exponent(start_exponent);
  return Pulse(PulseKind::PowerStart, c1, start_exponent, support_end);
}

cplx Pulse::interior(double t) const {
  switch (kind_) {
    case PulseKind::Zero: return 0.0;
    case PulseKind::Box: return c1_;
    case PulseKind::PowerStart: return c1_ * std::pow(t, m_ - 1);
    case PulseKind::SmoothBump: {
      const double s = t / T_;
      const double gap = 1.0 - s * s;
      if (gap <= 0) return 0.0;
      return c1_ * std::pow(t, m_ - 1) * std::exp(1.0 - 1.0 / gap);
    }
  }
  return 0.0;
}

cplx Pulse::operator()(double t) const {
  if (!(t >= 0.0 && t <= T_)) return 0.0;
  return interior(t);
}

cplx Pulse::left_limit(double t) const {
  if (!(t > 0.0 && t <= T_)) return 0.0;
  return interior(t);
}

cplx Pulse::right_limit(double t) const {
  if (!(t >= 0.0 && t < T_)) return 0.0;
  return interior(t);
}

std::vector<double> Pulse::jump_times() const {
  switch (kind_) {
    case PulseKind::Box: return {0.0, T_};
    case PulseKind::PowerStart: return {T_};
    default: return {};
  }
}

std::string Pulse::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(c1=" << c1_ << ", m=" << m_ << ", T=" << T_ << ")";
  return os.str();
}

double first_moment(const Pulse& p, double tol) {
  if (p.is_trivial()) return 0.0;
  return adaptive_quad([&](double t) { return (1.0 + t) * std::abs(p(t)); }, 0.0, p.support_end(), tol);
}

}  // namespace mbamp
