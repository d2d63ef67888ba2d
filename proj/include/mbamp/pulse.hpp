#pragma once

#include <string>
#include <vector>

#include "mbamp/types.hpp"

namespace mbamp {

enum class PulseKind { Zero, Box, SmoothBump, PowerStart };

std::string to_string(PulseKind kind);
PulseKind pulse_kind_from_string(const std::string& name);

/// Boundary input E_1(t) on [0, T], identically zero outside.
///
///  - Box:        c1 on [0, T].
///  - SmoothBump: c1 t^(m-1) exp(1 - 1/(1 - (t/T)^2)). Starts like c1 t^(m-1)(1 + O(t^2))
///                and closes with all derivatives vanishing at T.
///  - PowerStart: c1 t^(m-1) on [0, T], cut off at T.
///  - Zero:       the trivial input; only used as a reference for the free equation.
///
/// Values are immutable after construction.
class Pulse {
 public:
  static Pulse zero(double support_end = 1.0);
  static Pulse box(cplx amplitude, double support_end);
  static Pulse smooth_bump(cplx c1, double start_exponent, double support_end);
  static Pulse power_start(cplx c1, double start_exponent, double support_end);

  PulseKind kind() const { return kind_; }
  cplx amplitude() const { return c1_; }
  double support_end() const { return T_; }
  /// m in E_1(t) ~ c1 t^(m-1); 1 for Box, 0 for Zero.
  double start_exponent() const { return m_; }
  bool is_trivial() const { return kind_ == PulseKind::Zero; }

  /// E_1(t). Box and PowerStart include both end points of [0, T].
  cplx operator()(double t) const;
  /// One-sided limits, which differ only at jump_times().
  cplx left_limit(double t) const;
  cplx right_limit(double t) const;
  /// Times in [0, T] where E_1 is discontinuous.
  std::vector<double> jump_times() const;

  std::string describe() const;

 private:
  Pulse(PulseKind kind, cplx c1, double m, double T) : kind_(kind), c1_(c1), m_(m), T_(T) {}
  cplx interior(double t) const;

  PulseKind kind_;
  cplx c1_;
  double m_;
  double T_;
};

inline cplx eval(const Pulse& p, double t) { return p(t); }

/// int_0^T (1 + t) |E_1(t)| dt.
double first_moment(const Pulse& p, double tol = 1e-10);

}  // namespace mbamp
