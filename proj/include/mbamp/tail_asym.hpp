#pragma once

#include <functional>
#include <optional>

#include "mbamp/soliton_spectrum.hpp"

namespace mbamp {

struct NuPair {
  double l = 0.0;
  double r = 0.0;
};

/// Phases of the two oscillatory components behind the front, with their parts.
struct TailPhases {
  NuPair nu;
  double omega_l = 0.0;
  double omega_r = 0.0;
  double integral_l = 0.0;  // principal-value-free integrals entering omega_l / omega_r
  double integral_r = 0.0;
  double soliton_sum_l = 0.0;
  double soliton_sum_r = 0.0;
};

struct SolitonState {
  std::size_t j = 0;
  double w_abs = 0.0;
  double log_w_abs = 0.0;
  double w_arg = 0.0;
  double A = 0.0;
  cplx B{0.0, 0.0};
  double P = 1.0;
  cplx Q{0.0, 0.0};
  cplx X{0.0, 0.0};
  cplx Y{0.0, 0.0};
};

/// k0 = sqrt(x / (t - x)) / 2
double tail_k0(double t, double x);

/// nu = ln(1 + |r(-+k0)|^-2) / (2 pi); ReflectionZero if |r| < 1e-12 at either point.
NuPair nu_pair(const ScatteringData& sd, double k0);

/// omega_l, omega_r at (t, x) in the tail cone.
TailPhases omega_pair(const ScatteringData& sd, const SolitonSpectrum& spec, double t, double x);
/// The same with k0 and tau = t - x as independent variables.
TailPhases omega_pair_k0(const ScatteringData& sd, const SolitonSpectrum& spec, double k0, double tau);

/// |w_j|, arg w_j and the derived soliton quantities at (t, x). X and Y need the
/// tail phases; they are computed here as well.
SolitonState soliton_state(const ScatteringData& sd, const SolitonSpectrum& spec, std::size_t j, double t, double x);

/// P, Q, A, B from |w_j| (given as its logarithm) and arg w_j only.
SolitonState soliton_profile(cplx kj, double log_w_abs, double w_arg);

struct TailValue {
  FieldTriple field;
  double error_scale = 0.0;  // 1 / tau
  std::optional<std::size_t> soliton;
  double w_abs = 0.0;
  double w_arg = 0.0;
};

/// Leading-order field in the tail cone; the near-soliton branch is used when x/t
/// lies within eps of a soliton velocity (eps <= 0 selects the default).
TailValue eval_tail(const ScatteringData& sd, const SolitonSpectrum& spec, double t, double x, double eps = 0.0);

/// Integral of f over [lo, hi] on the real k-line, split at deep dips of |r|.
double real_line_quad(const ScatteringData& sd, const std::function<double(double)>& f, double lo, double hi);

}  // namespace mbamp
