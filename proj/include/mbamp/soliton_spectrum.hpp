#pragma once

#include <optional>
#include <vector>

#include "mbamp/scattering.hpp"

namespace mbamp {

struct SolitonZero {
  cplx k{0.0, 0.0};
  cplx gamma{0.0, 0.0};  // 1 / (a(k) b'(k))
  cplx a{0.0, 0.0};
  cplx b_dot{0.0, 0.0};
  double velocity = 0.0;
};

struct SolitonSpectrum {
  std::vector<SolitonZero> zeros;  // sorted by |k| increasing
  Rect box{};                      // search box actually used (after any perturbation)

  std::size_t size() const { return zeros.size(); }
  bool empty() const { return zeros.empty(); }
};

/// 4|k|^2 / (1 + 4|k|^2)
double soliton_velocity(cplx k);

/// [-K, K] x [1e-4, K] with K from the size of the pulse, enlarged until |b| on the
/// top edge falls below 1e-3 of its maximum on the real line.
Rect default_search_box(const ScatteringData& sd);

/// Every zero of b inside `box` (Im > 0), refined by Newton to |b| <= 1e-10.
/// The box edges are nudged outward if b vanishes on them. Throws
/// AssumptionViolated if a zero is not simple or two moduli coincide.
SolitonSpectrum find_zeros(const ScatteringData& sd, const Rect& box);
SolitonSpectrum find_zeros(const ScatteringData& sd);

/// Half the smallest gap between soliton velocities, 0.02 for fewer than two.
double default_velocity_eps(const SolitonSpectrum& spec);

/// Index of the zero whose velocity lies within eps of x/t; AmbiguousMatch if two do.
std::optional<std::size_t> velocity_match(const SolitonSpectrum& spec, double t, double x, double eps);

}  // namespace mbamp
