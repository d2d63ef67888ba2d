#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "mbamp/numerics.hpp"
#include "mbamp/pulse.hpp"

namespace mbamp {

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<cplx, 4>;

inline cplx det(const Mat2& m) { return m[0] * m[3] - m[1] * m[2]; }

/// Largest T Im k for which the t-equation is integrated directly.
inline constexpr double kMaxGrowthExponent = 600.0;

/// Phi(0; k) for the t-equation Phi_t = -(ik sigma_3 + H) Phi with Phi(T; k) = e^{-ikT sigma_3}.
/// Throws Overflow when T Im k > 600 and DomainError when Im k < 0.
Mat2 jost_matrix(const Pulse& p, cplx k, const Tolerances& tol = {});

struct ABValue {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
};

/// a, b together with their k-derivatives from the variational system.
struct ABJet {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
  cplx a_dot{0.0, 0.0};
  cplx b_dot{0.0, 0.0};
};

ABValue ab_direct(const Pulse& p, cplx k, const Tolerances& tol = {});
ABJet ab_jet_direct(const Pulse& p, cplx k, const Tolerances& tol = {});

/// Result of the log-linear regression r(i kappa) ~ C (i kappa)^(-m).
struct TailFit {
  double m = 0.0;
  cplx C{0.0, 0.0};
  double residual = 0.0;  // rms relative misfit over the window
  double kappa_min = 0.0;
  double kappa_max = 0.0;
};

/// Constants used to extend r(i kappa) past the direct-integration limit:
/// nominal order m of the pulse and C measured at the top of the fit window.
struct TailModel {
  double m = 0.0;
  cplx C{0.0, 0.0};
  double kappa_ref = 0.0;
};

struct ScatteringOptions {
  Tolerances tol{};
  double cache_extent = 6.0;      // real-line cache covers [-extent, extent]
  double cache_tol = 1e-8;        // cubic interpolation error target
  double fit_kappa_min = 20.0;
  double fit_kappa_max = 200.0;
  int fit_points = 24;
  double fit_max_residual = 0.05;
};

/// Scattering data of one pulse. Cheap to copy; the real-line cache and the
/// tail constants are built on first use and shared between copies.
class ScatteringData {
 public:
  explicit ScatteringData(Pulse pulse, ScatteringOptions opt = {});

  const Pulse& pulse() const { return pulse_; }
  const ScatteringOptions& options() const { return opt_; }
  const Tolerances& tolerances() const { return opt_.tol; }

  ABValue ab(cplx k) const;
  ABJet ab_jet(cplx k) const;
  /// r = b / a; DivisionNearZero if |a| < 1e-12.
  cplx reflection(cplx k) const;
  cplx b_deriv(cplx k) const;

  /// a, b and r on the real line, interpolated from the cache inside the extent.
  ABValue ab_real(double s) const;
  cplx reflection_real(double s) const;
  /// Points of the real line where |r| has a deep local minimum (candidate real
  /// zeros of b); quadratures over the real line split there.
  std::vector<double> real_dips(double lo, double hi) const;
  std::size_t cache_nodes() const;

  /// r(i kappa) for kappa > 0; past the top of the fit window the tail model is used.
  cplx reflection_imag(double kappa) const;

  /// Regression of the imaginary-axis tail; throws FitRejected unless the pulse
  /// has a power-law start (m > 1) and the fit is clean.
  TailFit fit() const;
  TailModel tail_model() const;

 private:
  struct Impl;
  Pulse pulse_;
  ScatteringOptions opt_;
  std::shared_ptr<Impl> impl_;
};

inline ABValue ab_coeffs(const ScatteringData& sd, cplx k) { return sd.ab(k); }
inline cplx reflection(const ScatteringData& sd, cplx k) { return sd.reflection(k); }
inline cplx b_deriv(const ScatteringData& sd, cplx k) { return sd.b_deriv(k); }
inline TailFit fit_tail(const ScatteringData& sd) { return sd.fit(); }

}  // namespace mbamp
