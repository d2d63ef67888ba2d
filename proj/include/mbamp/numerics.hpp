#pragma once

// Shared numerical kernels: adaptive Gauss-Kronrod quadrature, argument-principle
// zero counting, complex Newton refinement and an embedded Runge-Kutta integrator.

#include <functional>
#include <vector>

#include "mbamp/types.hpp"

namespace mbamp {

struct Tolerances {
  double ode_rel = 1e-10;
  double ode_abs = 1e-12;
  double quad_tol = 1e-10;
  double root_tol = 1e-10;

  /// Throws DomainError unless every entry is positive and quad_tol >= 10 eps.
  void validate() const;

  /// All four tolerances multiplied by `factor` (used by --tol-scale).
  Tolerances scaled(double factor) const;
};

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cplx(cplx)>;

struct QuadOptions {
  int max_intervals = 4000;
  double min_width_rel = 1e-13;
};

/// Adaptive 7/15-point Gauss-Kronrod. Guarantees |result - I| <= tol (1 + |result|)
/// on the error estimate, else throws NonConvergence.
double adaptive_quad(const RealFn& f, double a, double b, double tol, const QuadOptions& opt = {});

/// Winding number of f around the boundary of `rect` (counter-clockwise), i.e. the
/// number of zeros inside counted with multiplicity. Throws BoundaryZero if |f|
/// drops below `root_tol` on a boundary sample.
int count_zeros_rect(const ComplexFn& f, const Rect& rect, double root_tol);

struct NewtonResult {
  cplx root;
  int iterations = 0;
  std::vector<double> residuals;  // |f| at each iterate, seed first
};

NewtonResult complex_newton_trace(const ComplexFn& f, const ComplexFn& df, cplx seed, double tol,
                                  int max_iter = 60);

/// Newton iteration until |f(result)| <= tol. Throws Diverged after max_iter.
cplx complex_newton(const ComplexFn& f, const ComplexFn& df, cplx seed, double tol, int max_iter = 60);

using OdeState = std::vector<cplx>;
using OdeRhs = std::function<void(double t, const OdeState& y, OdeState& dydt)>;

struct OdeStats {
  int accepted = 0;
  int rejected = 0;
};

/// Dormand-Prince 5(4) with PI step-size control from t0 to t1 (either direction).
/// Throws StepUnderflow if the controller asks for |h| < 1e-14 |t1 - t0|.
OdeState ode_advance(const OdeRhs& rhs, double t0, double t1, OdeState y0, double rel_tol,
                     double abs_tol, OdeStats* stats = nullptr);

inline OdeState ode_advance(const OdeRhs& rhs, double t0, double t1, OdeState y0, const Tolerances& tol,
                            OdeStats* stats = nullptr) {
  return ode_advance(rhs, t0, t1, std::move(y0), tol.ode_rel, tol.ode_abs, stats);
}

}  // namespace mbamp
