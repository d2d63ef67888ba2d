#pragma once

#include <complex>
#include <numbers>

namespace mbamp {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Field envelope, population inversion and polarization at one space-time point.
struct FieldTriple {
  cplx E{0.0, 0.0};
  double N = 1.0;
  cplx rho{0.0, 0.0};

  /// Deviation from the Bloch sphere, N^2 + |rho|^2 - 1.
  double bloch_defect() const { return N * N + std::norm(rho) - 1.0; }

  static FieldTriple trivial() { return {}; }
};

/// Axis-aligned rectangle in the complex k-plane.
struct Rect {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(cplx k) const {
    return k.real() >= re_min && k.real() <= re_max && k.imag() >= im_min && k.imag() <= im_max;
  }
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
};

}  // namespace mbamp
