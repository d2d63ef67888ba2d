#pragma once

#include <string>

#include "mbamp/scattering.hpp"

namespace mbamp {

enum class Region { Causal, PartI, PartII, PartIII, PartIV, Tail, Unsupported };

std::string to_string(Region r);

/// Free constants of the near-light-cone bands and the tail aperture sigma.
/// K <= 0 means K = m + eps1.
struct BandParams {
  double eps1 = 0.25;
  double eps2 = 0.25;
  double K = 0.0;
  double C = 8.0;
  double sigma = 0.1;

  double K_for(double m) const { return K > 0 ? K : m + eps1; }
  void validate(double m) const;
};

struct RegionTag {
  Region region = Region::Unsupported;
  int n = -1;          // band index for PartIV
  double k0 = 0.0;     // 0 when t <= x
  double xi = 0.0;     // 2 sqrt(x (t - x))
  double beta = 0.0;   // (xi - m ln x) / ln ln x, NaN for x <= e
  double band_lo = 0;  // tau-range of the band that was matched (PartI..IV)
  double band_hi = 0;
};

/// Partition of the quadrant t, x > 0. Ties go to the higher-numbered part.
RegionTag classify(double t, double x, double m, const BandParams& bp = {});
/// Same with the retarded time tau = t - x given directly (no cancellation at large x).
RegionTag classify_retarded(double x, double tau, double m, const BandParams& bp = {});

/// Light-cone edge t(beta) = x + (m ln x + beta ln ln x)^2 / (4x); NaN if the base is not positive.
double band_edge(double x, double m, double beta);
/// The same edge as a retarded time t - x.
double band_edge_tau(double x, double m, double beta);

struct LightconeValue {
  FieldTriple field;
  double error_scale = 0.0;
};

struct LightconeDiagnostics {
  double k0 = 0.0;
  double xi = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  cplx r{0.0, 0.0};  // r(i k0)
};

/// All light-cone evaluators below take (x, tau) with tau = t - x > 0.
LightconeDiagnostics lightcone_point(double x, double tau, double m, const ScatteringData& sd);

/// Theta_n and chi_n(k0).
double theta_n(double x, double tau, int n, const ScatteringData& sd);
double chi_n(double k0, int n, const ScatteringData& sd);

/// Leading-order field of the part named by `tag`; WrongRegion for other tags and
/// AssumptionViolated for pulses with m <= 1.
LightconeValue eval_lightcone(const RegionTag& tag, double x, double tau, const ScatteringData& sd);

/// Individual formulas, usable outside their own band for consistency checks.
LightconeValue bessel_formula(double x, double tau, const ScatteringData& sd, bool part_two);
LightconeValue exponential_formula(double x, double tau, const ScatteringData& sd);
LightconeValue soliton_train_formula(double x, double tau, int n, const ScatteringData& sd);

/// Starting point for the peak search: asymptotic inverse of y - gamma ln y = z.
double inversion_seed(double z, double gamma);

struct PeakPrediction {
  double t = 0.0;
  double tau = 0.0;  // t - x, exact
  double seed_t = 0.0;
  double seed_tau = 0.0;
  double theta = 0.0;  // Theta_n at the returned t
  int iterations = 0;
};

/// Time of the n-th peak Theta_n(t, x) = 0 at fixed x; NoRoot if the band is empty.
PeakPrediction predict_peaks(double x, int n, const ScatteringData& sd);

}  // namespace mbamp
