#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mbamp/lightcone_asym.hpp"
#include "mbamp/mb_oracle.hpp"
#include "mbamp/numerics.hpp"
#include "mbamp/pulse.hpp"

namespace mbamp {

inline constexpr int kSchemaVersion = 1;

struct PulseSpec {
  std::string kind = "smooth_bump";
  cplx c1{1.0, 0.0};
  double m = 2.0;
  double T = 1.0;

  /// InvalidPulse for unknown kinds and bad parameters.
  Pulse build() const;
};

/// Uniform lattice t0:t1:nt, x0:x1:nx (end points included).
struct GridSpec {
  double t0 = 1.0, t1 = 10.0;
  int nt = 10;
  double x0 = 1.0, x1 = 10.0;
  int nx = 10;

  static GridSpec parse(const std::string& text);
  std::string str() const;
  /// Points in row-major (t, x) order.
  std::vector<std::pair<double, double>> points() const;
  void validate() const;
};

/// Lattice of spectral points for `scatter`.
struct KGridSpec {
  double re0 = -5.0, re1 = 5.0;
  int nre = 101;
  double im0 = 0.0, im1 = 0.0;
  int nim = 1;

  std::vector<cplx> points() const;
  void validate() const;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  PulseSpec pulse;
  Tolerances tol;
  std::optional<Rect> search_box;
  BandParams bands;
  GridSpec grid;
  KGridSpec kgrid;
  SimSpec sim;
  double velocity_eps = 0.0;  // <= 0: half the smallest gap between velocities
  std::string out_dir = ".";

  /// InvalidConfig (or the module error) for any parameter outside its range.
  void validate() const;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);
  void save(const std::string& path) const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace mbamp
