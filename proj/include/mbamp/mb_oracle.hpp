#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mbamp/pulse.hpp"

namespace mbamp {

/// How (rho, N) is advanced over one retarded-time step at fixed x.
///  - Heun:     two-stage explicit step with the end-point fields.
///  - Rotation: exact rotation of the Bloch vector by the step-averaged field.
enum class BlochStepper { Heun, Rotation };

std::string to_string(BlochStepper s);
BlochStepper bloch_stepper_from_string(const std::string& name);

/// Grid of the characteristic march. Nodes sit at t = i h, x = j h; only nodes
/// with t <= t_max, x <= x_max and t - x <= tau_max are computed.
struct SimSpec {
  double h = 0.01;
  double t_max = 10.0;
  double x_max = 10.0;
  double tau_max = std::numeric_limits<double>::infinity();
  int stride = 1;             // keep every stride-th node in t and x
  bool store = true;          // false: only invariants and probes
  BlochStepper stepper = BlochStepper::Rotation;
  double max_steps = 1e4;     // bound on x_max / h and the marched tau-extent / h

  /// CFLViolation unless h <= 0.02 min(1, T) and the extents fit max_steps.
  void validate(const Pulse& p) const;
};

/// Maxima over every computed node, gathered while marching.
struct InvariantReport {
  double conservation = 0.0;  // max |N^2 + |rho|^2 - 1|
  double causality = 0.0;     // max of |E|, |rho|, |N - 1| over nodes with x >= t
  double boundary = 0.0;      // max |E(t, 0) - E_1(t)|
  std::uint64_t nodes = 0;
};

/// Stored nodes of one run; immutable once built.
class SimGrid {
 public:
  SimGrid() = default;
  SimGrid(double h, double t_max, double x_max, double tau_max, std::size_t nt, std::size_t nx);

  /// Spacing of the stored nodes (the march spacing times the stride).
  double h() const { return h_; }
  double t_max() const { return t_max_; }
  double x_max() const { return x_max_; }
  double tau_max() const { return tau_max_; }
  std::size_t nt() const { return nt_; }
  std::size_t nx() const { return nx_; }
  std::size_t node_count() const { return nt_ * nx_; }

  /// Node (i, j) at t = i h, x = j h. Nodes past tau_max hold NaN.
  const FieldTriple& at(std::size_t i, std::size_t j) const { return data_[i * nx_ + j]; }
  FieldTriple& at(std::size_t i, std::size_t j) { return data_[i * nx_ + j]; }
  bool computed(std::size_t i, std::size_t j) const;

  const InvariantReport& report() const { return report_; }
  void set_report(const InvariantReport& r) { report_ = r; }
  double march_h() const { return march_h_; }
  void set_march_h(double h) { march_h_ = h; }
  const std::vector<double>& breaks() const { return breaks_; }
  void set_breaks(std::vector<double> b) { breaks_ = std::move(b); }

 private:
  double h_ = 0.0, t_max_ = 0.0, x_max_ = 0.0, tau_max_ = 0.0, march_h_ = 0.0;
  std::size_t nt_ = 0, nx_ = 0;
  std::vector<FieldTriple> data_;
  std::vector<double> breaks_;  // retarded times where E may jump or kink
  InvariantReport report_;
};

SimGrid simulate(const Pulse& p, const SimSpec& spec);

struct ProbeRun {
  std::vector<FieldTriple> values;
  InvariantReport report;
};

/// March without storing the grid; each (t, x) is interpolated from a 4x4
/// stencil recorded on the way. Points with x >= t come back trivial.
ProbeRun simulate_probes(const Pulse& p, const SimSpec& spec, const std::vector<std::pair<double, double>>& tx);

/// Lagrange interpolation on the stored nodes in (t - x, x); exact at nodes.
/// OutOfDomain outside the computed part of the grid.
FieldTriple probe(const SimGrid& g, double t, double x);

/// Streamed maxima merged with a scan of the stored nodes.
InvariantReport check_invariants(const SimGrid& g);

/// Little-endian dump: magic, h, t_max, x_max, tau_max, nt, nx, node count, the
/// break times (count, values), then E_re, E_im, N, rho_re, rho_im per node,
/// row-major in (t, x).
void write_grid(const SimGrid& g, const std::string& path);
SimGrid read_grid(const std::string& path);

}  // namespace mbamp
