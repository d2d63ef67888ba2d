#include "mbamp/mb_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mbamp/errors.hpp"

namespace mbamp {

std::string to_string(BlochStepper s) { return s == BlochStepper::Heun ? "heun" : "rotation"; }

BlochStepper bloch_stepper_from_string(const std::string& name) {
  if (name == "heun") return BlochStepper::Heun;
  if (name == "rotation") return BlochStepper::Rotation;
  fail(ErrorKind::InvalidConfig, "unknown Bloch stepper '" + name + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t steps_of(double extent, double h) { return static_cast<std::size_t>(std::floor(extent / h + 1e-9)); }

bool finite_tau(const SimSpec& s) { return std::isfinite(s.tau_max) && s.tau_max < s.t_max; }

}  // namespace

void SimSpec::validate(const Pulse& p) const {
  std::ostringstream os;
  if (!(h > 0) || !std::isfinite(h)) {
    os << "grid spacing must be positive, got " << h;
  } else if (h > 0.02 * std::min(1.0, p.support_end()) * (1 + 1e-12)) {
    os << "h = " << h << " exceeds 0.02 min(1, T) = " << 0.02 * std::min(1.0, p.support_end());
  } else if (!(t_max > 0 && x_max > 0) || !std::isfinite(t_max) || !std::isfinite(x_max)) {
    os << "extents must be positive and finite";
  } else if (!(tau_max > 0)) {
    os << "tau_max must be positive";
  } else if (stride < 1) {
    os << "stride must be at least 1";
  } else if (x_max / h > max_steps * (1 + 1e-12)) {
    os << "x_max / h = " << x_max / h << " exceeds " << max_steps;
  } else if (std::min(t_max, tau_max) / h > max_steps * (1 + 1e-12)) {
    os << "marched tau extent / h = " << std::min(t_max, tau_max) / h << " exceeds " << max_steps;
  } else {
    for (double c : p.jump_times()) {
      const double q = c / h;
      if (std::fabs(q - std::round(q)) > 1e-9 * std::max(1.0, q)) {
        os << "jump of the input at t = " << c << " is not on the grid of spacing " << h;
        break;
      }
    }
  }
  if (!os.str().empty()) fail(ErrorKind::CFLViolation, os.str());
}

SimGrid::SimGrid(double h, double t_max, double x_max, double tau_max, std::size_t nt, std::size_t nx)
    : h_(h), t_max_(t_max), x_max_(x_max), tau_max_(tau_max), nt_(nt), nx_(nx), data_(nt * nx) {}

bool SimGrid::computed(std::size_t i, std::size_t j) const { return !std::isnan(at(i, j).N); }

namespace {

struct Bloch {
  cplx rho;
  double N;
};

inline Bloch heun(const Bloch& s, cplx ea, cplx eb, double d) {
  const cplx k1r = s.N * ea;
  const double k1n = -std::real(std::conj(ea) * s.rho);
  const cplx r1 = s.rho + d * k1r;
  const double n1 = s.N + d * k1n;
  const cplx k2r = n1 * eb;
  const double k2n = -std::real(std::conj(eb) * r1);
  return {s.rho + 0.5 * d * (k1r + k2r), s.N + 0.5 * d * (k1n + k2n)};
}

// rotation of (Re rho, Im rho, N) about (-Im E, Re E, 0) by |E| d
inline Bloch rotate(const Bloch& s, cplx ea, cplx eb, double d) {
  const cplx e = 0.5 * (ea + eb);
  const double mag = std::abs(e);
  if (mag == 0.0) return s;
  const double nx = -e.imag() / mag, ny = e.real() / mag;
  const double vx = s.rho.real(), vy = s.rho.imag(), vz = s.N;
  const double th = mag * d, c = std::cos(th), sn = std::sin(th);
  const double dot = nx * vx + ny * vy;
  // n x v with n_z = 0
  const double cx = ny * vz, cy = -nx * vz, cz = nx * vy - ny * vx;
  return {cplx(vx * c + cx * sn + nx * dot * (1 - c), vy * c + cy * sn + ny * dot * (1 - c)), vz * c + cz * sn};
}

struct ProbeRequest {
  std::size_t probe;
  int slot;    // column slot 0..3
  long q0;     // first q recorded
  int count;   // nodes recorded
};

/// Choose up to four consecutive nodes in [lo, hi] around u without crossing a break.
/// Nodes hold the limit from below at a break, so they belong to the segment under it.
bool pick_nodes(double u, long lo, long hi, const std::vector<double>& breaks, long& q0, int& count) {
  for (double b : breaks) {
    const bool on_node = std::fabs(b - std::round(b)) < 1e-9;
    if (b < u) {
      lo = std::max(lo, on_node ? static_cast<long>(std::llround(b)) + 1 : static_cast<long>(std::ceil(b)));
    } else {
      hi = std::min(hi, static_cast<long>(std::floor(b + 1e-9)));
    }
  }
  if (lo > hi) return false;
  count = static_cast<int>(std::min<long>(4, hi - lo + 1));
  q0 = std::clamp(static_cast<long>(std::floor(u)) - 1, lo, hi - count + 1);
  return true;
}

void lagrange(double u, long q0, int count, double* w) {
  for (int a = 0; a < count; ++a) {
    double v = 1.0;
    for (int b = 0; b < count; ++b) {
      if (b != a) v *= (u - static_cast<double>(q0 + b)) / static_cast<double>(a - b);
    }
    w[a] = v;
  }
}

FieldTriple combine(const FieldTriple* f, const double* w, int n) {
  FieldTriple out{{0, 0}, 0.0, {0, 0}};
  for (int a = 0; a < n; ++a) {
    out.E += w[a] * f[a].E;
    out.N += w[a] * f[a].N;
    out.rho += w[a] * f[a].rho;
  }
  return out;
}

class March {
 public:
  March(const Pulse& p, const SimSpec& s) : p_(p), s_(s) {
    s.validate(p);
    h_ = s.h;
    nt_ = steps_of(s.t_max, h_);
    nx_ = steps_of(s.x_max, h_);
    strip_ = finite_tau(s);
    Q_ = strip_ ? static_cast<long>(steps_of(s.tau_max, h_)) : static_cast<long>(nt_);
    qneg_ = strip_ ? -1 : -static_cast<long>(nx_);
    qmin_ = std::max(-static_cast<long>(nx_), qneg_);
    len_ = static_cast<std::size_t>(Q_ - qmin_ + 1);
    jump_.assign(len_, cplx{});
    for (double c : p.jump_times()) {
      const long q = std::lround(c / h_);
      if (q >= qmin_ && q <= Q_) jump_[idx(q)] = p.right_limit(c) - p.left_limit(c);
    }
    breaks_.push_back(0.0);
    for (double c : p.jump_times()) {
      if (c > 0) breaks_.push_back(c);
    }
  }

  long qlo(std::size_t j) const { return std::max(-static_cast<long>(j), qneg_); }
  long qhi(std::size_t j) const { return std::min(Q_, static_cast<long>(nt_) - static_cast<long>(j)); }
  std::size_t nt() const { return nt_; }
  std::size_t nx() const { return nx_; }
  long Q() const { return Q_; }
  double h() const { return h_; }
  bool strip() const { return strip_; }
  const std::vector<double>& breaks() const { return breaks_; }

  /// Runs the march; `column(j, E, rho, N)` sees each finished column with q offset qmin.
  template <class F>
  InvariantReport run(F&& column) {
    InvariantReport rep;
    std::vector<cplx> Eo(len_), ro(len_), En(len_), rn(len_);
    std::vector<double> No(len_, 1.0), Nn(len_, 1.0);
    // x = 0
    for (long q = 0; q <= qhi(0); ++q) {
      const double t = static_cast<double>(q) * h_;
      Eo[idx(q)] = q == 0 ? cplx{} : p_.left_limit(t);
      if (q == 0) {
        ro[idx(q)] = 0.0;
        No[idx(q)] = 1.0;
      } else {
        const Bloch b = step({ro[idx(q - 1)], No[idx(q - 1)]}, Eo[idx(q - 1)] + jump_[idx(q - 1)], Eo[idx(q)]);
        ro[idx(q)] = b.rho;
        No[idx(q)] = b.N;
      }
      const cplx ref = p_.left_limit(t);
      if (q > 0) rep.boundary = std::max(rep.boundary, std::abs(Eo[idx(q)] - ref));
      tally(rep, q, Eo[idx(q)], ro[idx(q)], No[idx(q)]);
    }
    column(std::size_t{0}, Eo, ro, No);
    const double hh = 0.5 * h_;
    for (std::size_t j = 0; j < nx_; ++j) {
      const std::size_t jn = j + 1;
      const long lo = qlo(jn), hi = qhi(jn);
      if (hi < lo) break;
      En[idx(lo)] = 0.0;
      rn[idx(lo)] = 0.0;
      Nn[idx(lo)] = 1.0;
      tally(rep, lo, En[idx(lo)], rn[idx(lo)], Nn[idx(lo)]);
      for (long q = lo + 1; q <= hi; ++q) {
        const std::size_t k = idx(q), km = k - 1;
        const Bloch prev{rn[km], Nn[km]};
        const cplx ea = En[km] + jump_[km];
        const cplx e_old = Eo[k], r_old = ro[k];
        const cplx ep = e_old + h_ * r_old;
        Bloch b = step(prev, ea, ep);
        const cplx ec = e_old + hh * (r_old + b.rho);
        b = step(prev, ea, ec);
        En[k] = e_old + hh * (r_old + b.rho);
        rn[k] = b.rho;
        Nn[k] = b.N;
        tally(rep, q, En[k], rn[k], Nn[k]);
      }
      column(jn, En, rn, Nn);
      std::swap(Eo, En);
      std::swap(ro, rn);
      std::swap(No, Nn);
    }
    if (!(rep.conservation <= 1e-4)) {
      std::ostringstream os;
      os << "Bloch-sphere defect reached " << rep.conservation;
      fail(ErrorKind::NonPhysical, os.str());
    }
    return rep;
  }

  std::size_t idx(long q) const { return static_cast<std::size_t>(q - qmin_); }

 private:
  Bloch step(const Bloch& s, cplx ea, cplx eb) const {
    return s_.stepper == BlochStepper::Heun ? heun(s, ea, eb, h_) : rotate(s, ea, eb, h_);
  }

  static void tally(InvariantReport& rep, long q, cplx E, cplx rho, double N) {
    ++rep.nodes;
    const double d = std::fabs(N * N + std::norm(rho) - 1.0);
    if (!(d <= rep.conservation)) rep.conservation = std::isnan(d) ? d : std::max(rep.conservation, d);
    if (q <= 0) rep.causality = std::max({rep.causality, std::abs(E), std::abs(rho), std::fabs(N - 1.0)});
  }

  const Pulse& p_;
  SimSpec s_;
  double h_ = 0;
  std::size_t nt_ = 0, nx_ = 0, len_ = 0;
  long Q_ = 0, qneg_ = 0, qmin_ = 0;
  bool strip_ = false;
  std::vector<cplx> jump_;
  std::vector<double> breaks_;
};

FieldTriple nan_triple() { return {{kNaN, kNaN}, kNaN, {kNaN, kNaN}}; }

}  // namespace

SimGrid simulate(const Pulse& p, const SimSpec& spec) {
  March m(p, spec);
  const std::size_t s = static_cast<std::size_t>(spec.stride);
  const std::size_t nts = spec.store ? m.nt() / s + 1 : 0, nxs = spec.store ? m.nx() / s + 1 : 0;
  const double tau_max = m.strip() ? static_cast<double>(m.Q()) * m.h() : std::numeric_limits<double>::infinity();
  SimGrid g(m.h() * static_cast<double>(s), static_cast<double>(m.nt()) * m.h(), static_cast<double>(m.nx()) * m.h(),
            tau_max, nts, nxs);
  g.set_march_h(m.h());
  std::vector<double> br;
  for (double b : m.breaks()) br.push_back(b);
  g.set_breaks(br);
  const InvariantReport rep = m.run([&](std::size_t j, const std::vector<cplx>& E, const std::vector<cplx>& r,
                                        const std::vector<double>& N) {
    if (!spec.store || j % s != 0) return;
    const std::size_t js = j / s;
    for (std::size_t is = 0; is < nts; ++is) {
      const long q = static_cast<long>(is * s) - static_cast<long>(j);
      FieldTriple& f = g.at(is, js);
      if (q < m.qlo(j)) {
        f = FieldTriple::trivial();
      } else if (q > m.qhi(j)) {
        f = nan_triple();
      } else {
        const std::size_t k = m.idx(q);
        f = {E[k], N[k], r[k]};
      }
    }
  });
  g.set_report(rep);
  return g;
}

ProbeRun simulate_probes(const Pulse& p, const SimSpec& spec, const std::vector<std::pair<double, double>>& tx) {
  March m(p, spec);
  const double h = m.h();
  const long nx = static_cast<long>(m.nx());
  struct Plan {
    bool trivial = false;
    long j0 = 0;
    int ncol = 0;
    double u = 0, w = 0;
    long q0[4]{};
    int cnt[4]{};
    FieldTriple vals[4][4];
  };
  std::vector<Plan> plans(tx.size());
  std::vector<std::vector<ProbeRequest>> by_col(static_cast<std::size_t>(nx + 1));
  std::vector<double> br;
  for (double b : m.breaks()) br.push_back(b / h);
  for (std::size_t k = 0; k < tx.size(); ++k) {
    const auto [t, x] = tx[k];
    Plan& pl = plans[k];
    const double tol = 1e-9 * std::max(1.0, t);
    if (!(t >= -tol && x >= -tol && t <= static_cast<double>(m.nt()) * h + tol && x <= static_cast<double>(nx) * h + tol)) {
      std::ostringstream os;
      os << "probe (" << t << ", " << x << ") lies outside the grid";
      fail(ErrorKind::OutOfDomain, os.str());
    }
    if (x >= t) {
      pl.trivial = true;
      continue;
    }
    pl.u = (t - x) / h;
    pl.w = x / h;
    if (pl.u > static_cast<double>(m.Q()) + 1e-9) fail(ErrorKind::OutOfDomain, "probe lies past tau_max");
    pl.ncol = static_cast<int>(std::min<long>(4, nx + 1));
    pl.j0 = std::clamp(static_cast<long>(std::floor(pl.w)) - 1, 0L, nx + 1 - pl.ncol);
    for (int c = 0; c < pl.ncol; ++c) {
      const long j = pl.j0 + c;
      long q0 = 0;
      int cnt = 0;
      if (!pick_nodes(pl.u, m.qlo(static_cast<std::size_t>(j)), m.qhi(static_cast<std::size_t>(j)), br, q0, cnt))
        fail(ErrorKind::OutOfDomain, "no nodes around the probe");
      pl.q0[c] = q0;
      pl.cnt[c] = cnt;
      by_col[static_cast<std::size_t>(j)].push_back({k, c, q0, cnt});
    }
  }
  ProbeRun out;
  out.report = m.run([&](std::size_t j, const std::vector<cplx>& E, const std::vector<cplx>& r,
                         const std::vector<double>& N) {
    for (const ProbeRequest& rq : by_col[j]) {
      for (int a = 0; a < rq.count; ++a) {
        const std::size_t k = m.idx(rq.q0 + a);
        plans[rq.probe].vals[rq.slot][a] = {E[k], N[k], r[k]};
      }
    }
  });
  out.values.resize(tx.size());
  for (std::size_t k = 0; k < tx.size(); ++k) {
    const Plan& pl = plans[k];
    if (pl.trivial) {
      out.values[k] = FieldTriple::trivial();
      continue;
    }
    FieldTriple cols[4];
    double w[4];
    for (int c = 0; c < pl.ncol; ++c) {
      lagrange(pl.u, pl.q0[c], pl.cnt[c], w);
      cols[c] = combine(pl.vals[c], w, pl.cnt[c]);
    }
    lagrange(pl.w, pl.j0, pl.ncol, w);
    out.values[k] = combine(cols, w, pl.ncol);
  }
  return out;
}

FieldTriple probe(const SimGrid& g, double t, double x) {
  const double h = g.h();
  const double tol = 1e-9 * std::max(1.0, t);
  if (g.node_count() == 0 || !(t >= -tol && x >= -tol && t <= g.t_max() + tol && x <= g.x_max() + tol) ||
      t - x > g.tau_max() + tol) {
    std::ostringstream os;
    os << "probe (" << t << ", " << x << ") lies outside the grid";
    fail(ErrorKind::OutOfDomain, os.str());
  }
  if (x >= t) return FieldTriple::trivial();
  const long nx = static_cast<long>(g.nx()) - 1, nt = static_cast<long>(g.nt()) - 1;
  const double u = (t - x) / h, wv = x / h;
  const int ncol = static_cast<int>(std::min<long>(4, nx + 1));
  const long j0 = std::clamp(static_cast<long>(std::floor(wv)) - 1, 0L, nx + 1 - ncol);
  std::vector<double> br;
  for (double b : g.breaks()) br.push_back(b / h);
  const long qtop = std::isfinite(g.tau_max()) ? static_cast<long>(std::floor(g.tau_max() / h + 1e-9)) : nt;
  FieldTriple cols[4];
  double w[4];
  for (int c = 0; c < ncol; ++c) {
    const long j = j0 + c;
    long q0 = 0;
    int cnt = 0;
    if (!pick_nodes(u, -j, std::min(qtop, nt - j), br, q0, cnt)) fail(ErrorKind::OutOfDomain, "no nodes around the probe");
    FieldTriple f[4];
    for (int a = 0; a < cnt; ++a) f[a] = g.at(static_cast<std::size_t>(q0 + a + j), static_cast<std::size_t>(j));
    lagrange(u, q0, cnt, w);
    cols[c] = combine(f, w, cnt);
  }
  lagrange(wv, j0, ncol, w);
  return combine(cols, w, ncol);
}

InvariantReport check_invariants(const SimGrid& g) {
  InvariantReport rep = g.report();
  for (std::size_t i = 0; i < g.nt(); ++i) {
    for (std::size_t j = 0; j < g.nx(); ++j) {
      if (!g.computed(i, j)) continue;
      const FieldTriple& f = g.at(i, j);
      rep.conservation = std::max(rep.conservation, std::fabs(f.bloch_defect()));
      if (j >= i) rep.causality = std::max({rep.causality, std::abs(f.E), std::abs(f.rho), std::fabs(f.N - 1.0)});
    }
  }
  return rep;
}

namespace {

constexpr char kMagic[8] = {'M', 'B', 'G', 'R', 'I', 'D', '1', '\0'};

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "grid files are little-endian");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) fail(ErrorKind::InvalidConfig, "truncated grid file");
  return v;
}

}  // namespace

void write_grid(const SimGrid& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::InvalidConfig, "cannot open " + path + " for writing");
  os.write(kMagic, sizeof kMagic);
  put(os, g.h());
  put(os, g.t_max());
  put(os, g.x_max());
  put(os, g.tau_max());
  put<std::uint64_t>(os, g.nt());
  put<std::uint64_t>(os, g.nx());
  put<std::uint64_t>(os, g.node_count());
  put<std::uint64_t>(os, g.breaks().size());
  for (double b : g.breaks()) put(os, b);
  for (std::size_t i = 0; i < g.nt(); ++i) {
    for (std::size_t j = 0; j < g.nx(); ++j) {
      const FieldTriple& f = g.at(i, j);
      put(os, f.E.real());
      put(os, f.E.imag());
      put(os, f.N);
      put(os, f.rho.real());
      put(os, f.rho.imag());
    }
  }
  if (!os) fail(ErrorKind::InvalidConfig, "write to " + path + " failed");
}

SimGrid read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::InvalidConfig, "cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) fail(ErrorKind::InvalidConfig, path + " is not a grid file");
  const double h = get<double>(is), t_max = get<double>(is), x_max = get<double>(is), tau_max = get<double>(is);
  const auto nt = get<std::uint64_t>(is), nx = get<std::uint64_t>(is), n = get<std::uint64_t>(is);
  if (n != nt * nx) fail(ErrorKind::InvalidConfig, "grid header is inconsistent");
  const auto nb = get<std::uint64_t>(is);
  if (nb > 1024) fail(ErrorKind::InvalidConfig, "grid header is inconsistent");
  std::vector<double> br(nb);
  for (double& b : br) b = get<double>(is);
  SimGrid g(h, t_max, x_max, tau_max, nt, nx);
  g.set_march_h(h);
  g.set_breaks(std::move(br));
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      FieldTriple& f = g.at(i, j);
      const double er = get<double>(is), ei = get<double>(is);
      f.N = get<double>(is);
      const double rr = get<double>(is), ri = get<double>(is);
      f.E = {er, ei};
      f.rho = {rr, ri};
    }
  }
  return g;
}

}  // namespace mbamp
