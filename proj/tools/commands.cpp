#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "mbamp/errors.hpp"
#include "mbamp/lightcone_asym.hpp"
#include "mbamp/mb_oracle.hpp"
#include "mbamp/scattering.hpp"
#include "mbamp/soliton_spectrum.hpp"
#include "mbamp/tail_asym.hpp"

namespace mbamp::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : os_(path) {
    if (!os_) fail(ErrorKind::InvalidConfig, "cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / name;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) f(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
}

Pulse nontrivial_pulse(const RunConfig& cfg, const std::string& command) {
  const Pulse p = cfg.pulse.build();
  if (p.is_trivial()) fail(ErrorKind::InvalidConfig, command + ": the pulse must be nontrivial");
  return p;
}

ScatteringData make_sd(const Pulse& p, const RunConfig& cfg) {
  ScatteringOptions so;
  so.tol = cfg.tol;
  return ScatteringData(p, so);
}

SolitonSpectrum spectrum_of(const ScatteringData& sd, const RunConfig& cfg) {
  return cfg.search_box ? find_zeros(sd, *cfg.search_box) : find_zeros(sd);
}

/// One evaluated asymptotic point.
struct AsymRow {
  RegionTag tag;
  FieldTriple field{{kNaN, kNaN}, kNaN, {kNaN, kNaN}};
  double error_scale = kNaN;
  std::optional<std::size_t> soliton;
  double w_abs = kNaN, w_arg = kNaN;
  std::string status = "ok";
  bool evaluated = false;
};

/// Shared state for evaluating the asymptotic formulas over a point set.
class Evaluator {
 public:
  Evaluator(const Pulse& p, const RunConfig& cfg) : p_(p), cfg_(cfg), sd_(make_sd(p, cfg)) {}

  double m() const { return std::max(1.0, p_.start_exponent()); }

  RegionTag classify_point(double t, double x) const { return classify(t, x, m(), cfg_.bands); }

  const SolitonSpectrum& spectrum() {
    std::call_once(spec_once_, [&] { spec_ = std::make_unique<SolitonSpectrum>(spectrum_of(sd_, cfg_)); });
    return *spec_;
  }

  AsymRow eval(double t, double x) {
    AsymRow r;
    r.tag = classify_point(t, x);
    try {
      switch (r.tag.region) {
        case Region::Causal:
          r.field = FieldTriple::trivial();
          r.error_scale = 0.0;
          r.evaluated = true;
          break;
        case Region::PartI:
        case Region::PartII:
        case Region::PartIII:
        case Region::PartIV: {
          const LightconeValue v = eval_lightcone(r.tag, x, t - x, sd_);
          r.field = v.field;
          r.error_scale = v.error_scale;
          r.evaluated = true;
          break;
        }
        case Region::Tail: {
          const TailValue v = eval_tail(sd_, spectrum(), t, x, cfg_.velocity_eps);
          r.field = v.field;
          r.error_scale = v.error_scale;
          r.soliton = v.soliton;
          if (v.soliton) {
            r.w_abs = v.w_abs;
            r.w_arg = v.w_arg;
          }
          r.evaluated = true;
          break;
        }
        case Region::Unsupported:
          r.status = "skipped";
          break;
      }
    } catch (const Error& e) {
      r.status = std::string(to_string(e.kind()));
    }
    return r;
  }

  const ScatteringData& sd() const { return sd_; }

 private:
  Pulse p_;
  const RunConfig& cfg_;
  ScatteringData sd_;
  std::once_flag spec_once_;
  std::unique_ptr<SolitonSpectrum> spec_;
};

std::vector<std::string> field_cells(const FieldTriple& f) {
  return {num(f.E.real()), num(f.E.imag()), num(f.N), num(f.rho.real()), num(f.rho.imag())};
}

// ---------------------------------------------------------------- scatter

void cmd_scatter(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const Pulse p = nontrivial_pulse(cfg, "scatter");
  const ScatteringData sd = make_sd(p, cfg);
  const auto ks = cfg.kgrid.points();
  struct Row {
    ABValue ab;
    cplx r{kNaN, kNaN};
    double defect = kNaN;
    std::string status = "ok";
  };
  std::vector<Row> rows(ks.size());
  parallel_for(ks.size(), opt.threads, [&](std::size_t i) {
    const cplx k = ks[i];
    try {
      rows[i].ab = sd.ab(k);
      if (k.imag() == 0.0) rows[i].defect = std::norm(rows[i].ab.a) + std::norm(rows[i].ab.b) - 1.0;
      if (std::abs(rows[i].ab.a) >= 1e-12) rows[i].r = rows[i].ab.b / rows[i].ab.a;
    } catch (const Error& e) {
      rows[i].ab = {{kNaN, kNaN}, {kNaN, kNaN}};
      rows[i].status = std::string(to_string(e.kind()));
    }
  });
  CsvWriter csv(out_path(cfg, "scatter.csv"),
                {"k_re", "k_im", "a_re", "a_im", "b_re", "b_im", "r_re", "r_im", "unitarity_defect"});
  std::size_t failed = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const Row& r = rows[i];
    failed += r.status != "ok";
    csv.row({num(ks[i].real()), num(ks[i].imag()), num(r.ab.a.real()), num(r.ab.a.imag()), num(r.ab.b.real()),
             num(r.ab.b.imag()), num(r.r.real()), num(r.r.imag()), num(r.defect)});
  }
  log << "scatter: " << ks.size() << " points, " << failed << " failed\n";
}

// ---------------------------------------------------------------- zeros

void cmd_zeros(const RunConfig& cfg, const CommandOptions&, std::ostream& log) {
  const Pulse p = nontrivial_pulse(cfg, "zeros");
  const ScatteringData sd = make_sd(p, cfg);
  const SolitonSpectrum spec = spectrum_of(sd, cfg);
  CsvWriter csv(out_path(cfg, "zeros.csv"), {"j", "kj_re", "kj_im", "gamma_re", "gamma_im", "velocity"});
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const SolitonZero& z = spec.zeros[j];
    csv.row({std::to_string(j + 1), num(z.k.real()), num(z.k.imag()), num(z.gamma.real()), num(z.gamma.imag()),
             num(z.velocity)});
  }
  nlohmann::json meta = {{"pulse", p.describe()},
                         {"count", spec.size()},
                         {"search_box",
                          {{"re_min", spec.box.re_min}, {"re_max", spec.box.re_max}, {"im_min", spec.box.im_min},
                           {"im_max", spec.box.im_max}}}};
  std::ofstream(out_path(cfg, "zeros_meta.json")) << meta.dump(2) << '\n';
  log << "zeros: " << spec.size() << " in [" << spec.box.re_min << ", " << spec.box.re_max << "] x [" << spec.box.im_min
      << ", " << spec.box.im_max << "]\n";
}

// ---------------------------------------------------------------- regions

void cmd_regions(const RunConfig& cfg, const CommandOptions&, std::ostream& log) {
  const Pulse p = nontrivial_pulse(cfg, "regions");
  const double m = std::max(1.0, p.start_exponent());
  CsvWriter csv(out_path(cfg, "regions.csv"), {"t", "x", "region", "n", "k0", "xi", "beta"});
  std::size_t counts[7] = {};
  for (const auto& [t, x] : cfg.grid.points()) {
    const RegionTag tag = classify(t, x, m, cfg.bands);
    ++counts[static_cast<int>(tag.region)];
    csv.row({num(t), num(x), to_string(tag.region), tag.region == Region::PartIV ? std::to_string(tag.n) : "",
             num(tag.region == Region::Causal ? kNaN : tag.k0), num(tag.region == Region::Causal ? kNaN : tag.xi),
             num(tag.beta)});
  }
  log << "regions:";
  for (int r = 0; r < 7; ++r) log << ' ' << to_string(static_cast<Region>(r)) << '=' << counts[r];
  log << '\n';
}

// ---------------------------------------------------------------- asym

void cmd_asym(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const Pulse p = nontrivial_pulse(cfg, "asym");
  Evaluator ev(p, cfg);
  const auto pts = cfg.grid.points();
  std::vector<AsymRow> rows(pts.size());
  parallel_for(pts.size(), opt.threads, [&](std::size_t i) { rows[i] = ev.eval(pts[i].first, pts[i].second); });
  CsvWriter csv(out_path(cfg, "asym.csv"), {"t", "x", "region", "n", "E_re", "E_im", "N", "rho_re", "rho_im",
                                            "error_scale", "soliton_j", "w_abs", "w_arg", "status"});
  std::size_t failed = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const AsymRow& r = rows[i];
    failed += r.status != "ok" && r.status != "skipped";
    std::vector<std::string> cells{num(pts[i].first), num(pts[i].second), to_string(r.tag.region),
                                   r.tag.region == Region::PartIV ? std::to_string(r.tag.n) : ""};
    for (auto& c : field_cells(r.field)) cells.push_back(c);
    cells.push_back(num(r.error_scale));
    cells.push_back(r.soliton ? std::to_string(*r.soliton + 1) : "");
    cells.push_back(num(r.w_abs));
    cells.push_back(num(r.w_arg));
    cells.push_back(r.status);
    csv.row(cells);
  }
  log << "asym: " << pts.size() << " points, " << failed << " failed\n";
}

// ---------------------------------------------------------------- simulate

void write_slice(const SimGrid& g, const CommandOptions& opt, const RunConfig& cfg, std::ostream& log) {
  if (!opt.slice_x && !opt.slice_t) return;
  CsvWriter csv(out_path(cfg, "slice.csv"), {"t", "x", "E_re", "E_im", "N", "rho_re", "rho_im"});
  std::size_t rows = 0;
  if (opt.slice_x) {
    const double x = *opt.slice_x;
    for (std::size_t i = 0; i < g.nt(); ++i) {
      const double t = static_cast<double>(i) * g.h();
      if (t - x > g.tau_max()) break;
      std::vector<std::string> cells{num(t), num(x)};
      for (auto& c : field_cells(probe(g, t, x))) cells.push_back(c);
      csv.row(cells);
      ++rows;
    }
  }
  if (opt.slice_t) {
    const double t = *opt.slice_t;
    for (std::size_t j = 0; j < g.nx(); ++j) {
      const double x = static_cast<double>(j) * g.h();
      if (t - x > g.tau_max()) continue;
      std::vector<std::string> cells{num(t), num(x)};
      for (auto& c : field_cells(probe(g, t, x))) cells.push_back(c);
      csv.row(cells);
      ++rows;
    }
  }
  log << "slice: " << rows << " rows\n";
}

void cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  if (opt.grid_file) {
    const SimGrid g = read_grid(*opt.grid_file);
    write_slice(g, opt, cfg, log);
    return;
  }
  const Pulse p = nontrivial_pulse(cfg, "simulate");
  const SimGrid g = simulate(p, cfg.sim);
  write_grid(g, out_path(cfg, "grid.bin").string());
  const InvariantReport rep = check_invariants(g);
  nlohmann::json inv = {{"h", cfg.sim.h},
                        {"stepper", to_string(cfg.sim.stepper)},
                        {"stored_nodes", g.node_count()},
                        {"marched_nodes", rep.nodes},
                        {"conservation_defect", rep.conservation},
                        {"causality_defect", rep.causality},
                        {"boundary_error", rep.boundary}};
  std::ofstream(out_path(cfg, "invariants.json")) << inv.dump(2) << '\n';
  log << "simulate: " << rep.nodes << " nodes, conservation " << rep.conservation << ", causality " << rep.causality
      << '\n';
  write_slice(g, opt, cfg, log);
}

// ---------------------------------------------------------------- compare

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Least-squares slope of ln y against ln x over points with y > 0.
double log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0 && xs[i] > 0)) continue;
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double den = static_cast<double>(n) * sxx - sx * sx;
  if (n < 2 || std::fabs(den) < 1e-12) return kNaN;
  return (static_cast<double>(n) * sxy - sx * sy) / den;
}

void cmd_compare(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const Pulse p = nontrivial_pulse(cfg, "compare");
  Evaluator ev(p, cfg);
  const auto pts = cfg.grid.points();
  std::vector<AsymRow> rows(pts.size());
  parallel_for(pts.size(), opt.threads, [&](std::size_t i) { rows[i] = ev.eval(pts[i].first, pts[i].second); });

  std::vector<std::pair<double, double>> probes;
  std::vector<std::size_t> probe_row;
  double t_max = 0, x_max = 0, tau_max = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!rows[i].evaluated || rows[i].tag.region == Region::Causal) continue;
    probes.push_back(pts[i]);
    probe_row.push_back(i);
    t_max = std::max(t_max, pts[i].first);
    x_max = std::max(x_max, pts[i].second);
    tau_max = std::max(tau_max, pts[i].first - pts[i].second);
  }
  std::vector<FieldTriple> oracle(pts.size(), FieldTriple::trivial());
  if (!probes.empty()) {
    SimSpec s = cfg.sim;
    s.store = false;
    const double pad = 4 * s.h;
    s.t_max = t_max + pad;
    s.x_max = x_max + pad;
    s.tau_max = std::min(tau_max + pad, s.t_max);
    const ProbeRun run = simulate_probes(p, s, probes);
    for (std::size_t k = 0; k < probes.size(); ++k) oracle[probe_row[k]] = run.values[k];
    log << "compare: oracle on " << run.report.nodes << " nodes, conservation " << run.report.conservation << '\n';
  }

  CsvWriter csv(out_path(cfg, "compare.csv"),
                {"t", "x", "region", "n", "E_asym_re", "E_asym_im", "E_oracle_re", "E_oracle_im", "N_asym", "N_oracle",
                 "rel_dev", "error_scale", "status"});
  struct Stat {
    std::vector<double> dev, var;
  };
  std::vector<Stat> stats(7);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const AsymRow& r = rows[i];
    const auto [t, x] = pts[i];
    double dev = kNaN;
    const FieldTriple o = r.evaluated ? oracle[i] : FieldTriple{{kNaN, kNaN}, kNaN, {kNaN, kNaN}};
    if (r.evaluated) {
      const double scale = std::abs(r.field.E);
      dev = r.tag.region == Region::Causal ? std::abs(o.E - r.field.E)
                                           : std::abs(o.E - r.field.E) / std::max(scale, 1e-300);
      Stat& st = stats[static_cast<int>(r.tag.region)];
      st.dev.push_back(dev);
      st.var.push_back(r.tag.region == Region::Tail ? t - x : r.tag.k0);
    }
    csv.row({num(t), num(x), to_string(r.tag.region), r.tag.region == Region::PartIV ? std::to_string(r.tag.n) : "",
             num(r.field.E.real()), num(r.field.E.imag()), num(o.E.real()), num(o.E.imag()), num(r.field.N), num(o.N),
             num(dev), num(r.error_scale), r.status});
  }
  CsvWriter sum(out_path(cfg, "compare_summary.csv"),
                {"region", "count", "max_rel_dev", "median_rel_dev", "decay_exponent", "decay_variable"});
  for (int reg = 0; reg < 7; ++reg) {
    const Stat& st = stats[reg];
    if (st.dev.empty()) continue;
    const Region R = static_cast<Region>(reg);
    const bool causal = R == Region::Causal;
    sum.row({to_string(R), std::to_string(st.dev.size()), num(*std::max_element(st.dev.begin(), st.dev.end())),
             num(median(st.dev)), num(causal ? kNaN : log_slope(st.var, st.dev)),
             causal ? "" : (R == Region::Tail ? "tau" : "k0")});
  }
  log << "compare: " << pts.size() << " points, " << probes.size() << " probed\n";
}

}  // namespace

unsigned threads_from_env() {
  if (const char* s = std::getenv("MBAMP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    fail(ErrorKind::InvalidConfig, std::string("MBAMP_THREADS must be an integer in [1, 1024], got '") + s + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidPulse:
    case ErrorKind::CFLViolation:
    case ErrorKind::OutOfDomain:
      return kExitUsage;
    default:
      return kExitNumeric;
  }
}

void run(const std::string& command, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  if (command == "scatter") return cmd_scatter(cfg, opt, log);
  if (command == "zeros") return cmd_zeros(cfg, opt, log);
  if (command == "regions") return cmd_regions(cfg, opt, log);
  if (command == "asym") return cmd_asym(cfg, opt, log);
  if (command == "simulate") return cmd_simulate(cfg, opt, log);
  if (command == "compare") return cmd_compare(cfg, opt, log);
  fail(ErrorKind::InvalidConfig, "unknown command '" + command + "'");
}

}  // namespace mbamp::cli
