#include "mbamp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "mbamp/errors.hpp"

namespace mbamp {

using nlohmann::json;

Pulse PulseSpec::build() const {
  const PulseKind k = pulse_kind_from_string(kind);
  switch (k) {
    case PulseKind::Zero: return Pulse::zero(T);
    case PulseKind::Box: return Pulse::box(c1, T);
    case PulseKind::SmoothBump: return Pulse::smooth_bump(c1, m, T);
    case PulseKind::PowerStart: return Pulse::power_start(c1, m, T);
  }
  fail(ErrorKind::InvalidPulse, "unknown pulse kind");
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) fail(ErrorKind::InvalidConfig, "cannot read " + what + " from '" + s + "'");
  return v;
}

int parse_count(const std::string& s, const std::string& what) {
  const double v = parse_number(s, what);
  if (v != std::floor(v) || v < 1 || v > 1e7) fail(ErrorKind::InvalidConfig, what + " must be a positive integer");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> lattice(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_or_inf(const json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) fail(ErrorKind::InvalidConfig, "grid must look like t0:t1:nt,x0:x1:nx");
  GridSpec g;
  const auto t = split(parts[0], ':'), x = split(parts[1], ':');
  if (t.size() != 3 || x.size() != 3) fail(ErrorKind::InvalidConfig, "grid must look like t0:t1:nt,x0:x1:nx");
  g.t0 = parse_number(t[0], "t0");
  g.t1 = parse_number(t[1], "t1");
  g.nt = parse_count(t[2], "nt");
  g.x0 = parse_number(x[0], "x0");
  g.x1 = parse_number(x[1], "x1");
  g.nx = parse_count(x[2], "nx");
  g.validate();
  return g;
}

std::string GridSpec::str() const {
  std::ostringstream os;
  os.precision(17);
  os << t0 << ':' << t1 << ':' << nt << ',' << x0 << ':' << x1 << ':' << nx;
  return os.str();
}

std::vector<std::pair<double, double>> GridSpec::points() const {
  std::vector<std::pair<double, double>> out;
  for (double t : lattice(t0, t1, nt)) {
    for (double x : lattice(x0, x1, nx)) out.emplace_back(t, x);
  }
  return out;
}

void GridSpec::validate() const {
  if (!(std::isfinite(t0) && std::isfinite(t1) && std::isfinite(x0) && std::isfinite(x1)))
    fail(ErrorKind::InvalidConfig, "grid bounds must be finite");
  if (!(t0 > 0 && x0 > 0 && t1 >= t0 && x1 >= x0)) fail(ErrorKind::InvalidConfig, "grid needs 0 < t0 <= t1 and 0 < x0 <= x1");
  if (nt < 1 || nx < 1) fail(ErrorKind::InvalidConfig, "grid counts must be positive");
}

std::vector<cplx> KGridSpec::points() const {
  std::vector<cplx> out;
  for (double im : lattice(im0, im1, nim)) {
    for (double re : lattice(re0, re1, nre)) out.emplace_back(re, im);
  }
  return out;
}

void KGridSpec::validate() const {
  if (!(std::isfinite(re0) && std::isfinite(re1) && std::isfinite(im0) && std::isfinite(im1)) || re1 < re0 || im1 < im0)
    fail(ErrorKind::InvalidConfig, "k-grid bounds must be finite and ordered");
  if (im0 < 0) fail(ErrorKind::InvalidConfig, "k-grid must stay in Im k >= 0");
  if (nre < 1 || nim < 1) fail(ErrorKind::InvalidConfig, "k-grid counts must be positive");
}

void RunConfig::validate() const {
  if (schema_version != kSchemaVersion)
    fail(ErrorKind::InvalidConfig, "unsupported schema_version " + std::to_string(schema_version));
  const Pulse p = pulse.build();
  tol.validate();
  if (search_box) {
    const Rect& r = *search_box;
    if (!(r.re_max > r.re_min && r.im_max > r.im_min && r.im_min > 0))
      fail(ErrorKind::InvalidConfig, "search box must be a nondegenerate rectangle in Im k > 0");
  }
  bands.validate(std::max(1.0, p.start_exponent()));
  if (!(bands.sigma > 0 && bands.sigma < 0.5)) fail(ErrorKind::InvalidConfig, "sigma must lie in (0, 1/2)");
  grid.validate();
  kgrid.validate();
  if (!p.is_trivial()) sim.validate(p);
  if (!std::isfinite(velocity_eps)) fail(ErrorKind::InvalidConfig, "velocity_eps must be finite");
}

std::string RunConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["pulse"] = {{"kind", pulse.kind}, {"c1", {pulse.c1.real(), pulse.c1.imag()}}, {"m", pulse.m}, {"T", pulse.T}};
  j["tolerances"] = {{"ode_rel", tol.ode_rel}, {"ode_abs", tol.ode_abs}, {"quad_tol", tol.quad_tol}, {"root_tol", tol.root_tol}};
  if (search_box) {
    j["search_box"] = {{"re_min", search_box->re_min}, {"re_max", search_box->re_max}, {"im_min", search_box->im_min},
                       {"im_max", search_box->im_max}};
  } else {
    j["search_box"] = nullptr;
  }
  j["bands"] = {{"eps1", bands.eps1}, {"eps2", bands.eps2}, {"K", bands.K}, {"C", bands.C}, {"sigma", bands.sigma}};
  j["grid"] = grid.str();
  j["kgrid"] = {{"re", {kgrid.re0, kgrid.re1, kgrid.nre}}, {"im", {kgrid.im0, kgrid.im1, kgrid.nim}}};
  j["sim"] = {{"h", sim.h},           {"t_max", sim.t_max},   {"x_max", sim.x_max},
              {"tau_max", num(sim.tau_max)}, {"stride", sim.stride}, {"stepper", to_string(sim.stepper)},
              {"max_steps", sim.max_steps}};
  j["velocity_eps"] = velocity_eps;
  j["out_dir"] = out_dir;
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
  RunConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");
    c.schema_version = j.at("schema_version").get<int>();
    if (j.contains("pulse")) {
      const json& p = j["pulse"];
      c.pulse.kind = p.value("kind", c.pulse.kind);
      if (p.contains("c1")) {
        const json& v = p["c1"];
        c.pulse.c1 = v.is_array() ? cplx(v.at(0).get<double>(), v.at(1).get<double>()) : cplx(v.get<double>(), 0.0);
      }
      c.pulse.m = p.value("m", c.pulse.m);
      c.pulse.T = p.value("T", c.pulse.T);
    }
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      c.tol.ode_rel = t.value("ode_rel", c.tol.ode_rel);
      c.tol.ode_abs = t.value("ode_abs", c.tol.ode_abs);
      c.tol.quad_tol = t.value("quad_tol", c.tol.quad_tol);
      c.tol.root_tol = t.value("root_tol", c.tol.root_tol);
    }
    if (j.contains("search_box") && !j["search_box"].is_null()) {
      const json& b = j["search_box"];
      c.search_box = Rect{b.at("re_min").get<double>(), b.at("re_max").get<double>(), b.at("im_min").get<double>(),
                          b.at("im_max").get<double>()};
    }
    if (j.contains("bands")) {
      const json& b = j["bands"];
      c.bands.eps1 = b.value("eps1", c.bands.eps1);
      c.bands.eps2 = b.value("eps2", c.bands.eps2);
      c.bands.K = b.value("K", c.bands.K);
      c.bands.C = b.value("C", c.bands.C);
      c.bands.sigma = b.value("sigma", c.bands.sigma);
    }
    if (j.contains("grid")) c.grid = GridSpec::parse(j["grid"].get<std::string>());
    if (j.contains("kgrid")) {
      const json& k = j["kgrid"];
      if (k.contains("re")) {
        c.kgrid.re0 = k["re"].at(0).get<double>();
        c.kgrid.re1 = k["re"].at(1).get<double>();
        c.kgrid.nre = k["re"].at(2).get<int>();
      }
      if (k.contains("im")) {
        c.kgrid.im0 = k["im"].at(0).get<double>();
        c.kgrid.im1 = k["im"].at(1).get<double>();
        c.kgrid.nim = k["im"].at(2).get<int>();
      }
    }
    if (j.contains("sim")) {
      const json& s = j["sim"];
      c.sim.h = s.value("h", c.sim.h);
      c.sim.t_max = s.value("t_max", c.sim.t_max);
      c.sim.x_max = s.value("x_max", c.sim.x_max);
      if (s.contains("tau_max")) c.sim.tau_max = num_or_inf(s["tau_max"]);
      c.sim.stride = s.value("stride", c.sim.stride);
      if (s.contains("stepper")) c.sim.stepper = bloch_stepper_from_string(s["stepper"].get<std::string>());
      c.sim.max_steps = s.value("max_steps", c.sim.max_steps);
    }
    c.velocity_eps = j.value("velocity_eps", c.velocity_eps);
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::InvalidConfig, "cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

void RunConfig::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::InvalidConfig, "cannot write config " + path);
  os << to_json();
}

bool operator==(const RunConfig& a, const RunConfig& b) { return a.to_json() == b.to_json(); }

}  // namespace mbamp
