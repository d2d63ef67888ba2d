#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mbamp/errors.hpp"
#include "mbamp/lightcone_asym.hpp"
#include "mbamp/mb_oracle.hpp"
#include "mbamp/scattering.hpp"
#include "mbamp/soliton_spectrum.hpp"
#include "mbamp/specfun.hpp"
#include "mbamp/tail_asym.hpp"

namespace py = pybind11;
using namespace mbamp;

namespace {

// (nt, nx) arrays of one component of the stored grid
py::dict grid_arrays(const SimGrid& g) {
  const auto nt = static_cast<py::ssize_t>(g.nt()), nx = static_cast<py::ssize_t>(g.nx());
  py::array_t<cplx> E({nt, nx}), rho({nt, nx});
  py::array_t<double> N({nt, nx});
  auto e = E.mutable_unchecked<2>();
  auto r = rho.mutable_unchecked<2>();
  auto n = N.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < nt; ++i) {
    for (py::ssize_t j = 0; j < nx; ++j) {
      const FieldTriple& f = g.at(i, j);
      e(i, j) = f.E;
      r(i, j) = f.rho;
      n(i, j) = f.N;
    }
  }
  py::dict d;
  d["E"] = E;
  d["N"] = N;
  d["rho"] = rho;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Maxwell-Bloch amplifier: scattering data, asymptotics and the characteristic oracle";

  static py::exception<Error> error(m, "MbampError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object inst = exc(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<FieldTriple>(m, "FieldTriple")
      .def(py::init<>())
      .def_readwrite("E", &FieldTriple::E)
      .def_readwrite("N", &FieldTriple::N)
      .def_readwrite("rho", &FieldTriple::rho)
      .def("bloch_defect", &FieldTriple::bloch_defect)
      .def("__repr__", [](const FieldTriple& f) {
        return "FieldTriple(E=" + py::repr(py::cast(f.E)).cast<std::string>() + ", N=" + std::to_string(f.N) +
               ", rho=" + py::repr(py::cast(f.rho)).cast<std::string>() + ")";
      });

  py::class_<Rect>(m, "Rect")
      .def(py::init<double, double, double, double>(), py::arg("re_min"), py::arg("re_max"), py::arg("im_min"),
           py::arg("im_max"))
      .def_readwrite("re_min", &Rect::re_min)
      .def_readwrite("re_max", &Rect::re_max)
      .def_readwrite("im_min", &Rect::im_min)
      .def_readwrite("im_max", &Rect::im_max)
      .def("contains", &Rect::contains);

  py::class_<Pulse>(m, "Pulse")
      .def_static("box", &Pulse::box, py::arg("amplitude"), py::arg("T"))
      .def_static("smooth_bump", &Pulse::smooth_bump, py::arg("c1"), py::arg("m"), py::arg("T"))
      .def_static("power_start", &Pulse::power_start, py::arg("c1"), py::arg("m"), py::arg("T"))
      .def_static("zero", &Pulse::zero)
      .def_property_readonly("amplitude", &Pulse::amplitude)
      .def_property_readonly("start_exponent", &Pulse::start_exponent)
      .def("__call__", [](const Pulse& p, double t) { return p(t); });

  py::class_<ABValue>(m, "ABValue").def_readonly("a", &ABValue::a).def_readonly("b", &ABValue::b);

  py::class_<ScatteringData>(m, "ScatteringData")
      .def(py::init([](const Pulse& p) { return ScatteringData(p); }), py::arg("pulse"))
      .def("ab", &ScatteringData::ab, py::arg("k"))
      .def("reflection", &ScatteringData::reflection, py::arg("k"))
      .def("reflection_real", &ScatteringData::reflection_real, py::arg("s"))
      .def("reflection_imag", &ScatteringData::reflection_imag, py::arg("kappa"))
      .def("real_dips", &ScatteringData::real_dips, py::arg("lo"), py::arg("hi"));

  py::class_<SolitonZero>(m, "SolitonZero")
      .def_readonly("k", &SolitonZero::k)
      .def_readonly("gamma", &SolitonZero::gamma)
      .def_readonly("velocity", &SolitonZero::velocity);
  py::class_<SolitonSpectrum>(m, "SolitonSpectrum")
      .def(py::init<>())
      .def_readonly("zeros", &SolitonSpectrum::zeros)
      .def_readonly("box", &SolitonSpectrum::box)
      .def("__len__", &SolitonSpectrum::size);
  m.def("find_zeros", py::overload_cast<const ScatteringData&>(&find_zeros), py::arg("sd"));
  m.def("find_zeros", py::overload_cast<const ScatteringData&, const Rect&>(&find_zeros), py::arg("sd"),
        py::arg("box"));
  m.def("soliton_velocity", &soliton_velocity);

  py::enum_<Region>(m, "Region")
      .value("Causal", Region::Causal)
      .value("PartI", Region::PartI)
      .value("PartII", Region::PartII)
      .value("PartIII", Region::PartIII)
      .value("PartIV", Region::PartIV)
      .value("Tail", Region::Tail)
      .value("Unsupported", Region::Unsupported);
  py::class_<RegionTag>(m, "RegionTag")
      .def_readonly("region", &RegionTag::region)
      .def_readonly("n", &RegionTag::n)
      .def_readonly("k0", &RegionTag::k0)
      .def_readonly("xi", &RegionTag::xi)
      .def_readonly("beta", &RegionTag::beta);
  m.def("classify", [](double t, double x, double mm) { return classify(t, x, mm); }, py::arg("t"), py::arg("x"),
        py::arg("m"));

  py::class_<LightconeValue>(m, "LightconeValue")
      .def_readonly("field", &LightconeValue::field)
      .def_readonly("error_scale", &LightconeValue::error_scale);
  m.def("eval_lightcone", &eval_lightcone, py::arg("tag"), py::arg("x"), py::arg("tau"), py::arg("sd"));

  py::class_<PeakPrediction>(m, "PeakPrediction")
      .def_readonly("t", &PeakPrediction::t)
      .def_readonly("tau", &PeakPrediction::tau)
      .def_readonly("theta", &PeakPrediction::theta);
  m.def("predict_peaks", &predict_peaks, py::arg("x"), py::arg("n"), py::arg("sd"));

  py::class_<NuPair>(m, "NuPair").def_readonly("l", &NuPair::l).def_readonly("r", &NuPair::r);
  py::class_<TailPhases>(m, "TailPhases")
      .def_readonly("nu", &TailPhases::nu)
      .def_readonly("omega_l", &TailPhases::omega_l)
      .def_readonly("omega_r", &TailPhases::omega_r);
  py::class_<TailValue>(m, "TailValue")
      .def_readonly("field", &TailValue::field)
      .def_readonly("error_scale", &TailValue::error_scale)
      .def_readonly("soliton", &TailValue::soliton);
  m.def("nu_pair", &nu_pair, py::arg("sd"), py::arg("k0"));
  m.def("omega_pair", &omega_pair, py::arg("sd"), py::arg("spec"), py::arg("t"), py::arg("x"));
  m.def("eval_tail", &eval_tail, py::arg("sd"), py::arg("spec"), py::arg("t"), py::arg("x"), py::arg("eps") = 0.0);

  py::enum_<BlochStepper>(m, "BlochStepper").value("Heun", BlochStepper::Heun).value("Rotation", BlochStepper::Rotation);
  py::class_<SimSpec>(m, "SimSpec")
      .def(py::init<>())
      .def_readwrite("h", &SimSpec::h)
      .def_readwrite("t_max", &SimSpec::t_max)
      .def_readwrite("x_max", &SimSpec::x_max)
      .def_readwrite("tau_max", &SimSpec::tau_max)
      .def_readwrite("stride", &SimSpec::stride)
      .def_readwrite("stepper", &SimSpec::stepper)
      .def_readwrite("max_steps", &SimSpec::max_steps);
  py::class_<InvariantReport>(m, "InvariantReport")
      .def_readonly("conservation", &InvariantReport::conservation)
      .def_readonly("causality", &InvariantReport::causality)
      .def_readonly("boundary", &InvariantReport::boundary)
      .def_readonly("nodes", &InvariantReport::nodes);
  py::class_<SimGrid>(m, "SimGrid")
      .def_property_readonly("h", &SimGrid::h)
      .def_property_readonly("shape", [](const SimGrid& g) { return py::make_tuple(g.nt(), g.nx()); })
      .def_property_readonly("report", &SimGrid::report)
      .def("arrays", &grid_arrays)
      .def("probe", [](const SimGrid& g, double t, double x) { return probe(g, t, x); }, py::arg("t"), py::arg("x"));
  m.def("simulate", &simulate, py::arg("pulse"), py::arg("spec"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "simulate_probes",
      [](const Pulse& p, SimSpec spec, const std::vector<std::pair<double, double>>& tx) {
        spec.store = false;
        py::gil_scoped_release release;
        const ProbeRun r = simulate_probes(p, spec, tx);
        return std::make_pair(r.values, r.report);
      },
      py::arg("pulse"), py::arg("spec"), py::arg("points"));
  m.def("write_grid", &write_grid);
  m.def("read_grid", &read_grid);

  m.def("bessel_i", &bessel_i, py::arg("nu"), py::arg("x"));
  m.def("gamma_imag", [](double y) {
    const GammaValue g = gamma_imag(y);
    return py::make_tuple(g.modulus, g.argument);
  });
}
