#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vortexloop/field.hpp"
#include "vortexloop/io.hpp"
#include "vortexloop/single_center.hpp"
#include "vortexloop/tracer.hpp"
#include "vortexloop/vortex.hpp"

namespace py = pybind11;
using namespace vortexloop;

namespace {

Eigen::MatrixXd vertex_matrix(const NodalLoop& loop) {
  Eigen::MatrixXd m(loop.vertices.size(), 3);
  for (std::size_t i = 0; i < loop.vertices.size(); ++i) {
    m.row(i) = loop.vertices[i];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Point-scatterer Helmholtz fields: nodal loops and "
            "probability-current vortices";
  m.attr("__version__") = VORTEXLOOP_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularityError>(m, "SingularityError",
                                           PyExc_ValueError);
  py::register_exception<ResonanceError>(m, "ResonanceError",
                                         PyExc_RuntimeError);
  py::register_exception<RefineError>(m, "RefineError", PyExc_RuntimeError);
  py::register_exception<ProbeError>(m, "ProbeError", PyExc_RuntimeError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<ScattererSet>(m, "ScattererSet")
      .def(py::init<>())
      .def(py::init([](std::vector<Vec3> positions,
                       std::vector<double> strengths) {
             ScattererSet set{std::move(positions), std::move(strengths)};
             set.validate();
             return set;
           }),
           py::arg("positions"), py::arg("strengths"))
      .def_readwrite("positions", &ScattererSet::positions)
      .def_readwrite("strengths", &ScattererSet::strengths)
      .def("__len__", [](const ScattererSet& s) { return s.size(); });

  py::class_<IncidentWave>(m, "IncidentWave")
      .def(py::init([](double k, Vec3 direction) {
             IncidentWave w{k, std::move(direction)};
             w.validate();
             return w;
           }),
           py::arg("k"), py::arg("direction") = Vec3(1, 0, 0))
      .def_readonly("k", &IncidentWave::k)
      .def_readonly("direction", &IncidentWave::direction);

  py::class_<FieldSample>(m, "FieldSample")
      .def_readonly("psi", &FieldSample::psi)
      .def_readonly("grad", &FieldSample::grad)
      .def_readonly("rho", &FieldSample::rho)
      .def_readonly("current", &FieldSample::current)
      .def_readonly("velocity", &FieldSample::velocity);

  py::class_<WaveField>(m, "WaveField");

  py::class_<FieldState, WaveField>(m, "FieldState")
      .def_static("solve", &FieldState::solve, py::arg("scatterers"),
                  py::arg("wave"), py::arg("cond_cap") = 1e12)
      .def("psi", &FieldState::psi, py::arg("point"))
      .def("grad_psi", &FieldState::grad_psi, py::arg("point"))
      .def("sample", &FieldState::sample, py::arg("point"),
           py::arg("rho_floor") = 1e-14)
      .def("amplitudes", &FieldState::amplitudes)
      .def_property_readonly("k", &FieldState::wavenumber);

  py::class_<Box>(m, "Box")
      .def(py::init([](Vec3 lo, Vec3 hi) {
             Box b{std::move(lo), std::move(hi)};
             b.validate();
             return b;
           }),
           py::arg("lo"), py::arg("hi"))
      .def_readonly("lo", &Box::lo)
      .def_readonly("hi", &Box::hi)
      .def("contains", &Box::contains);

  py::class_<TraceConfig>(m, "TraceConfig")
      .def(py::init<>())
      .def_static("with_step", &TraceConfig::with_step, py::arg("step"))
      .def_readwrite("bounds", &TraceConfig::bounds)
      .def_readwrite("seed_resolution", &TraceConfig::seed_resolution)
      .def_readwrite("newton_tol", &TraceConfig::newton_tol)
      .def_readwrite("step", &TraceConfig::step)
      .def_readwrite("max_vertices", &TraceConfig::max_vertices)
      .def_readwrite("closure_tol", &TraceConfig::closure_tol)
      .def_readwrite("crossing_tol", &TraceConfig::crossing_tol)
      .def_readwrite("dedup_tol", &TraceConfig::dedup_tol);

  py::class_<NodalLoop>(m, "NodalLoop")
      .def_readonly("closed", &NodalLoop::closed)
      .def_property_readonly("vertices", &vertex_matrix)
      .def("length", &NodalLoop::length)
      .def("__len__",
           [](const NodalLoop& loop) { return loop.vertices.size(); });

  m.def("trace_all", &trace_all, py::arg("field"),
        py::arg("config") = TraceConfig{});

  py::class_<RingGeometry>(m, "RingGeometry")
      .def_readonly("axial_x", &RingGeometry::axial_x)
      .def_readonly("radius", &RingGeometry::radius)
      .def_readonly("distance", &RingGeometry::distance)
      .def_readonly("gamma", &RingGeometry::gamma)
      .def_readonly("kappa", &RingGeometry::kappa)
      .def_readonly("branch_n", &RingGeometry::branch_n);

  m.def("ring_geometry", &ring_geometry, py::arg("alpha"), py::arg("k"));
  m.def("kappa_threshold", &kappa_threshold);
  m.def("psi_single", &psi_single, py::arg("alpha"), py::arg("k"),
        py::arg("point"));

  py::class_<VortexReport>(m, "VortexReport")
      .def_readonly("winding", &VortexReport::winding)
      .def_readonly("circulation", &VortexReport::circulation)
      .def_readonly("c_abs", &VortexReport::c_abs)
      .def_readonly("probe_radius", &VortexReport::probe_radius)
      .def_readonly("samples", &VortexReport::samples);

  m.def(
      "winding_number",
      [](const FieldState& field, const Vec3& center, const Vec3& tangent,
         double radius, int samples) {
        return winding_number(field, center, tangent, radius, samples);
      },
      py::arg("field"), py::arg("center"), py::arg("tangent"),
      py::arg("radius"), py::arg("samples") = 720);

  m.def(
      "probe_loop",
      [](const FieldState& field, const NodalLoop& loop, int vertex,
         double radius, int samples) {
        if (vertex < 0 || vertex >= static_cast<int>(loop.vertices.size())) {
          throw ConfigError("vertex index out of range");
        }
        const auto frames = loop_frames(loop);
        return winding_number(field, loop.vertices[vertex],
                              frames[vertex].tangent, radius, samples);
      },
      py::arg("field"), py::arg("loop"), py::arg("vertex"), py::arg("radius"),
      py::arg("samples") = 720,
      "Winding probe in the plane perpendicular to the loop at a vertex.");

  py::class_<Diagnostics>(m, "Diagnostics")
      .def_readonly("helmholtz_worst", &Diagnostics::helmholtz_worst)
      .def_readonly("gradient_worst", &Diagnostics::gradient_worst)
      .def_readonly("boundary_worst", &Diagnostics::boundary_worst)
      .def_readonly("flux_worst", &Diagnostics::flux_worst)
      .def("ok", &Diagnostics::pass);

  m.def("run_diagnostics", &run_diagnostics, py::arg("field"),
        py::arg("seed") = 0, py::arg("points") = 100);

  py::class_<RandomScatterers>(m, "RandomScatterers")
      .def(py::init([](std::uint64_t seed, int count, Box box, double alpha) {
             return RandomScatterers{seed, count, std::move(box), alpha};
           }),
           py::arg("seed"), py::arg("count"),
           py::arg("box") = Box{Vec3(-1, -1, -1), Vec3(1, 1, 1)},
           py::arg("alpha") = 0.0)
      .def_readonly("seed", &RandomScatterers::seed)
      .def_readonly("count", &RandomScatterers::count)
      .def_readonly("alpha", &RandomScatterers::alpha);

  m.def("generate_scatterers", &generate_scatterers, py::arg("params"),
        py::arg("min_separation") = 0.05);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("wave", &RunConfig::wave)
      .def_readonly("scatterers", &RunConfig::scatterers)
      .def_readonly("trace", &RunConfig::trace)
      .def_readonly("output_dir", &RunConfig::output_dir)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) {
        return a == b;
      });

  m.def("load_config", &load_config, py::arg("document"));
  m.def("load_config_file", &load_config_file, py::arg("path"));
  m.def("emit_config", &emit_config, py::arg("config"));
  m.def("config_fingerprint", &config_fingerprint, py::arg("config"));
  m.def("resolve_scatterers", &resolve_scatterers, py::arg("config"));
}
