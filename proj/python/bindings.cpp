#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "cohomlab/cli.hpp"
#include "cohomlab/cohomology_solver.hpp"
#include "cohomlab/counterexamples.hpp"
#include "cohomlab/errors.hpp"
#include "cohomlab/function_space.hpp"
#include "cohomlab/rep_models.hpp"
#include "cohomlab/root_combinatorics.hpp"

namespace py = pybind11;
using namespace cohomlab;

namespace {

// Library reports carry a to_json(); hand them to Python as dicts.
template <class T>
py::object as_dict(const T& report) {
  return py::module_::import("json").attr("loads")(report.to_json());
}

py::array_t<std::complex<double>> values_array(const SampledFunction& f) {
  std::vector<py::ssize_t> shape;
  for (const auto& g : f.grids()) shape.push_back(static_cast<py::ssize_t>(g.n));
  py::array_t<std::complex<double>> out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

SampledFunction from_array(std::vector<Grid1D> grids, const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& a) {
  std::size_t total = 1;
  for (const auto& g : grids) total *= g.n;
  if (static_cast<std::size_t>(a.size()) != total) throw DimensionError("array size does not match the grids");
  return SampledFunction(std::move(grids), std::vector<Complex>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cohomological equations in explicit unitary representation models";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<BoundaryError>(m, "BoundaryError", error.ptr());
  py::register_exception<SingularGridError>(m, "SingularGridError", error.ptr());
  py::register_exception<AlphabetError>(m, "AlphabetError", error.ptr());
  py::register_exception<RangeError>(m, "RangeError", error.ptr());
  py::register_exception<SingularValueError>(m, "SingularValueError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<ObstructionError>(m, "ObstructionError", error.ptr());
  py::register_exception<NotDiagonalizedError>(m, "NotDiagonalizedError", error.ptr());
  py::register_exception<ZeroFiberError>(m, "ZeroFiberError", error.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", error.ptr());

  py::class_<Grid1D>(m, "Grid1D")
      .def_readonly("lo", &Grid1D::lo)
      .def_readonly("hi", &Grid1D::hi)
      .def_readonly("n", &Grid1D::n)
      .def_readonly("offset", &Grid1D::offset)
      .def_property_readonly("spacing", &Grid1D::spacing)
      .def("points", &Grid1D::points)
      .def("__eq__", [](const Grid1D& a, const Grid1D& b) { return a == b; });
  m.def("make_grid", [](double lo, double hi, std::size_t n, double offset) { return make_grid(lo, hi, n, offset); },
        py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("offset") = 0.5);

  py::class_<SampledFunction>(m, "SampledFunction")
      .def(py::init(&from_array), py::arg("grids"), py::arg("values"))
      .def_property_readonly("grids", &SampledFunction::grids)
      .def_property_readonly("values", &values_array)
      .def("max_abs", &SampledFunction::max_abs)
      .def("__add__", [](const SampledFunction& a, const SampledFunction& b) { return a + b; })
      .def("__sub__", [](const SampledFunction& a, const SampledFunction& b) { return a - b; })
      .def("__rmul__", [](const SampledFunction& f, Complex c) { return c * f; });
  m.def("l2_norm", &l2_norm);

  py::class_<RepModel>(m, "RepModel")
      .def_static("rho", &RepModel::rho, py::arg("t"))
      .def_static("dual_rho", &RepModel::dual_rho, py::arg("t"), py::arg("fourier") = false)
      .def_static("pi", &RepModel::pi, py::arg("t"), py::arg("r"))
      .def_static("tau", &RepModel::tau, py::arg("t"), py::arg("r"), py::arg("z"))
      .def_static(
          "ind_line", [](int n, double t, const std::string& parity) { return RepModel::ind_line(n, t, parse_parity(parity)); },
          py::arg("n"), py::arg("t"), py::arg("parity") = "plus")
      .def("alphabet", &RepModel::alphabet)
      .def("dimension", &RepModel::dimension)
      .def("to_json", &RepModel::to_json)
      .def("__eq__", [](const RepModel& a, const RepModel& b) { return a == b; });

  m.def(
      "model_grids",
      [](const RepModel& model, const std::string& profile) { return model_grids(model, parse_grid_profile(profile)); },
      py::arg("model"), py::arg("profile") = "default");
  m.def("bump_family", &bump_family);
  m.def(
      "apply_generator",
      [](const RepModel& model, const std::string& gen, const SampledFunction& f) { return apply_generator(model, gen, f); });

  m.def(
      "obstruction_integral", [](const SampledFunction& g, std::size_t axis) { return as_dict(obstruction_integral(g, axis)); },
      py::arg("g"), py::arg("axis") = 1);
  m.def(
      "primitive_solve", [](const SampledFunction& g, std::size_t axis) { return primitive_solve(g, axis); }, py::arg("g"),
      py::arg("axis") = 1);
  // With `primitive_of`, f is taken as the primitive solution for that g and
  // the |f| <= 2(|g| + |Y1 g| + |Y1^2 g|) bound is instantiated.
  m.def(
      "verify_solution",
      [](const RepModel& model, const std::string& gen, const SampledFunction& f, const SampledFunction& rhs,
         std::optional<SampledFunction> primitive_of) {
        auto report = verify_solution(model, gen, f, rhs);
        if (primitive_of) instantiate_primitive_bound(report, model, f, *primitive_of);
        return as_dict(report);
      },
      py::arg("model"), py::arg("gen"), py::arg("f"), py::arg("rhs"), py::arg("primitive_of") = py::none());
  m.def("fourier_solve", [](const SampledFunction& g, const RepModel& model) -> py::object {
    auto r = fourier_solve(g, model);
    if (auto* f = std::get_if<SampledFunction>(&r)) return py::cast(*f);
    return as_dict(std::get<DivergenceFlag>(r));
  });
  m.def("spectral_density", [](const SampledFunction& v, const RepModel& model, const std::string& gen) {
    const auto d = spectral_density(v, model, gen);
    return py::make_tuple(d.chi_grid.points(), d.density, d.total_energy());
  });
  m.def("density_limit_at_zero", [](const SampledFunction& v, const RepModel& model, const std::string& gen, int window) {
    return density_limit_at_zero(spectral_density(v, model, gen), window);
  }, py::arg("v"), py::arg("model"), py::arg("gen"), py::arg("window") = 3);
  m.def("fiber_cocycle_solve", [](const SampledFunction& f, const SampledFunction& g, const RepModel& model) {
    const auto r = fiber_cocycle_solve(f, g, model);
    return py::make_tuple(r.p, as_dict(r));
  });
  m.def(
      "sweep_fibers",
      [](const std::vector<double>& t_samples, const std::string& rhs, int loss, std::size_t n) {
        SweepProblem p;
        p.rhs = rhs;
        p.loss = loss;
        p.n = n;
        return as_dict(sweep_fibers(p, t_samples));
      },
      py::arg("t_samples"), py::arg("rhs") = "gaussian-derivative", py::arg("loss") = 6, py::arg("n") = 64);

  m.def("rigidity_table", [](int n) { return as_dict(rigidity_table(n)); });
  m.def("rigidity_table_csv", [](int n) { return rigidity_table(n).to_csv(); });
  m.def("classify_pair", [](int i, int j, int k, int l, int n) {
    return to_string(classify_pair(make_root(i, j, n), make_root(k, l, n)));
  });

  m.def(
      "build_case1",
      [](int n, int j, double t, const std::string& parity) {
        const auto p = build_case1(n, j, t, parse_parity(parity));
        return py::make_tuple(p.f, p.g, as_dict(p));
      },
      py::arg("n") = 3, py::arg("j") = 3, py::arg("t") = 0.0, py::arg("parity") = "plus");
  m.def(
      "build_case2",
      [](int n, int j, double t, const std::string& parity) {
        const auto p = build_case2(n, j, t, parse_parity(parity));
        return py::make_tuple(p.f, p.g, as_dict(p));
      },
      py::arg("n") = 3, py::arg("j") = 3, py::arg("t") = 0.0, py::arg("parity") = "plus");
  m.def("case1_candidate_density", [](const SampledFunction& g) { return as_dict(case1_candidate_density(g)); });
  m.def("remark_re4_example", []() {
    const auto ex = remark_re4_example();
    return py::make_tuple(ex.g, as_dict(ex));
  });

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "cohomlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
