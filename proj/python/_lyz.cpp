#include "lyz/battery.hpp"
#include "lyz/body.hpp"
#include "lyz/error.hpp"
#include "lyz/json_io.hpp"
#include "lyz/legendre.hpp"
#include "lyz/logconcave.hpp"
#include "lyz/lyz_functional.hpp"
#include "lyz/petty.hpp"
#include "lyz/slog.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

namespace py = pybind11;
using namespace lyz;

namespace {

IntegrationSpec make_spec(const std::string& backend, std::uint64_t budget, std::uint64_t seed, double radius) {
  IntegrationSpec s;
  s.backend = backend_from_name(backend);
  s.budget = budget ? budget : (s.backend == Backend::kMonteCarlo ? 1000000u : (1u << 18));
  s.seed = seed;
  s.truncation_radius = radius;
  s.validate();
  return s;
}

py::dict result_dict(const IntegralResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["error"] = r.stderr_or_bound;
  d["spec_fingerprint"] = r.spec_fingerprint;
  return d;
}

LogConcaveFunction as_function(const ConvexFunction& phi) { return LogConcaveFunction(phi); }

}  // namespace

PYBIND11_MODULE(_lyz, m) {
  m.doc() = "Log-concave functions, their LYZ ellipsoids and related functionals";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NonDifferentiable>(m, "NonDifferentiable", PyExc_ArithmeticError);
  py::register_exception<NotIntegrable>(m, "NotIntegrable", PyExc_ArithmeticError);
  py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ArithmeticError);

  py::class_<ConvexBody>(m, "ConvexBody")
      .def_static("cube", &ConvexBody::cube, py::arg("n"), py::arg("half_width") = 1.0)
      .def_static("cross_polytope", &ConvexBody::cross_polytope, py::arg("n"), py::arg("radius") = 1.0)
      .def_static("ball", &ConvexBody::ball, py::arg("n"), py::arg("radius") = 1.0)
      .def_static("ellipsoid", &ConvexBody::ellipsoid, py::arg("Q"))
      .def_static("regular_polygon", &ConvexBody::regular_polygon, py::arg("sides"), py::arg("inradius") = 1.0,
                  py::arg("phase") = 0.0)
      .def_static("from_vertices", &ConvexBody::from_vertices, py::arg("vertices"))
      .def_property_readonly("dim", &ConvexBody::dim)
      .def("gauge", &ConvexBody::gauge)
      .def("support", &ConvexBody::support)
      .def("volume", &ConvexBody::volume)
      .def("polar", &ConvexBody::polar)
      .def("transformed", &ConvexBody::transformed)
      .def("__repr__", &ConvexBody::describe);

  py::class_<ConvexFunction>(m, "ConvexFunction")
      .def_static("quadratic", &ConvexFunction::quadratic, py::arg("A"))
      .def_static("gauge_power", &ConvexFunction::gauge_power, py::arg("body"), py::arg("p"))
      .def_static("from_json", [](const std::string& text) { return function_from_json(parse_json(text, "string")); })
      .def("to_json", [](const ConvexFunction& phi) { return to_json(phi).dump(); })
      .def_property_readonly("dim", &ConvexFunction::dim)
      .def("__call__",
           [](const ConvexFunction& phi, const Vec& x) {
             return phi(x).value_or(std::numeric_limits<double>::infinity());
           })
      .def("gradient", [](const ConvexFunction& phi, const Vec& x) { return gradient(phi, x); })
      .def("__repr__", &ConvexFunction::describe);

  m.def("legendre_conjugate", &legendre_conjugate, py::arg("phi"));
  m.def("fenchel_young_gap", &fenchel_young_gap, py::arg("phi"), py::arg("x"), py::arg("y"));
  m.def("inf_convolution", &inf_convolution, py::arg("phi"), py::arg("psi"));
  m.def("scalar_right_mult", &scalar_right_mult, py::arg("phi"), py::arg("alpha"));
  m.def("compose", py::overload_cast<const ConvexFunction&, const Mat&>(&compose), py::arg("phi"), py::arg("T"));

  m.def(
      "total_mass",
      [](const ConvexFunction& phi, const std::string& backend, std::uint64_t budget, std::uint64_t seed,
         double radius) { return result_dict(total_mass(as_function(phi), make_spec(backend, budget, seed, radius))); },
      py::arg("phi"), py::arg("backend") = "quadrature", py::arg("budget") = 0, py::arg("seed") = 42,
      py::arg("radius") = 8.0);

  m.def(
      "first_variation",
      [](const ConvexFunction& phi, const ConvexFunction& psi, const std::string& backend, std::uint64_t budget,
         std::uint64_t seed, double radius) {
        return result_dict(first_variation(as_function(phi), as_function(psi), make_spec(backend, budget, seed, radius)));
      },
      py::arg("phi"), py::arg("psi"), py::arg("backend") = "quadrature", py::arg("budget") = 0, py::arg("seed") = 42,
      py::arg("radius") = 8.0);

  m.def(
      "lyz_matrix",
      [](const ConvexFunction& phi, const std::string& backend, std::uint64_t budget, std::uint64_t seed,
         double radius) {
        const FunctionalEllipsoid e = lyz_matrix(as_function(phi), make_spec(backend, budget, seed, radius));
        py::dict d;
        d["A"] = e.A.A;
        d["A_error"] = e.A_error;
        d["J"] = e.J;
        d["J_error"] = e.J_error;
        d["min_eig"] = e.min_eig;
        d["spec_fingerprint"] = e.spec_fingerprint;
        return d;
      },
      py::arg("phi"), py::arg("backend") = "quadrature", py::arg("budget") = 0, py::arg("seed") = 42,
      py::arg("radius") = 8.0);

  m.def(
      "lyz_body_ellipsoid", [](const ConvexBody& K) { return lyz_body_ellipsoid(K).A; }, py::arg("body"));

  m.def(
      "solve_slog",
      [](const ConvexFunction& phi, const std::string& backend, std::uint64_t budget, std::uint64_t seed,
         double radius) {
        const SlogSolution s = solve_slog(as_function(phi), make_spec(backend, budget, seed, radius));
        py::dict d;
        d["M"] = s.M;
        d["T"] = s.gaussian.T();
        d["objective"] = s.objective;
        d["normalized_variation"] = s.normalized_variation;
        d["normalized_variation_error"] = s.normalized_variation_error;
        return d;
      },
      py::arg("phi"), py::arg("backend") = "quadrature", py::arg("budget") = 0, py::arg("seed") = 42,
      py::arg("radius") = 8.0);

  m.def(
      "projection_support",
      [](const ConvexFunction& phi, const Vec& y, const std::string& backend, std::uint64_t budget,
         std::uint64_t seed, double radius) {
        return result_dict(projection_support(as_function(phi), y, make_spec(backend, budget, seed, radius)));
      },
      py::arg("phi"), py::arg("y"), py::arg("backend") = "quadrature", py::arg("budget") = 0, py::arg("seed") = 42,
      py::arg("radius") = 8.0);

  m.def(
      "petty_chain",
      [](const ConvexFunction& phi, const std::string& backend, std::uint64_t budget, std::uint64_t seed,
         double radius) {
        const PettyChain c = petty_chain_report(as_function(phi), make_spec(backend, budget, seed, radius));
        py::dict d;
        d["L"] = c.L;
        d["M"] = c.M;
        d["R"] = c.R;
        d["gap1"] = c.gap1;
        d["gap1_error"] = c.gap1_error;
        d["gap2"] = c.gap2;
        d["gap2_error"] = c.gap2_error;
        d["first_holds"] = c.first_holds;
        d["second_holds"] = c.second_holds;
        return d;
      },
      py::arg("phi"), py::arg("backend") = "quadrature", py::arg("budget") = 0, py::arg("seed") = 42,
      py::arg("radius") = 8.0);

  // Criterion report as a JSON string; the package wrapper decodes it.
  m.def(
      "run_criterion_json",
      [](int id, std::uint64_t seed) {
        VerifyOptions opts;
        opts.seed = seed;
        const CheckResult r = run_criterion(id, opts);
        json j{{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary}, {"data", r.data}};
        return j.dump();
      },
      py::arg("id"), py::arg("seed") = 42);
}
