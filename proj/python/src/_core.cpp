#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dstori/checks.h"
#include "dstori/config.h"
#include "dstori/errors.h"
#include "dstori/glue.h"
#include "dstori/solve.h"

namespace py = pybind11;
using namespace dstori;

namespace {

// results cross the boundary as JSON text; the python side parses them
std::string text(const Json& j) { return dump_json(j); }

RunConfig config_from(const std::string& cfg_json) {
  RunConfig c = cfg_json.empty() ? RunConfig{} : RunConfig::from_json(Json::parse(cfg_json));
  c.validate();
  return c;
}

GluedSurface surface(double theta, double x, std::optional<double> y) {
  return y ? build_T_theta_xy(theta, x_point(x), *y) : build_T_theta_x(theta, x_point(x));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "native core of dstori";
  // one reference kept for the life of the process
  static PyObject* exc = py::exception<Error>(m, "DstoriError").inc_ref().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::handle(exc)(py::str(e.what()));
      inst.attr("code") = to_string(e.code());
      inst.attr("payload") = dump_json(e.payload());
      PyErr_SetObject(exc, inst.ptr());
    }
  });

  m.def("y_theta", &y_theta);
  m.def("area_rectangle_theta", [](double th) { return area_rectangle(rectangle_theta(th)); });
  m.def("trace_gh", [](double th, double x) { return trace_abs(compose(family_g(th), family_h(th, x_point(x)))); });
  m.def("trace_commutator_gh",
        [](double th, double x) { return trace_commutator(family_g(th), family_h(th, x_point(x))); });

  m.def("build_report",
        [](double th, double x, std::optional<double> y) { return text(surface(th, x, y).report()); },
        py::arg("theta"), py::arg("x"), py::arg("y") = py::none());

  m.def("rotation",
        [](double th, double x, std::optional<double> y, const std::string& section) {
          GluedSurface s = surface(th, x, y);
          auto it = s.sections.find(section);
          if (it == s.sections.end()) throw Error(ErrorCode::InvalidSpec, "no section " + section);
          return text(rotation_number(first_return(s, it->second)).to_json());
        },
        py::arg("theta"), py::arg("x"), py::arg("y") = py::none(), py::arg("section") = "bottom");

  m.def("rotation_sweep",
        [](double th, int n, int workers) {
          RunConfig c;
          Json rows = Json::array();
          for (const auto& r : rotation_sweep(th, sweep_grid(n), c.rotation(), workers))
            rows.push_back(Json{{"x", json_double(r.x)}, {"rho", r.rho.to_json()}, {"lift", r.lift}});
          return text(rows);
        },
        py::arg("theta"), py::arg("points") = 200, py::arg("workers") = 4);

  m.def("realize_rational", [](double th, long p, long q) { return text(realize_rational(th, p, q).to_json()); });
  m.def("realize_irrational",
        [](double th, double rho, double tol) { return text(realize_irrational(th, rho, tol).to_json()); });
  m.def("realize_pair", [](double th, double ra, double rb, double tol) {
    return text(realize_pair(th, ra, rb, tol).to_json());
  });

  m.def("run_suite",
        [](const std::string& name, const std::string& cfg) {
          Json out = Json::array();
          for (const auto& r : run_suite(name, config_from(cfg))) out.push_back(r.to_json());
          return text(out);
        },
        py::arg("name"), py::arg("config") = "");
}
