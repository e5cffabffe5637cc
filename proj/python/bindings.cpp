#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "adelic/cli.hpp"
#include "adelic/json_io.hpp"

namespace py = pybind11;
using namespace adelic;

// Results cross the boundary as JSON text; the Python wrapper decodes them.
PYBIND11_MODULE(_core, m) {
  m.doc() = "Heights, chi-volumes and equidistribution on the projective line";

  py::register_exception<Error>(m, "AdelicError", PyExc_ValueError);

  m.def("product_formula_defect", [](const std::string& value, const std::string& curve) {
    AdelicCurve C = parse_curve(curve);
    return C.product_formula_defect(C.parse(value));
  }, py::arg("value"), py::arg("curve") = "Q");

  m.def("canonical_height", [](const std::string& map, const std::string& point, const std::string& alpha, int depth) {
    Endomorphism f = Endomorphism::parse(map, parse_rational(alpha));
    HeightOptions opt;
    opt.depth = depth;
    HeightResult H = canonical_height(f, ClosedPoint::parse(point), opt);
    Json j = {{"height", H.value}, {"preperiodic", H.preperiodic}, {"trace", H.trace}, {"error_bound", H.error_bound}};
    if (H.local) j["local"] = *H.local;
    return j.dump();
  }, py::arg("map"), py::arg("point"), py::arg("alpha") = "1", py::arg("depth") = 12);

  m.def("tate_increments", [](const std::string& map, const std::string& place, int depth) {
    TateApprox T = tate_local_potential(Endomorphism::parse(map), place, depth);
    return Json{{"increments", T.increments}, {"lambda_sup", T.lambda_sup}, {"degree", T.degree}}.dump();
  }, py::arg("map"), py::arg("place") = "inf", py::arg("depth") = 20);

  m.def("chi_volume", [](const std::string& family, int n) {
    MetricFamily phi = family_from_json(Json::parse(family));
    LatticeEstimate E = chi_volume_lattice_estimate(phi, n);
    return Json{{"closed_form", chi_volume_closed_form(phi)}, {"estimate", E.estimate}, {"n", n}}.dump();
  }, py::arg("family"), py::arg("n") = 50);

  m.def("small_sequence", [](const std::string& map, const std::string& target, int N) {
    GenericSequence S = small_sequence_generate(Endomorphism::parse(map), parse_rational(target), N);
    Json pts = Json::array();
    for (const auto& Y : S.points) pts.push_back(Y.minimal.to_string());
    return Json{{"points", pts}, {"heights", S.heights}, {"generic", S.generic}}.dump();
  }, py::arg("map"), py::arg("target"), py::arg("N"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int status = run(args, out, err);
    return py::make_tuple(status, out.str(), err.str());
  }, py::arg("args"));

  m.def("commands", &cli_commands);
}
