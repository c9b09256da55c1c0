#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "e0/model_io.hpp"

namespace py = pybind11;
using namespace e0;

namespace {

Model load(const std::string& text, std::optional<double> eps_rank, std::optional<double> eps_eq,
           std::optional<int> horizon) {
  ModelSpec spec = parse_model(Json::parse(text));
  if (eps_rank) spec.tol.eps_rank = *eps_rank;
  if (eps_eq) spec.tol.eps_eq = *eps_eq;
  if (horizon) spec.horizon = *horizon;
  return build_model(spec);
}

std::string analyze(const std::string& text, std::optional<double> eps_rank, std::optional<double> eps_eq,
                    std::optional<int> horizon) {
  const Model m = load(text, eps_rank, eps_eq, horizon);
  const MinimalityReport rep = theorem_b_verdict(m.alpha, m.p, m.horizon, m.tol);
  return report_to_json(rep, m).dump(2);
}

std::string random_json(std::uint64_t seed, std::vector<int> sizes, const std::string& style) {
  RandomStyle s = RandomStyle::Block;
  if (style == "chain") s = RandomStyle::Chain;
  else if (style != "block") throw Error(ErrorKind::InvalidModel, "style must be \"block\" or \"chain\"");
  return model_to_json(random_model(seed, sizes, s)).dump(2);
}

py::dict p_plus(const std::string& text) {
  const Model m = load(text, std::nullopt, std::nullopt, std::nullopt);
  const PlusData d = plus_data(m.alpha, m.p, m.horizon, m.tol);
  py::dict out;
  out["p"] = Matrix(m.p.matrix());
  out["p_infinity"] = Matrix(d.p_inf.value.matrix());
  out["q_infinity"] = Matrix(d.q_inf.limit.matrix());
  out["p_plus_span"] = Matrix(d.p_plus_span.matrix());
  out["p_plus_factored"] = Matrix(d.p_plus_factored.matrix());
  out["agreement_residual"] = d.agreement_residual;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Minimal multiplicative corners of finite-dimensional endomorphism semigroups";

  static py::exception<Error> error(mod, "E0Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object kind = py::str(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), py::make_tuple(py::str(e.what()), kind).ptr());
    }
  });

  mod.def("range_projection", [](const Matrix& cols) { return Matrix(range_projection(cols, {}).matrix()); },
          py::arg("columns"));
  mod.def("hermitian_eig", [](const Matrix& a) {
    const HermitianEig e = hermitian_eig(a, {});
    return py::make_tuple(Eigen::VectorXd(e.values), Matrix(e.vectors));
  });
  mod.def("validate", [](const std::string& text) {
    const Model m = load(text, std::nullopt, std::nullopt, std::nullopt);
    return py::dict(py::arg("ambient_dim") = m.algebra->ambient_dim(), py::arg("dim") = m.algebra->dim(),
                    py::arg("horizon") = m.horizon,
                    py::arg("increasing") = is_increasing_projection(*m.alpha, m.p, m.tol));
  }, py::arg("model_json"));
  mod.def("analyze", &analyze, py::arg("model_json"), py::arg("eps_rank") = py::none(),
          py::arg("eps_eq") = py::none(), py::arg("horizon") = py::none());
  mod.def("p_plus", &p_plus, py::arg("model_json"));
  mod.def("random_model", &random_json, py::arg("seed"), py::arg("sizes"), py::arg("style") = "block");
}
