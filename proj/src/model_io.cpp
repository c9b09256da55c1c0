#include "e0/model_io.hpp"

#include <fstream>
#include <sstream>

namespace e0 {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidModel, msg); }

cplx scalar_from_json(const Json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  bad(what + ": expected a number or [re, im]");
}

std::vector<Matrix> matrices_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) bad(what + ": expected an array of matrices");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(matrix_from_json(j[k], what + "[" + std::to_string(k) + "]"));
  return out;
}

Json matrices_to_json(const std::vector<Matrix>& ms) {
  Json a = Json::array();
  for (const auto& m : ms) a.push_back(matrix_to_json(m));
  return a;
}

int int_field(const Json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) bad(std::string("\"") + key + "\" must be an integer");
  return j[key].get<int>();
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad(what + ": expected a nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) bad(what + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = scalar_from_json(j[i][c], what);
  }
  if (!m.allFinite()) bad(what + ": non-finite entry");
  return m;
}

ModelSpec parse_model(const Json& j) {
  if (!j.is_object()) bad("model must be a JSON object");
  ModelSpec spec;
  spec.ambient_dim = int_field(j, "ambient_dim", 0);
  if (j.contains("blocks")) {
    if (!j["blocks"].is_array()) bad("\"blocks\" must be an array of sizes");
    for (const auto& b : j["blocks"]) {
      if (!b.is_number_integer() || b.get<int>() <= 0) bad("block sizes must be positive integers");
      spec.blocks.push_back(b.get<int>());
    }
  }
  if (j.contains("generators")) spec.generators = matrices_from_json(j["generators"], "generators");
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (!t.is_object()) bad("\"tolerances\" must be an object");
    if (t.contains("eps_rank")) spec.tol.eps_rank = t["eps_rank"].get<double>();
    if (t.contains("eps_eq")) spec.tol.eps_eq = t["eps_eq"].get<double>();
  }
  spec.horizon = int_field(j, "horizon", 0);
  if (spec.horizon < 0) bad("\"horizon\" must be non-negative");
  if (j.contains("projection") && !j["projection"].is_null()) spec.projection = matrix_from_json(j["projection"], "projection");

  if (!j.contains("endomorphism") || !j["endomorphism"].is_object()) bad("missing \"endomorphism\" object");
  const Json& e = j["endomorphism"];
  const std::string kind = e.value("kind", "");
  if (kind == "block_map") {
    spec.kind = EndoKind::BlockMap;
    if (!e.contains("sources") || !e["sources"].is_array()) bad("block_map needs \"sources\"");
    for (const auto& list : e["sources"]) {
      std::vector<int> src;
      if (list.is_number_integer()) {
        src.push_back(list.get<int>());
      } else if (list.is_array()) {
        for (const auto& s : list) {
          if (!s.is_number_integer()) bad("source indices must be integers");
          src.push_back(s.get<int>());
        }
      } else {
        bad("each source entry must be an index or a list of indices");
      }
      spec.block_map.sources.push_back(std::move(src));
    }
    if (e.contains("unitaries")) {
      if (!e["unitaries"].is_array()) bad("\"unitaries\" must be an array");
      for (std::size_t k = 0; k < e["unitaries"].size(); ++k) {
        const Json& u = e["unitaries"][k];
        if (u.is_null()) spec.block_map.unitaries.emplace_back(std::nullopt);
        else spec.block_map.unitaries.emplace_back(matrix_from_json(u, "unitaries[" + std::to_string(k) + "]"));
      }
    }
  } else if (kind == "basis_map") {
    spec.kind = EndoKind::BasisMap;
    if (!e.contains("domain") || !e.contains("images")) bad("basis_map needs \"domain\" and \"images\"");
    spec.domain = matrices_from_json(e["domain"], "domain");
    spec.images = matrices_from_json(e["images"], "images");
  } else if (kind == "kraus_chain") {
    spec.kind = EndoKind::KrausChain;
    if (!e.contains("kraus")) bad("kraus_chain needs \"kraus\"");
    spec.kraus = matrices_from_json(e["kraus"], "kraus");
    spec.levels = int_field(e, "levels", 0);
    spec.ancilla = int_field(e, "ancilla", 0);
  } else {
    bad("unknown endomorphism kind \"" + kind + "\"");
  }
  return spec;
}

Json model_to_json(const ModelSpec& spec) {
  Json j;
  j["ambient_dim"] = spec.ambient_dim;
  if (!spec.blocks.empty()) j["blocks"] = spec.blocks;
  if (!spec.generators.empty()) j["generators"] = matrices_to_json(spec.generators);
  Json e;
  switch (spec.kind) {
    case EndoKind::BlockMap: {
      e["kind"] = "block_map";
      e["sources"] = spec.block_map.sources;
      if (!spec.block_map.unitaries.empty()) {
        Json us = Json::array();
        for (const auto& u : spec.block_map.unitaries) us.push_back(u ? matrix_to_json(*u) : Json(nullptr));
        e["unitaries"] = us;
      }
      break;
    }
    case EndoKind::BasisMap:
      e["kind"] = "basis_map";
      e["domain"] = matrices_to_json(spec.domain);
      e["images"] = matrices_to_json(spec.images);
      break;
    case EndoKind::KrausChain:
      e["kind"] = "kraus_chain";
      e["kraus"] = matrices_to_json(spec.kraus);
      e["levels"] = spec.levels;
      if (spec.ancilla != 0) e["ancilla"] = spec.ancilla;
      break;
  }
  j["endomorphism"] = e;
  if (spec.projection) j["projection"] = matrix_to_json(*spec.projection);
  if (spec.horizon > 0) j["horizon"] = spec.horizon;
  j["tolerances"] = {{"eps_rank", spec.tol.eps_rank}, {"eps_eq", spec.tol.eps_eq}};
  return j;
}

std::vector<Matrix> parse_kraus(const Json& j) {
  if (j.is_object()) {
    if (!j.contains("kraus")) bad("Kraus file needs a \"kraus\" array");
    return matrices_from_json(j["kraus"], "kraus");
  }
  return matrices_from_json(j, "kraus");
}

Json projection_to_json(const Projection& p) {
  return {{"rank", p.rank()}, {"matrix", matrix_to_json(p.matrix())}};
}

Json report_to_json(const MinimalityReport& r, const Model& model) {
  Json j;
  j["model"] = {{"ambient_dim", r.ambient_dim},
                {"algebra_dim", r.m_dim},
                {"is_factor", r.is_factor},
                {"horizon", r.horizon}};
  j["tolerances"] = {{"eps_rank", model.tol.eps_rank}, {"eps_eq", model.tol.eps_eq}};
  j["p"] = projection_to_json(r.p);
  j["p_infinity"] = projection_to_json(r.p_infinity);
  j["p_infinity"]["stabilized_at"] = r.p_inf_stabilized_at;
  j["q_infinity"] = projection_to_json(r.q_infinity);
  j["q_infinity"]["stabilized_at"] = r.q_inf_stabilized_at;
  j["p_plus_span"] = projection_to_json(r.p_plus_span);
  j["p_plus_factored"] = projection_to_json(r.p_plus_factored);
  j["agreement_residual"] = r.agreement_residual;
  j["m_plus_dim"] = r.m_plus_dim;
  j["cocycle_ranks"] = r.cocycle_ranks;
  j["verdicts"] = {{"minimal", r.minimal},
                   {"spans", r.spans},
                   {"generates", r.generates},
                   {"trivial_limits", r.trivial_limits}};
  Json inv = Json::object();
  for (const auto& rec : r.invariants) inv[rec.name] = {{"passed", rec.passed}, {"residual", rec.residual}};
  j["invariants"] = inv;
  j["theorem_a_candidates"] = r.theorem_a_candidates;
  j["witnesses"] = r.witnesses;
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace e0
