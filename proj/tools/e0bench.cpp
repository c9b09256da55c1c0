// e0bench: build, validate and analyze E0-semigroup models from JSON files.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "e0/model_io.hpp"

using namespace e0;

namespace {

struct Overrides {
  std::optional<double> eps_rank;
  std::optional<double> eps_eq;
  std::optional<int> horizon;

  void apply(ModelSpec& spec) const {
    if (eps_rank) spec.tol.eps_rank = *eps_rank;
    if (eps_eq) spec.tol.eps_eq = *eps_eq;
    if (horizon) spec.horizon = *horizon;
  }
  Tolerances tolerances() const {
    Tolerances t;
    if (eps_rank) t.eps_rank = *eps_rank;
    if (eps_eq) t.eps_eq = *eps_eq;
    return t;
  }
};

Model load(const std::string& path, const Overrides& ov) {
  ModelSpec spec = parse_model(read_json_file(path));
  ov.apply(spec);
  return build_model(spec);
}

void require_increasing(const Model& m) {
  if (!is_increasing_projection(*m.alpha, m.p, m.tol)) {
    throw Error(ErrorKind::NotIncreasing,
                "projection is not increasing (residual " +
                    std::to_string(leq_residual(m.p.matrix(), m.alpha->apply(m.p.matrix()))) + ")");
  }
}

void line(const std::string& name, bool ok, double residual) {
  std::printf("%-34s %s  %.3e\n", name.c_str(), ok ? "ok  " : "FAIL", residual);
}

int cmd_validate(const std::string& path, const Overrides& ov) {
  const Model m = load(path, ov);
  const StarAlgebra& a = *m.algebra;
  std::printf("algebra: N=%ld dim=%ld factor=%s\n", static_cast<long>(a.ambient_dim()), static_cast<long>(a.dim()),
              is_factor(a, m.tol) ? "yes" : "no");
  const double closure = closure_residual(a);
  line("algebra_closure", closure <= m.tol.eps_eq, closure);
  const auto er = endomorphism_residuals(a, m.alpha->map());
  line("endomorphism_unital", er.unital <= m.tol.eps_eq, er.unital);
  line("endomorphism_multiplicative", er.multiplicative <= 10 * m.tol.eps_eq, er.multiplicative);
  line("endomorphism_adjoint", er.adjoint <= m.tol.eps_eq, er.adjoint);
  const double inc = leq_residual(m.p.matrix(), m.alpha->apply(m.p.matrix()));
  line("projection_increasing", inc <= m.tol.eps_eq, inc);
  require_increasing(m);
  const CPSemigroup phi = compress(*m.alpha, m.p, m.horizon, m.tol);
  line("compression_semigroup", true, 0.0);
  const auto mv = is_multiplicative_compression(*m.alpha, m.p, m.horizon, m.tol);
  std::printf("compression multiplicative: %s (commutator %.3e, product defect %.3e)\n",
              mv.multiplicative ? "yes" : "no", mv.commutation_residual, mv.product_residual);
  (void)phi;
  return 0;
}

int cmd_analyze(const std::string& path, const std::string& out, const Overrides& ov) {
  const Model m = load(path, ov);
  require_increasing(m);
  const MinimalityReport rep = theorem_b_verdict(m.alpha, m.p, m.horizon, m.tol);
  const Json j = report_to_json(rep, m);
  if (out.empty()) std::cout << j.dump(2) << '\n';
  else write_json_file(out, j);
  for (const auto& rec : rep.invariants)
    if (!rec.passed) {
      std::cerr << "invariant failed: " << rec.name << " (" << rec.residual << ")\n";
      return 2;
    }
  return 0;
}

int cmd_minimality(const std::string& path, const Overrides& ov) {
  const Model m = load(path, ov);
  require_increasing(m);
  const PlusData d = plus_data(m.alpha, m.p, m.horizon, m.tol);
  const bool minimal = projection_equal(d.p_plus_factored, m.algebra->unit(), m.tol);
  std::printf("minimal: %s  rank(p+) = %d of %d\n", minimal ? "yes" : "no", d.p_plus_factored.rank(),
              m.algebra->unit().rank());
  return 0;
}

int cmd_cocycle(const std::string& path, const Overrides& ov) {
  const Model m = load(path, ov);
  require_increasing(m);
  const ProjectiveCocycle q = minimal_cocycle_over(m.alpha, m.p, m.horizon, m.tol);
  for (int t = 1; t <= q.horizon(); ++t) std::printf("q_%d rank %d\n", t, q.at(t).rank());
  const CocycleLimit lim = cocycle_limit(q, m.tol);
  std::printf("q_inf rank %d (stable from t=%d)\n", lim.limit.rank(), lim.stabilized_at);
  return 0;
}

int cmd_dilate(const std::string& kraus_path, int levels, int ancilla, const std::string& out, const Overrides& ov) {
  const Tolerances tol = ov.tolerances();
  const KrausMap phi = KrausMap::validated(parse_kraus(read_json_file(kraus_path)), tol);
  const ChainDilation chain = build_chain_dilation(phi, levels, tol, ancilla);
  ModelSpec spec;
  spec.ambient_dim = static_cast<int>(chain.model.algebra->ambient_dim());
  spec.kind = EndoKind::KrausChain;
  spec.kraus = phi.ops();
  spec.levels = levels;
  spec.ancilla = ancilla;
  spec.tol = tol;
  if (ov.horizon) spec.horizon = *ov.horizon;
  // The vacuum corner is increasing only for single-Kraus (unitary) input;
  // otherwise the model carries its alpha-orbit cover, which is fixed.
  const Projection p = chain.vacuum_increasing ? chain.model.p : cyclic_cover(*chain.model.alpha, chain.model.p, tol);
  spec.projection = p.matrix();
  write_json_file(out, model_to_json(spec));
  std::printf("N=%ld  recovery residual %.3e  vacuum increasing: %s  projection rank %d\n",
              static_cast<long>(spec.ambient_dim), chain.heisenberg_residual,
              chain.vacuum_increasing ? "yes" : "no", p.rank());
  return 0;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidModel, "bad size list \"" + text + "\"");
    }
  }
  return out;
}

int cmd_random(std::uint64_t seed, const std::string& blocks, const std::string& style, const std::string& out,
               const Overrides& ov) {
  const auto sizes = parse_sizes(blocks);
  if (style != "block" && style != "chain") throw Error(ErrorKind::InvalidModel, "style must be block or chain");
  ModelSpec spec = random_model(seed, sizes, style == "block" ? RandomStyle::Block : RandomStyle::Chain, ov.tolerances());
  if (ov.horizon) spec.horizon = *ov.horizon;
  write_json_file(out, model_to_json(spec));
  return 0;
}

// Runs the analysis pipeline on one fixture; returns false on any failed check.
bool run_fixture(const std::string& name, const Model& m) {
  try {
    const MinimalityReport rep = theorem_b_verdict(m.alpha, m.p, m.horizon, m.tol);
    (void)compress(*m.alpha, m.p, m.horizon, m.tol);
    bool ok = true;
    for (const auto& rec : rep.invariants) ok = ok && rec.passed;
    std::printf("%-28s %s  N=%d rank(p+)=%d minimal=%s agreement=%.2e\n", name.c_str(), ok ? "ok  " : "FAIL",
                rep.ambient_dim, rep.p_plus_factored.rank(), rep.minimal ? "yes" : "no", rep.agreement_residual);
    return ok;
  } catch (const Error& e) {
    std::printf("%-28s FAIL  %s\n", name.c_str(), e.what());
    return false;
  }
}

int cmd_selftest() {
  bool ok = true;
  ok = run_fixture("swap_in", swap_in_model()) && ok;
  {
    const int blocks[] = {2, 2};
    Matrix p = Matrix::Zero(4, 4);
    p(0, 0) = 1.0;
    ok = run_fixture("identity_2_2", identity_model(blocks, p)) && ok;
  }
  {
    Sampler rng(7);
    Matrix e = Matrix::Zero(2, 2);
    e(0, 0) = 1.0;
    ok = run_fixture("straddle", straddle_model(rng.haar_unitary(2), e)) && ok;
  }
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const int blocks[] = {2, 1, 2};
    ok = run_fixture("random_block_seed" + std::to_string(seed), build_model(random_model(seed, blocks, RandomStyle::Block))) && ok;
  }
  {
    const ChainDilation chain = build_chain_dilation(amplitude_damping(0.3), 2, {});
    Model m = chain.model;
    m.p = cyclic_cover(*m.alpha, m.p, m.tol);
    ok = run_fixture("chain_damping_cover", m) && ok;
  }
  std::printf("selftest %s\n", ok ? "passed" : "FAILED");
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"E0-semigroup workbench"};
  app.require_subcommand(1);
  Overrides ov;
  double eps_rank = 0, eps_eq = 0;
  int horizon = 0;
  auto* o_rank = app.add_option("--eps-rank", eps_rank, "relative eigenvalue cutoff for rank decisions");
  auto* o_eq = app.add_option("--eps-eq", eps_eq, "operator-norm threshold for equality and order");
  auto* o_hor = app.add_option("--horizon", horizon, "time horizon T")->check(CLI::PositiveNumber);

  std::string model_path, out_path, kraus_path, blocks = "2,2", style = "block";
  int levels = 1, ancilla = 0;
  std::uint64_t seed = 0;

  auto* validate = app.add_subcommand("validate", "check all structural invariants of a model");
  validate->add_option("model", model_path)->required();
  auto* analyze = app.add_subcommand("analyze", "full minimality report");
  analyze->add_option("model", model_path)->required();
  analyze->add_option("-o,--output", out_path, "write the report here instead of stdout");
  auto* minimality = app.add_subcommand("minimality", "one-line minimality verdict");
  minimality->add_option("model", model_path)->required();
  auto* cocycle = app.add_subcommand("cocycle", "ranks of the minimal cocycle over p and its limit");
  cocycle->add_option("model", model_path)->required();
  auto* dilate = app.add_subcommand("dilate", "tensor-chain dilation of a Kraus map");
  dilate->add_option("--kraus", kraus_path)->required();
  dilate->add_option("--levels", levels)->required()->check(CLI::PositiveNumber);
  dilate->add_option("--ancilla", ancilla, "ancilla dimension (default: number of Kraus operators)");
  dilate->add_option("-o,--output", out_path)->required();
  auto* random = app.add_subcommand("random", "seeded random model");
  random->add_option("--seed", seed)->required();
  random->add_option("--blocks", blocks, "block sizes, or d,r,L for chain style");
  random->add_option("--style", style, "block or chain");
  random->add_option("-o,--output", out_path)->required();
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite on built-in fixtures");

  CLI11_PARSE(app, argc, argv);
  if (*o_rank) ov.eps_rank = eps_rank;
  if (*o_eq) ov.eps_eq = eps_eq;
  if (*o_hor) ov.horizon = horizon;

  try {
    ov.tolerances().validate();
    if (*validate) return cmd_validate(model_path, ov);
    if (*analyze) return cmd_analyze(model_path, out_path, ov);
    if (*minimality) return cmd_minimality(model_path, ov);
    if (*cocycle) return cmd_cocycle(model_path, ov);
    if (*dilate) return cmd_dilate(kraus_path, levels, ancilla, out_path, ov);
    if (*random) return cmd_random(seed, blocks, style, out_path, ov);
    if (*selftest) return cmd_selftest();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.internal() ? 2 : 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: InvalidModel: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
