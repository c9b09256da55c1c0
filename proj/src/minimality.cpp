#include "e0/minimality.hpp"

#include <algorithm>
#include <limits>

namespace e0 {

namespace {

double column_residual(const Matrix& r) { return r.cols() == 0 ? 0.0 : r.colwise().norm().maxCoeff(); }

// max of ||B - A A* B|| and ||A - B B* A|| over columns, infinite when the dimensions differ.
double subspace_distance(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  return std::max(column_residual(b - a * (a.adjoint() * b)), column_residual(a - b * (b.adjoint() * a)));
}

struct Translates {
  Matrix span;                   // orthonormal, vectorized: span of alpha^t(pMp), all t
  std::vector<Matrix> operators; // alpha^t(g), g a corner generator or its adjoint
};

// Span of the translates of pMp, grown until alpha maps it into itself (or
// the horizon runs out).
Translates corner_translates(const Endomorphism& alpha, const Projection& p, int horizon,
                             const Tolerances& tol) {
  const StarAlgebra& m = alpha.algebra();
  const StarAlgebra corner = hereditary_corner(m, p, tol);
  Translates out;
  std::vector<Vector> gen_coords;
  for (const auto& g : corner.generators()) {
    gen_coords.push_back(m.coordinates(g));
    gen_coords.push_back(m.coordinates(g.adjoint()));
  }
  Matrix coords = m.basis_vectors().adjoint() * corner.basis_vectors();
  Matrix basis = orthonormal_span(coords, tol);  // in M coordinates
  Matrix frontier = basis;
  for (const auto& c : gen_coords) out.operators.push_back(m.from_coordinates(c));
  for (int t = 1; t <= horizon && frontier.cols() > 0; ++t) {
    frontier = alpha.map() * frontier;
    for (int pass = 0; pass < 2; ++pass) frontier -= basis * (basis.adjoint() * frontier);
    frontier = orthonormal_span(frontier, tol);
    if (frontier.cols() > 0) {
      frontier -= basis * (basis.adjoint() * frontier);
      Eigen::HouseholderQR<Matrix> qr(frontier);
      frontier = qr.householderQ() * Matrix::Identity(frontier.rows(), frontier.cols());
      Matrix grown(basis.rows(), basis.cols() + frontier.cols());
      grown << basis, frontier;
      basis = std::move(grown);
    }
    for (auto& c : gen_coords) {
      c = alpha.map() * c;
      out.operators.push_back(m.from_coordinates(c));
    }
  }
  out.span = m.basis_vectors() * basis;
  return out;
}

StarAlgebra m_plus_from(const Endomorphism& alpha, const Projection& p_inf, const Translates& tr,
                        const Tolerances& tol) {
  const StarAlgebra& m = alpha.algebra();
  const Eigen::Index n = m.ambient_dim();
  std::vector<Matrix> seeds;
  for (Eigen::Index k = 0; k < tr.span.cols(); ++k) seeds.push_back(unvec(tr.span.col(k), n));
  StarAlgebra mp = span_closure(seeds, n, tol);

  const Matrix in_m = m.basis_vectors().adjoint() * mp.basis_vectors();
  const Matrix moved = m.basis_vectors() * (alpha.map() * in_m);
  const double invariance = column_residual(moved - mp.basis_vectors() * (mp.basis_vectors().adjoint() * moved));
  if (invariance > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation, "M+ is not alpha-invariant (" + std::to_string(invariance) + ")");
  }
  const double unit = op_norm(mp.unit().matrix() - p_inf.matrix());
  if (unit > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation, "unit of M+ differs from p_inf (" + std::to_string(unit) + ")");
  }
  return mp;
}

Projection span_routes(const StarAlgebra& mp, const Projection& p, const Translates& tr,
                       const Tolerances& tol) {
  const Eigen::Index n = p.dim();
  const Matrix range = p.range_basis();
  Matrix cols(n, mp.dim() * range.cols());
  for (Eigen::Index k = 0; k < mp.dim(); ++k) cols.middleCols(k * range.cols(), range.cols()) = mp.element(k) * range;
  const Projection from_basis = range_projection(cols, tol);
  const Projection from_closure = Projection::from_orthonormal(invariant_closure(tr.operators, range, tol));
  const double r = op_norm(from_basis.matrix() - from_closure.matrix());
  if (r > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation,
                "[M+ pH] differs between the basis and closure routes (" + std::to_string(r) + ")");
  }
  return from_basis;
}

void require_increasing_nonzero(const Endomorphism& alpha, const Projection& p, const Tolerances& tol) {
  if (!is_increasing_projection(alpha, p, tol)) throw Error(ErrorKind::NotIncreasing, "alpha(p) >= p fails");
  if (p.is_zero()) throw Error(ErrorKind::ZeroEntry, "p = 0");
}

bool theorem_a_core(const PlusData& d, const Projection& r, const Tolerances& tol, double* residual) {
  const Endomorphism& alpha = *d.alpha;
  if (!is_increasing_projection(alpha, r, tol)) {
    throw Error(ErrorKind::NotIncreasing, "candidate r is not increasing");
  }
  if (!projection_leq(d.p, r, tol)) {
    throw Error(ErrorKind::InvalidModel, "candidate r does not dominate p");
  }
  if (!is_multiplicative_compression(alpha, r, d.horizon, tol).multiplicative) {
    throw Error(ErrorKind::MultiplicativityViolation, "compression to rMr is not multiplicative");
  }
  const double res = leq_residual(d.p_plus_factored.matrix(), r.matrix());
  if (residual) *residual = res;
  return res <= tol.eps_eq;
}

}  // namespace

LimitProjection p_infinity(const Endomorphism& alpha, const Projection& p, const Tolerances& tol) {
  if (!is_increasing_projection(alpha, p, tol)) throw Error(ErrorKind::NotIncreasing, "alpha(p) >= p fails");
  const StarAlgebra& m = alpha.algebra();
  const int cap = static_cast<int>(m.ambient_dim()) + 1;
  Vector c = m.coordinates(p.matrix());
  Projection current = p;
  for (int t = 0; t <= cap; ++t) {
    c = alpha.map() * c;
    Projection next = Projection::from_matrix(m.from_coordinates(c), tol);
    if (next.rank() == current.rank() && op_norm(next.matrix() - current.matrix()) <= tol.eps_eq) {
      const StarAlgebra tail = tail_algebra(alpha, tol);
      const double r = tail.membership_residual(current.matrix());
      if (r > tol.eps_eq) {
        throw Error(ErrorKind::InvariantViolation, "p_inf is not in the tail algebra (" + std::to_string(r) + ")");
      }
      return {current, t};
    }
    current = std::move(next);
  }
  throw Error(ErrorKind::NotStabilized, "alpha^t(p) still growing after " + std::to_string(cap) + " steps");
}

StarAlgebra tail_algebra(const Endomorphism& alpha, const Tolerances& tol) {
  const Eigen::Index d = alpha.algebra().dim();
  Matrix power = Matrix::Identity(d, d);
  Eigen::Index rank = d;
  int t = 0;
  while (t <= d) {
    const Matrix next = alpha.map() * power;
    const Eigen::Index next_rank = orthonormal_span(next, tol).cols();
    if (next_rank == rank) break;
    power = next;
    rank = next_rank;
    ++t;
  }
  return image_algebra(alpha, t, tol);
}

StarAlgebra m_plus(const Endomorphism& alpha, const Projection& p, int horizon, const Tolerances& tol) {
  const LimitProjection p_inf = p_infinity(alpha, p, tol);
  return m_plus_from(alpha, p_inf.value, corner_translates(alpha, p, horizon, tol), tol);
}

Projection p_plus_span(const Endomorphism& alpha, const Projection& p, int horizon, const Tolerances& tol) {
  const LimitProjection p_inf = p_infinity(alpha, p, tol);
  const Translates tr = corner_translates(alpha, p, horizon, tol);
  return span_routes(m_plus_from(alpha, p_inf.value, tr, tol), p, tr, tol);
}

PlusData plus_data(EndoPtr alpha, const Projection& p, int horizon, const Tolerances& tol) {
  require_increasing_nonzero(*alpha, p, tol);
  PlusData d;
  d.alpha = alpha;
  d.p = p;
  d.horizon = horizon;
  d.p_inf = p_infinity(*alpha, p, tol);
  d.family = dominating_family(alpha, p, horizon, tol);
  d.cocycle = cocycle_from_family(d.family, tol);
  d.q_inf = cocycle_limit(d.cocycle, tol);

  const Translates tr = corner_translates(*alpha, p, horizon, tol);
  d.m_plus = m_plus_from(*alpha, d.p_inf.value, tr, tol);
  d.p_plus_span = span_routes(d.m_plus, p, tr, tol);

  const Matrix& pi = d.p_inf.value.matrix();
  const Matrix& qi = d.q_inf.limit.matrix();
  const double comm = op_norm(commutator(pi, qi));
  if (comm > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation, "p_inf and q_inf do not commute (" + std::to_string(comm) + ")");
  }
  d.p_plus_factored = Projection::from_matrix(pi * qi, tol);
  d.agreement_residual = op_norm(d.p_plus_factored.matrix() - d.p_plus_span.matrix());
  if (d.agreement_residual > tol.eps_eq) {
    throw Error(ErrorKind::FactorizationMismatch,
                "p_inf q_inf differs from [M+ pH] by " + std::to_string(d.agreement_residual));
  }
  return d;
}

Projection p_plus_factored(EndoPtr alpha, const Projection& p, int horizon, const Tolerances& tol) {
  return plus_data(std::move(alpha), p, horizon, tol).p_plus_factored;
}

bool theorem_a_check(const PlusData& d, const Projection& r, const Tolerances& tol) {
  const bool holds = theorem_a_core(d, r, tol, nullptr);
  const Endomorphism& alpha = *d.alpha;
  if (!is_increasing_projection(alpha, d.p_plus_factored, tol) ||
      !is_multiplicative_compression(alpha, d.p_plus_factored, d.horizon, tol).multiplicative) {
    throw Error(ErrorKind::InvariantViolation, "p+ is not an increasing projection with multiplicative compression");
  }
  return holds;
}

CheckResult lemma_3_9_check(const PlusData& d, const Tolerances& tol) {
  const Endomorphism& alpha = *d.alpha;
  const StarAlgebra& m = alpha.algebra();
  const Matrix& pp = d.p_plus_factored.matrix();
  CheckResult out;
  Vector c = m.coordinates(pp);
  for (int t = 1; t <= d.horizon; ++t) {
    c = alpha.map() * c;
    const Matrix moved = m.from_coordinates(c);
    const Matrix fx = d.family.at(t).matrix() * moved;
    const Matrix qx = d.cocycle.at(t).matrix() * moved;
    out.residual = std::max({out.residual, op_norm(fx - pp * fx), op_norm(qx - pp * qx)});
  }
  out.ok = out.residual <= tol.eps_eq;
  return out;
}

CheckResult prop_3_14_check(const PlusData& d, const Tolerances& tol) {
  const StarAlgebra& m = d.alpha->algebra();
  const StarAlgebra& mp = d.m_plus;
  const Matrix& pp = d.p_plus_factored.matrix();
  const Eigen::Index n = m.ambient_dim();
  CheckResult out;

  // (a) central in M+
  out.residual = mp.membership_residual(pp);
  for (Eigen::Index k = 0; k < mp.dim(); ++k) out.residual = std::max(out.residual, op_norm(commutator(pp, mp.element(k))));

  // (b) smallest central projection of M+ above p
  try {
    const Projection z = central_carrier(mp, d.p, tol);
    out.residual = std::max(out.residual, op_norm(z.matrix() - pp));
  } catch (const Error&) {
    out.ok = false;
    return out;
  }

  // (c) p+ M p+ = M+ p+ as subspaces
  const StarAlgebra corner = hereditary_corner(m, d.p_plus_factored, tol);
  Matrix ideal(n * n, mp.dim());
  for (Eigen::Index k = 0; k < mp.dim(); ++k) ideal.col(k) = vec(mp.element(k) * pp);
  out.residual = std::max(out.residual, subspace_distance(corner.basis_vectors(), orthonormal_span(ideal, tol)));

  out.ok = out.residual <= tol.eps_eq;
  return out;
}

std::vector<Projection> theorem_a_candidates(const PlusData& d, const Tolerances& tol) {
  const Endomorphism& alpha = *d.alpha;
  const StarAlgebra& m = alpha.algebra();
  const bool small = m.ambient_dim() <= 12;
  std::vector<Projection> raw;
  raw.push_back(m.unit());
  raw.push_back(d.p_plus_factored);
  raw.push_back(d.p_inf.value);
  raw.push_back(Projection::from_matrix(alpha.apply(d.p_plus_factored.matrix()), tol));
  if (small) {
    raw.push_back(Projection::from_matrix(alpha.apply_power(d.p_plus_factored.matrix(), 2), tol));
    raw.push_back(central_carrier(m, d.p, tol));
    const StarAlgebra z = center(m, tol);
    if (z.dim() <= 6) {
      for (const auto& c : all_projections_abelian(z, tol)) {
        raw.push_back(projection_join(d.p_plus_factored, c, tol));
        raw.push_back(projection_join(d.p_inf.value, c, tol));
      }
    }
  }
  std::vector<Projection> out;
  for (auto& r : raw) {
    if (!m.contains(r.matrix(), tol)) continue;
    bool seen = false;
    for (const auto& o : out) seen = seen || projection_equal(o, r, tol);
    if (seen) continue;
    if (!projection_leq(d.p, r, tol) || !is_increasing_projection(alpha, r, tol)) continue;
    if (!is_multiplicative_compression(alpha, r, d.horizon, tol).multiplicative) continue;
    out.push_back(std::move(r));
  }
  return out;
}

MinimalityReport theorem_b_verdict(EndoPtr alpha, const Projection& p, int horizon, const Tolerances& tol) {
  const PlusData d = plus_data(alpha, p, horizon, tol);
  const StarAlgebra& m = alpha->algebra();
  const Projection& unit = m.unit();
  MinimalityReport rep;
  rep.p = p;
  rep.p_infinity = d.p_inf.value;
  rep.q_infinity = d.q_inf.limit;
  rep.p_plus_span = d.p_plus_span;
  rep.p_plus_factored = d.p_plus_factored;
  rep.agreement_residual = d.agreement_residual;
  rep.m_plus_dim = static_cast<int>(d.m_plus.dim());
  rep.m_dim = static_cast<int>(m.dim());
  rep.ambient_dim = static_cast<int>(m.ambient_dim());
  rep.horizon = horizon;
  rep.p_inf_stabilized_at = d.p_inf.stabilized_at;
  rep.q_inf_stabilized_at = d.q_inf.stabilized_at;
  rep.is_factor = is_factor(m, tol);
  for (const auto& q : d.cocycle.entries()) rep.cocycle_ranks.push_back(q.rank());

  rep.minimal = projection_equal(d.p_plus_factored, unit, tol);
  rep.spans = d.p_plus_span.rank() == unit.rank();
  rep.generates = same_subspace(d.m_plus, m, tol);
  rep.trivial_limits = projection_equal(d.p_inf.value, unit, tol) && projection_equal(d.q_inf.limit, unit, tol);

  auto record = [&](std::string name, double residual, bool passed) {
    rep.invariants.push_back({std::move(name), passed, residual});
  };
  record("p_plus_agreement", d.agreement_residual, d.agreement_residual <= tol.eps_eq);
  const double dom = leq_residual(p.matrix(), d.p_plus_factored.matrix());
  record("p_plus_dominates_p", dom, dom <= tol.eps_eq);
  const double inc = leq_residual(d.p_plus_factored.matrix(), alpha->apply(d.p_plus_factored.matrix()));
  record("p_plus_increasing", inc, inc <= tol.eps_eq);
  if (inc <= tol.eps_eq) {
    const auto mv = is_multiplicative_compression(*alpha, d.p_plus_factored, horizon, tol);
    record("p_plus_multiplicative", std::max(mv.commutation_residual, mv.product_residual), mv.multiplicative);
  }

  // q_inf commutes with every translate of pMp, and lies in M ∩ (tail)'.
  {
    const Translates tr = corner_translates(*alpha, p, horizon, tol);
    const double c = commutation_residual(d.q_inf.limit.matrix(), tr.operators);
    record("q_inf_commutes_with_translates", c, c <= tol.eps_eq);
    const StarAlgebra tail = tail_algebra(*alpha, tol);
    double t = m.membership_residual(d.q_inf.limit.matrix());
    for (Eigen::Index k = 0; k < tail.dim(); ++k)
      t = std::max(t, commutator(d.q_inf.limit.matrix(), tail.element(k)).norm());
    record("q_inf_in_tail_commutant", t, t <= tol.eps_eq);
  }
  {
    double dec = 0.0;
    for (int t = 1; t < d.cocycle.horizon(); ++t)
      dec = std::max(dec, leq_residual(d.cocycle.at(t + 1).matrix(), d.cocycle.at(t).matrix()));
    record("cocycle_decreasing", dec, dec <= tol.eps_eq);
    (void)associated_semigroup(d.cocycle, tol);
    record("associated_semigroup", 0.0, true);
  }
  const CheckResult l39 = lemma_3_9_check(d, tol);
  record("translates_below_p_plus", l39.residual, l39.ok);
  const CheckResult p314 = prop_3_14_check(d, tol);
  record("p_plus_central_carrier", p314.residual, p314.ok);

  {
    const auto cands = theorem_a_candidates(d, tol);
    double worst = 0.0;
    bool all = true;
    for (const auto& r : cands) {
      double res = 0.0;
      all = theorem_a_core(d, r, tol, &res) && all;
      worst = std::max(worst, res);
    }
    rep.theorem_a_candidates = static_cast<int>(cands.size());
    record("p_plus_below_candidates", worst, all);
  }

  if (!rep.minimal) {
    rep.witnesses.push_back("p+ has rank " + std::to_string(d.p_plus_factored.rank()) + " below the unit rank " +
                            std::to_string(unit.rank()));
  }
  if (!rep.generates) {
    rep.witnesses.push_back("M+ has dimension " + std::to_string(rep.m_plus_dim) + " < " + std::to_string(rep.m_dim));
  }
  if (!rep.is_factor) {
    rep.witnesses.push_back("center of M has dimension " + std::to_string(center(m, tol).dim()));
  }

  // Implications valid for every M, then the factor case.
  bool consistent = rep.minimal == rep.spans && rep.minimal == rep.trivial_limits &&
                    (!rep.minimal || rep.generates);
  if (rep.is_factor) consistent = consistent && rep.generates == rep.minimal;
  record("verdicts_consistent", 0.0, consistent);
  if (!consistent) {
    throw Error(ErrorKind::InvariantViolation,
                "minimality verdicts disagree (minimal=" + std::to_string(rep.minimal) +
                    ", spans=" + std::to_string(rep.spans) + ", generates=" + std::to_string(rep.generates) +
                    ", trivial_limits=" + std::to_string(rep.trivial_limits) + ")");
  }
  return rep;
}

}  // namespace e0
