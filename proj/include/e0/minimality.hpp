#pragma once

// The minimality projection p+ of an increasing projection p: computed once
// as the range of M+ pH (M+ generated by the translates of pMp) and once as
// the product p_inf q_inf, plus the checks built on it.

#include <string>

#include "e0/cocycles.hpp"

namespace e0 {

struct LimitProjection {
  Projection value;
  int stabilized_at = 0;
};

/// lim alpha^t(p). Verified fixed by alpha and inside the tail algebra.
LimitProjection p_infinity(const Endomorphism& alpha, const Projection& p, const Tolerances& tol);

/// alpha^T(M) at the first T where its dimension stops decreasing.
StarAlgebra tail_algebra(const Endomorphism& alpha, const Tolerances& tol);

/// Generated by alpha^t(pMp), 0 <= t <= horizon. Verified alpha-invariant with unit p_inf.
StarAlgebra m_plus(const Endomorphism& alpha, const Projection& p, int horizon, const Tolerances& tol);

/// [M+ pH], computed from a basis of M+ and again as the smallest subspace
/// containing pH invariant under the translates; the two must agree.
Projection p_plus_span(const Endomorphism& alpha, const Projection& p, int horizon,
                       const Tolerances& tol);

/// Everything derived from (alpha, p) that the checks share.
struct PlusData {
  EndoPtr alpha;
  Projection p;
  int horizon = 0;
  LimitProjection p_inf;
  DominatingFamily family;
  ProjectiveCocycle cocycle;
  CocycleLimit q_inf;
  StarAlgebra m_plus;
  Projection p_plus_span;
  Projection p_plus_factored;
  double agreement_residual = 0.0;
};

/// Throws FactorizationMismatch when the two routes to p+ disagree.
PlusData plus_data(EndoPtr alpha, const Projection& p, int horizon, const Tolerances& tol);

/// p_inf q_inf, checked against p_plus_span.
Projection p_plus_factored(EndoPtr alpha, const Projection& p, int horizon, const Tolerances& tol);

struct CheckResult {
  bool ok = true;
  double residual = 0.0;
};

/// p+ <= r for an increasing r >= p with multiplicative compression. Also
/// verifies p+ is itself increasing and multiplicative. Throws NotIncreasing,
/// InvalidModel (r does not dominate p) or MultiplicativityViolation when r
/// fails a precondition.
bool theorem_a_check(const PlusData& d, const Projection& r, const Tolerances& tol);

/// f_t alpha^t(p+) <= p+ and q_t alpha^t(p+) <= p+ for t <= horizon.
CheckResult lemma_3_9_check(const PlusData& d, const Tolerances& tol);

/// p+ central in M+, p+ the central carrier of p in M+, and p+ M p+ = M+ p+.
CheckResult prop_3_14_check(const PlusData& d, const Tolerances& tol);

/// Increasing projections r >= p with multiplicative compression, built from
/// the unit, p+, translates of p+, and joins with central projections of M.
std::vector<Projection> theorem_a_candidates(const PlusData& d, const Tolerances& tol);

struct InvariantRecord {
  std::string name;
  bool passed = true;
  double residual = 0.0;
};

struct MinimalityReport {
  Projection p;
  Projection p_infinity;
  Projection q_infinity;
  Projection p_plus_span;
  Projection p_plus_factored;
  double agreement_residual = 0.0;
  int m_plus_dim = 0;
  int m_dim = 0;
  int ambient_dim = 0;
  int horizon = 0;
  int p_inf_stabilized_at = 0;
  int q_inf_stabilized_at = 0;
  bool is_factor = false;
  bool minimal = false;          // p+ is the unit
  bool spans = false;            // rank [M+ pH] = rank of the unit
  bool generates = false;        // M+ = M
  bool trivial_limits = false;   // p_inf and q_inf both the unit
  std::vector<int> cocycle_ranks;
  int theorem_a_candidates = 0;
  std::vector<InvariantRecord> invariants;
  std::vector<std::string> witnesses;
};

/// Builds the full report. Throws InvariantViolation when an implication
/// that must hold fails (all three verdicts agree on factors; minimal implies
/// generates and trivial limits everywhere).
MinimalityReport theorem_b_verdict(EndoPtr alpha, const Projection& p, int horizon,
                                   const Tolerances& tol);

}  // namespace e0
