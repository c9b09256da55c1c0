#pragma once

// Projective cocycles {q_t} for an E0-semigroup: q_t in M ∩ alpha^t(M)',
// q_{s+t} = q_s alpha^s(q_t), and dominating families {f_t} satisfying the
// weaker inequality f_{s+t} <= f_s alpha^s(f_t).

#include <memory>

#include "e0/dynamics.hpp"

namespace e0 {

using EndoPtr = std::shared_ptr<const Endomorphism>;

/// q_1..q_T. q_0 is the unit of M and is not stored.
class ProjectiveCocycle {
 public:
  ProjectiveCocycle() = default;
  ProjectiveCocycle(EndoPtr alpha, std::vector<Projection> entries)
      : alpha_(std::move(alpha)), entries_(std::move(entries)) {}

  const Endomorphism& alpha() const { return *alpha_; }
  const EndoPtr& alpha_ptr() const { return alpha_; }
  int horizon() const { return static_cast<int>(entries_.size()); }
  /// q_t for 0 <= t <= horizon.
  const Projection& at(int t) const;
  const std::vector<Projection>& entries() const { return entries_; }

 private:
  EndoPtr alpha_;
  std::vector<Projection> entries_;
};

/// f_1..f_T.
class DominatingFamily {
 public:
  DominatingFamily() = default;
  DominatingFamily(EndoPtr alpha, std::vector<Projection> entries)
      : alpha_(std::move(alpha)), entries_(std::move(entries)) {}

  const Endomorphism& alpha() const { return *alpha_; }
  const EndoPtr& alpha_ptr() const { return alpha_; }
  int horizon() const { return static_cast<int>(entries_.size()); }
  const Projection& at(int t) const;
  const std::vector<Projection>& entries() const { return entries_; }

 private:
  EndoPtr alpha_;
  std::vector<Projection> entries_;
};

/// Throws ZeroEntry, NotMember, CommutationViolation or
/// CocycleIdentityViolation (naming s and t).
ProjectiveCocycle validate_cocycle(EndoPtr alpha, std::vector<Projection> entries,
                                   const Tolerances& tol);

/// Membership, commutation with alpha^t(M) and f_{s+t} <= f_s alpha^s(f_t).
/// Throws NotMember, CommutationViolation or InvariantViolation.
DominatingFamily validate_family(EndoPtr alpha, std::vector<Projection> entries,
                                 const Tolerances& tol);

/// q_t <= r_t for every t up to the shorter horizon.
bool cocycle_leq(const ProjectiveCocycle& q, const ProjectiveCocycle& r, const Tolerances& tol);

/// f_{t_1} alpha^{t_1}(f_{t_2 - t_1}) ... alpha^{t_{k-1}}(f_{t_k - t_{k-1}}) for
/// 0 < t_1 < ... < t_k.
Projection partition_product(const DominatingFamily& f, std::span<const int> points,
                             const Tolerances& tol);

/// Smallest cocycle dominating f: q_t is the product over the finest
/// partition {1, ..., t}. Coarser partitions are checked to dominate it.
ProjectiveCocycle cocycle_from_family(const DominatingFamily& f, const Tolerances& tol);

/// f_t = [alpha^t(M) e C^N], the smallest projection of M ∩ alpha^t(M)'
/// dominating e.
DominatingFamily dominating_family(EndoPtr alpha, const Projection& e, int horizon,
                                   const Tolerances& tol);

/// The minimal cocycle whose entries dominate e.
ProjectiveCocycle minimal_cocycle_over(EndoPtr alpha, const Projection& e, int horizon,
                                       const Tolerances& tol);

struct CocycleLimit {
  Projection limit;
  int stabilized_at = 0;      // first t with q_u = q_T for t <= u <= T
  double fixed_residual = 0;  // max ||q_t alpha^t(q_inf) - q_inf||
};

/// The decreasing limit, once q_t is constant on [t*, T] with t* < T.
/// Throws NotStabilized otherwise; InvariantViolation if q_t alpha^t(q_inf)
/// differs from q_inf.
CocycleLimit cocycle_limit(const ProjectiveCocycle& q, const Tolerances& tol);

/// beta_t(a) = q_t alpha^t(a), non-unital endomorphisms with beta_t(1) = q_t.
struct AssociatedSemigroup {
  ProjectiveCocycle cocycle;
  int horizon() const { return cocycle.horizon(); }
  Matrix apply(int t, const Matrix& x) const;
  /// Coordinate matrix of beta_t on M.
  Matrix map(int t) const;
};

/// Verifies beta_t(1) = q_t, multiplicativity and the semigroup law. Small
/// models compare coordinate matrices over all pairs; larger ones use
/// q_t commuting with alpha^t(M) for multiplicativity and
/// beta_{t+1} = beta_1 beta_t on generators, which gives every pair.
AssociatedSemigroup associated_semigroup(const ProjectiveCocycle& q, const Tolerances& tol);

}  // namespace e0
