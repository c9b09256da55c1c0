#pragma once

// Discrete-time E0-semigroups {alpha^t : t = 0, 1, 2, ...} on a StarAlgebra,
// increasing projections, and compressions to hereditary corners.

#include <functional>
#include <optional>

#include "e0/algebra.hpp"

namespace e0 {

/// A validated unital *-endomorphism, stored as a dim x dim matrix in the
/// algebra's orthonormal basis: alpha(b_j) = sum_i map(i, j) b_i.
class Endomorphism {
 public:
  Endomorphism() = default;

  /// Checks unitality, multiplicativity and adjoint preservation. Throws
  /// UnitalityViolation, MultiplicativityViolation (with the witnessing pair)
  /// or AdjointViolation.
  static Endomorphism validate(AlgebraPtr algebra, Matrix map, const Tolerances& tol);

  /// Tabulates `f` on the basis of `algebra`, then validates.
  static Endomorphism from_function(AlgebraPtr algebra,
                                    const std::function<Matrix(const Matrix&)>& f,
                                    const Tolerances& tol);

  const StarAlgebra& algebra() const { return *algebra_; }
  const AlgebraPtr& algebra_ptr() const { return algebra_; }
  const Matrix& map() const { return map_; }

  /// alpha(x) for x in M (x is projected onto M first).
  Matrix apply(const Matrix& x) const;
  Matrix apply_power(const Matrix& x, int t) const;

  /// Coordinate matrix of alpha^t; power(0) is the identity.
  Matrix power(int t) const;

 private:
  AlgebraPtr algebra_;
  Matrix map_;
};

struct EndomorphismResiduals {
  double unital = 0.0;
  double multiplicative = 0.0;
  double adjoint = 0.0;
};

/// Residuals of a coordinate map against the three endomorphism laws.
/// Multiplicativity is evaluated on (generator, basis) pairs: if
/// a(gb) = a(g)a(b) for every generator g, induction on word length gives it
/// for every pair of elements.
EndomorphismResiduals endomorphism_residuals(const StarAlgebra& m, const Matrix& map);

/// Unital CP semigroup on a corner pMp, phi_t(a) = p alpha^t(a) p, stored as
/// coordinate matrices in the corner's basis for t = 0..horizon.
struct CPSemigroup {
  AlgebraPtr corner;
  Projection p;
  std::vector<Matrix> maps;

  int horizon() const { return static_cast<int>(maps.size()) - 1; }
  Matrix apply(int t, const Matrix& a) const;
};

int default_horizon(const StarAlgebra& m);

void require_projection_in(const StarAlgebra& m, const Projection& p, const Tolerances& tol);

/// alpha(p) >= p. Throws NotMember when p is not in M.
bool is_increasing_projection(const Endomorphism& alpha, const Projection& p, const Tolerances& tol);
/// ||alpha(p) - p|| <= eps_eq.
bool is_fixed_projection(const Endomorphism& alpha, const Projection& p, const Tolerances& tol);

/// Compression to pMp. Throws NotIncreasing; verifies unitality, complete
/// positivity (Choi blocks over matrix units of the corner) and the semigroup law.
CPSemigroup compress(const Endomorphism& alpha, const Projection& p, int horizon,
                     const Tolerances& tol);

struct MultiplicativityVerdict {
  bool multiplicative = false;
  double commutation_residual = 0.0;  // max ||[p, alpha^t(a)]||
  double product_residual = 0.0;      // max ||phi_t(ab) - phi_t(a) phi_t(b)||
  int witness_t = -1;
  int witness_index = -1;  // corner generator index of the largest commutator
};

/// Both criteria for a multiplicative compression: p commuting with
/// alpha^t(pMp), and phi_t(ab) = phi_t(a)phi_t(b). Throws InvariantViolation
/// if they disagree, NotIncreasing if p is not increasing.
MultiplicativityVerdict is_multiplicative_compression(const Endomorphism& alpha,
                                                      const Projection& p, int horizon,
                                                      const Tolerances& tol);

/// Orthonormal basis of alpha^t(M) (already a *-subalgebra).
StarAlgebra image_algebra(const Endomorphism& alpha, int t, const Tolerances& tol);

/// orbit[t] = {alpha^t(g)} for the generators g of M and their adjoints,
/// t = 0..horizon. Words in orbit[t] span alpha^t(M).
std::vector<std::vector<Matrix>> generator_orbit(const Endomorphism& alpha, int horizon);

/// max_k ||[x, ops_k]|| (Frobenius).
double commutation_residual(const Matrix& x, std::span<const Matrix> ops);

/// Orthonormal basis of the smallest subspace containing the columns of
/// `start` and invariant under every operator in `ops`.
Matrix invariant_closure(std::span<const Matrix> ops, const Matrix& start, const Tolerances& tol);

}  // namespace e0
