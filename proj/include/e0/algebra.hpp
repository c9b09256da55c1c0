#pragma once

// Finite-dimensional *-algebras realized as operator subspaces of M_N.
//
// A StarAlgebra stores an orthonormal basis (trace inner product) as the
// columns of an N^2 x dim matrix of vectorized elements, plus a list of
// generators whose words span the algebra. Every closed *-subalgebra of M_N
// is weakly closed and has a unit (its support projection), so normality and
// von Neumann closure need no separate treatment here.

#include <memory>
#include <span>
#include <vector>

#include "e0/linalg.hpp"

namespace e0 {

class StarAlgebra {
 public:
  StarAlgebra() = default;

  /// Builds from orthonormal vectorized basis columns. `generators` may be
  /// empty, in which case the basis itself is used. The unit is computed as
  /// the support projection and must belong to the algebra.
  static StarAlgebra from_basis(Eigen::Index n, Matrix basis, std::vector<Matrix> generators,
                                const Tolerances& tol);

  Eigen::Index ambient_dim() const { return n_; }
  Eigen::Index dim() const { return basis_.cols(); }

  /// k-th orthonormal basis element as an N x N matrix.
  Matrix element(Eigen::Index k) const { return unvec(basis_.col(k), n_); }
  std::vector<Matrix> elements() const;
  const Matrix& basis_vectors() const { return basis_; }

  /// A set whose words (products) span the algebra.
  const std::vector<Matrix>& generators() const { return generators_; }

  const Projection& unit() const { return unit_; }
  /// True when the unit is the identity of C^N.
  bool unital_in_ambient() const { return unit_.rank() == n_; }

  Vector coordinates(const Matrix& x) const;
  Matrix from_coordinates(const Eigen::Ref<const Vector>& c) const;
  /// Trace-inner-product orthogonal projection onto the algebra.
  Matrix project(const Matrix& x) const;
  /// ||x - project(x)|| in operator norm.
  double membership_residual(const Matrix& x) const;
  bool contains(const Matrix& x, const Tolerances& tol) const;

 private:
  Eigen::Index n_ = 0;
  Matrix basis_;
  std::vector<Matrix> generators_;
  Projection unit_;
};

using AlgebraPtr = std::shared_ptr<const StarAlgebra>;

/// Orthonormal (vectorized) basis of the span of the given N x N matrices.
Matrix span_basis(std::span<const Matrix> elements, Eigen::Index n, const Tolerances& tol);

/// Smallest *-algebra containing the generators: words in generators and
/// their adjoints, grown until the dimension stops increasing.
StarAlgebra span_closure(std::span<const Matrix> generators, Eigen::Index n,
                         const Tolerances& tol);

StarAlgebra full_algebra(Eigen::Index n, const Tolerances& tol = {});
StarAlgebra scalar_algebra(Eigen::Index n, const Tolerances& tol = {});
/// Block-diagonal direct sum of full matrix blocks, in order along the diagonal.
StarAlgebra block_algebra(std::span<const int> block_sizes, const Tolerances& tol = {});

/// Matrix unit e_{ij} of M_n.
Matrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j);

/// Commutant in M_N of the given operators.
StarAlgebra commutant(std::span<const Matrix> operators, Eigen::Index n, const Tolerances& tol);
StarAlgebra commutant(const StarAlgebra& s, const Tolerances& tol);

/// Subspace containment and equality of algebras.
double containment_residual(const StarAlgebra& big, const StarAlgebra& small);
bool contains_subspace(const StarAlgebra& big, const StarAlgebra& small, const Tolerances& tol);
bool same_subspace(const StarAlgebra& a, const StarAlgebra& b, const Tolerances& tol);

/// Largest ||b_i b_j - P(b_i b_j)|| and ||b_i* - P(b_i*)|| over generator/basis pairs.
double closure_residual(const StarAlgebra& s);

/// commutant(commutant(S)) == S.
bool bicommutant_check(const StarAlgebra& s, const Tolerances& tol);

/// Elements of S commuting with every operator in `ops` (S ∩ ops').
StarAlgebra relative_commutant(const StarAlgebra& s, std::span<const Matrix> ops,
                               const Tolerances& tol);

/// Elements of S commuting with all of S.
StarAlgebra center(const StarAlgebra& s, const Tolerances& tol);

bool is_factor(const StarAlgebra& s, const Tolerances& tol);

/// Minimal projections of an abelian algebra (mutually orthogonal, summing to its unit).
std::vector<Projection> minimal_projections_abelian(const StarAlgebra& s, const Tolerances& tol);

/// Every projection of an abelian algebra: sums over subsets of its minimal projections.
std::vector<Projection> all_projections_abelian(const StarAlgebra& s, const Tolerances& tol);

/// Wedderburn data for one simple summand: its minimal central projection and a
/// full system of matrix units {e_ij} inside S.
struct SimpleSummand {
  Projection central;
  std::vector<std::vector<Matrix>> units;  // units[i][j] = e_ij
  int size() const { return static_cast<int>(units.size()); }
};

std::vector<SimpleSummand> wedderburn_decomposition(const StarAlgebra& s, const Tolerances& tol);

/// Smallest projection in the center of S dominating p. Computed as the range
/// of S p C^N and cross-checked against minimal central projections.
Projection central_carrier(const StarAlgebra& s, const Projection& p, const Tolerances& tol);

/// pSp with unit p. Throws NotMember when p is not in S.
StarAlgebra hereditary_corner(const StarAlgebra& s, const Projection& p, const Tolerances& tol);

/// E(x) = p x p for x in M, p in M.
Matrix conditional_expectation(const StarAlgebra& m, const Projection& p, const Matrix& x,
                               const Tolerances& tol);

/// Smallest projection of B dominating e, computed as [B' e C^N] and then
/// checked to lie in B and dominate e.
Projection smallest_dominating_projection(const StarAlgebra& b, const Projection& e,
                                          const Tolerances& tol);

void require_member(const StarAlgebra& s, const Matrix& x, const Tolerances& tol,
                    const char* what);

}  // namespace e0
