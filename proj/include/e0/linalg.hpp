#pragma once

// Dense complex linear algebra with one explicit tolerance policy.
//
// Everything above this layer is exact algebra modulo two numbers: a relative
// cutoff for rank decisions (eps_rank) and an operator-norm threshold for
// equality and order assertions (eps_eq). Rank is always decided from the
// eigenvalues of a Gram or Hermitian matrix.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "e0/errors.hpp"

namespace e0 {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Tolerances {
  double eps_rank = 1e-9;
  double eps_eq = 1e-8;

  /// Throws InvalidModel unless 0 < eps_rank <= eps_eq < 1.
  void validate() const;
};

/// Largest singular value.
double op_norm(const Matrix& a);

bool all_finite(const Matrix& a);

/// Trace inner product tr(b* a); linear in the first argument.
cplx hs_inner(const Matrix& a, const Matrix& b);

struct HermitianEig {
  Eigen::VectorXd values;  // descending
  Matrix vectors;          // orthonormal columns, matching order
};

/// Throws NotHermitian if ||a - a*|| > eps_eq.
HermitianEig hermitian_eig(const Matrix& a, const Tolerances& tol = {});

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-major vectorization and its inverse.
Vector vec(const Matrix& a);
Matrix unvec(const Eigen::Ref<const Vector>& v, Eigen::Index n);

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Orthonormal basis for the span of the columns of x. Columns are kept when
/// their Gram eigenvalue exceeds eps_rank * max(largest eigenvalue, 1); the
/// floor keeps roundoff-level inputs from being promoted to directions.
Matrix orthonormal_span(const Matrix& x, const Tolerances& tol);

/// Hermitian idempotent with a cached rank (number of eigenvalues above 1/2).
class Projection {
 public:
  Projection() = default;

  /// Validates ||P - P*|| <= eps_eq and ||P^2 - P|| <= eps_eq, then stores the
  /// spectral projection onto eigenvalues > 1/2.
  static Projection from_matrix(const Matrix& m, const Tolerances& tol);
  /// Projection onto the span of orthonormal columns.
  static Projection from_orthonormal(const Matrix& q);
  static Projection zero(Eigen::Index n);
  static Projection identity(Eigen::Index n);

  const Matrix& matrix() const { return m_; }
  int rank() const { return rank_; }
  Eigen::Index dim() const { return m_.rows(); }
  bool is_zero() const { return rank_ == 0; }

  /// Orthonormal basis of the range.
  Matrix range_basis() const;

 private:
  Projection(Matrix m, int rank) : m_(std::move(m)), rank_(rank) {}

  Matrix m_;
  int rank_ = 0;
};

/// Orthogonal projection onto the span of the columns of `columns`.
Projection range_projection(const Matrix& columns, const Tolerances& tol);

/// Projection onto the span of all columns of all inputs (each N x k).
/// Empty input yields the zero projection of dimension `n`.
Projection range_projection(std::span<const Matrix> vectors, Eigen::Index n,
                            const Tolerances& tol);

/// ||p - q p||: zero iff range(p) is contained in range(q).
double leq_residual(const Matrix& p, const Matrix& q);

bool projection_leq(const Projection& p, const Projection& q, const Tolerances& tol);
bool projection_equal(const Projection& p, const Projection& q, const Tolerances& tol);

Projection projection_meet(const Projection& p, const Projection& q, const Tolerances& tol);
Projection projection_join(const Projection& p, const Projection& q, const Tolerances& tol);

void require_same_dim(const Matrix& a, const Matrix& b, const char* where);

}  // namespace e0
