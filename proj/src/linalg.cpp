#include "e0/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace e0 {

void Tolerances::validate() const {
  if (!(eps_rank > 0.0 && eps_rank <= eps_eq && eps_eq < 1.0)) {
    throw Error(ErrorKind::InvalidModel,
                "tolerances must satisfy 0 < eps_rank <= eps_eq < 1 (got eps_rank=" +
                    std::to_string(eps_rank) + ", eps_eq=" + std::to_string(eps_eq) + ")");
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(where) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

cplx hs_inner(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "hs_inner");
  return (b.adjoint() * a).trace();
}

HermitianEig hermitian_eig(const Matrix& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "hermitian_eig: not square");
  const double skew = op_norm(a - a.adjoint());
  if (skew > tol.eps_eq) {
    throw Error(ErrorKind::NotHermitian, "||A - A*|| = " + std::to_string(skew));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()));
  HermitianEig out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

Matrix unvec(const Eigen::Ref<const Vector>& v, Eigen::Index n) {
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = v.segment(j * n, n);
  return out;
}

namespace {

Matrix thin_q(const Matrix& b) {
  if (b.cols() == 0) return b;
  Eigen::HouseholderQR<Matrix> qr(b);
  return qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
}

}  // namespace

Matrix orthonormal_span(const Matrix& x, const Tolerances& tol) {
  const Eigen::Index n = x.rows();
  if (x.cols() == 0 || n == 0) return Matrix(n, 0);
  if (x.cols() >= n) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x * x.adjoint());
    const auto& vals = es.eigenvalues();  // ascending
    const double cutoff = tol.eps_rank * std::max(vals(n - 1), 1.0);
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (vals(i) > cutoff) ++keep;
    return es.eigenvectors().rightCols(keep).rowwise().reverse();
  }
  const Eigen::Index k = x.cols();
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.adjoint() * x);
  const auto& vals = es.eigenvalues();
  const double cutoff = tol.eps_rank * std::max(vals(k - 1), 1.0);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = k - 1; i >= 0; --i)
    if (vals(i) > cutoff) kept.push_back(i);
  Matrix b(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c)
    b.col(static_cast<Eigen::Index>(c)) = x * es.eigenvectors().col(kept[c]) / std::sqrt(vals(kept[c]));
  // The Gram route loses orthogonality for small eigenvalues; QR restores it
  // without changing the span.
  return thin_q(b);
}

Projection Projection::from_matrix(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "projection must be square");
  if (!m.allFinite()) throw Error(ErrorKind::NotAProjection, "non-finite entries");
  const double herm = op_norm(m - m.adjoint());
  const double idem = op_norm(m * m - m);
  if (herm > tol.eps_eq || idem > tol.eps_eq) {
    throw Error(ErrorKind::NotAProjection, "||P-P*|| = " + std::to_string(herm) +
                                               ", ||P^2-P|| = " + std::to_string(idem));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = m.rows() - 1; i >= 0; --i)
    if (es.eigenvalues()(i) > 0.5) kept.push_back(i);
  Matrix q(m.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c)
    q.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(kept[c]);
  return from_orthonormal(q);
}

Projection Projection::from_orthonormal(const Matrix& q) {
  return Projection(q * q.adjoint(), static_cast<int>(q.cols()));
}

Projection Projection::zero(Eigen::Index n) { return Projection(Matrix::Zero(n, n), 0); }

Projection Projection::identity(Eigen::Index n) {
  return Projection(Matrix::Identity(n, n), static_cast<int>(n));
}

Matrix Projection::range_basis() const {
  if (rank_ == 0) return Matrix(m_.rows(), 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_);
  return es.eigenvectors().rightCols(rank_);
}

Projection range_projection(const Matrix& columns, const Tolerances& tol) {
  return Projection::from_orthonormal(orthonormal_span(columns, tol));
}

Projection range_projection(std::span<const Matrix> vectors, Eigen::Index n,
                            const Tolerances& tol) {
  Eigen::Index total = 0;
  for (const auto& v : vectors) {
    if (v.rows() != n) throw Error(ErrorKind::DimensionMismatch, "range_projection: ambient dimension");
    total += v.cols();
  }
  Matrix all(n, total);
  Eigen::Index at = 0;
  for (const auto& v : vectors) {
    all.middleCols(at, v.cols()) = v;
    at += v.cols();
  }
  return range_projection(all, tol);
}

double leq_residual(const Matrix& p, const Matrix& q) {
  require_same_dim(p, q, "projection order");
  return op_norm(p - q * p);
}

bool projection_leq(const Projection& p, const Projection& q, const Tolerances& tol) {
  return leq_residual(p.matrix(), q.matrix()) <= tol.eps_eq;
}

bool projection_equal(const Projection& p, const Projection& q, const Tolerances& tol) {
  require_same_dim(p.matrix(), q.matrix(), "projection equality");
  return op_norm(p.matrix() - q.matrix()) <= tol.eps_eq;
}

Projection projection_meet(const Projection& p, const Projection& q, const Tolerances& tol) {
  require_same_dim(p.matrix(), q.matrix(), "projection_meet");
  const Eigen::Index n = p.dim();
  // range(p) ∩ range(q) = ker((1-p) + (1-q)); the sum is PSD with eigenvalues in [0, 2].
  const Matrix id = Matrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es((id - p.matrix()) + (id - q.matrix()));
  const double cutoff = tol.eps_rank * std::max(es.eigenvalues()(n - 1), 1.0);
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (es.eigenvalues()(i) <= cutoff) ++keep;
  return Projection::from_orthonormal(es.eigenvectors().leftCols(keep));
}

Projection projection_join(const Projection& p, const Projection& q, const Tolerances& tol) {
  require_same_dim(p.matrix(), q.matrix(), "projection_join");
  Matrix both(p.dim(), 2 * p.dim());
  both << p.matrix(), q.matrix();
  return range_projection(both, tol);
}

}  // namespace e0
