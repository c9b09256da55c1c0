#include "e0/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace e0 {

namespace {

Matrix stack_vectorized(std::span<const Matrix> elements, Eigen::Index n) {
  Matrix x(n * n, static_cast<Eigen::Index>(elements.size()));
  for (std::size_t k = 0; k < elements.size(); ++k) {
    if (elements[k].rows() != n || elements[k].cols() != n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(n) + "x" + std::to_string(n) + " operator");
    }
    x.col(static_cast<Eigen::Index>(k)) = vec(elements[k]);
  }
  return x;
}

// Removes the components along the orthonormal columns of q (two passes).
void deflate(const Matrix& q, Matrix& x) {
  if (q.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) x -= q * (q.adjoint() * x);
}

Matrix thin_q(const Matrix& b) {
  if (b.cols() == 0) return b;
  Eigen::HouseholderQR<Matrix> qr(b);
  return qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
}

// Appends the part of `candidates` not already in span(q); returns the new columns.
Matrix extend_basis(Matrix& q, Matrix candidates, const Tolerances& tol) {
  deflate(q, candidates);
  Matrix fresh = orthonormal_span(candidates, tol);
  if (fresh.cols() == 0) return fresh;
  deflate(q, fresh);
  fresh = thin_q(fresh);
  Matrix grown(q.rows(), q.cols() + fresh.cols());
  grown << q, fresh;
  q = std::move(grown);
  return fresh;
}

// Deterministic coefficients for "generic" elements.
std::vector<double> generic_coefficients(Eigen::Index count, std::uint64_t seed) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ seed);
  std::vector<double> c(static_cast<std::size_t>(count));
  for (auto& v : c) v = 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return c;
}

Matrix generic_hermitian(const StarAlgebra& s, std::uint64_t seed) {
  const Eigen::Index n = s.ambient_dim();
  const auto c = generic_coefficients(2 * s.dim(), seed);
  Matrix h = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const Matrix b = s.element(k);
    h += c[2 * k] * (b + b.adjoint()) + c[2 * k + 1] * cplx(0, 1) * (b - b.adjoint());
  }
  return 0.5 * (h + h.adjoint());
}

// Spectral projections of r* h r, grouped by eigenvalue, mapped back through r.
std::vector<Projection> spectral_groups(const Matrix& h, const Matrix& r) {
  std::vector<Projection> out;
  if (r.cols() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(r.adjoint() * h * r);
  const auto& vals = es.eigenvalues();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= vals.size(); ++i) {
    if (i == vals.size() || vals(i) - vals(i - 1) > 1e-7 * scale) {
      out.push_back(Projection::from_orthonormal(r * es.eigenvectors().middleCols(start, i - start)));
      start = i;
    }
  }
  return out;
}

}  // namespace

StarAlgebra StarAlgebra::from_basis(Eigen::Index n, Matrix basis, std::vector<Matrix> generators,
                                    const Tolerances& tol) {
  StarAlgebra s;
  s.n_ = n;
  s.basis_ = std::move(basis);
  if (generators.empty()) generators = s.elements();
  s.generators_ = std::move(generators);
  if (s.dim() == 0) {
    s.unit_ = Projection::zero(n);
    return s;
  }
  Matrix ranges(n, n * s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) ranges.middleCols(k * n, n) = s.element(k);
  s.unit_ = range_projection(ranges, tol);
  const double r = s.membership_residual(s.unit_.matrix());
  if (r > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation,
                "support projection is not in the algebra (residual " + std::to_string(r) + ")");
  }
  return s;
}

std::vector<Matrix> StarAlgebra::elements() const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(dim()));
  for (Eigen::Index k = 0; k < dim(); ++k) out.push_back(element(k));
  return out;
}

Vector StarAlgebra::coordinates(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) throw Error(ErrorKind::DimensionMismatch, "coordinates");
  return basis_.adjoint() * vec(x);
}

Matrix StarAlgebra::from_coordinates(const Eigen::Ref<const Vector>& c) const {
  if (c.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "from_coordinates");
  return unvec(basis_ * c, n_);
}

Matrix StarAlgebra::project(const Matrix& x) const { return from_coordinates(coordinates(x)); }

double StarAlgebra::membership_residual(const Matrix& x) const { return op_norm(x - project(x)); }

bool StarAlgebra::contains(const Matrix& x, const Tolerances& tol) const {
  return membership_residual(x) <= tol.eps_eq;
}

void require_member(const StarAlgebra& s, const Matrix& x, const Tolerances& tol,
                    const char* what) {
  const double r = s.membership_residual(x);
  if (r > tol.eps_eq) {
    throw Error(ErrorKind::NotMember,
                std::string(what) + " is not in the algebra (residual " + std::to_string(r) + ")");
  }
}

Matrix span_basis(std::span<const Matrix> elements, Eigen::Index n, const Tolerances& tol) {
  return orthonormal_span(stack_vectorized(elements, n), tol);
}

StarAlgebra span_closure(std::span<const Matrix> generators, Eigen::Index n,
                         const Tolerances& tol) {
  std::vector<Matrix> seed(generators.begin(), generators.end());
  for (const auto& g : generators) seed.push_back(g.adjoint());
  Matrix q = span_basis(seed, n, tol);

  std::vector<Matrix> gens;
  for (Eigen::Index k = 0; k < q.cols(); ++k) gens.push_back(unvec(q.col(k), n));

  const Eigen::Index cap = n * n;
  const Eigen::Index chunk = std::max<Eigen::Index>(n * n, 64);
  Matrix frontier = q;
  for (Eigen::Index round = 0; round < cap && frontier.cols() > 0 && q.cols() < cap; ++round) {
    Matrix next(n * n, 0);
    Matrix batch(n * n, chunk);
    Eigen::Index filled = 0;
    auto flush = [&] {
      if (filled == 0) return;
      Matrix fresh = extend_basis(q, batch.leftCols(filled), tol);
      if (fresh.cols() > 0) {
        Matrix grown(n * n, next.cols() + fresh.cols());
        grown << next, fresh;
        next = std::move(grown);
      }
      filled = 0;
    };
    // Left multiplication by generators reaches every word.
    for (Eigen::Index f = 0; f < frontier.cols() && q.cols() < cap; ++f) {
      const Matrix word = unvec(frontier.col(f), n);
      for (const auto& g : gens) {
        batch.col(filled++) = vec(g * word);
        if (filled == chunk) flush();
      }
    }
    flush();
    frontier = std::move(next);
  }
  return StarAlgebra::from_basis(n, std::move(q), std::move(gens), tol);
}

Matrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

StarAlgebra block_algebra(std::span<const int> block_sizes, const Tolerances& tol) {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  for (int b : block_sizes) {
    if (b <= 0) throw Error(ErrorKind::InvalidModel, "block sizes must be positive");
    n += b;
    d += static_cast<Eigen::Index>(b) * b;
  }
  Matrix basis = Matrix::Zero(n * n, d);
  std::vector<Matrix> gens;
  Eigen::Index offset = 0;
  Eigen::Index col = 0;
  for (int b : block_sizes) {
    for (int j = 0; j < b; ++j)
      for (int i = 0; i < b; ++i) basis((offset + j) * n + offset + i, col++) = 1.0;
    // e_11, the block shift J and J*: J*^k e_11 J^l runs over all matrix units.
    gens.push_back(matrix_unit(n, offset, offset));
    if (b > 1) {
      Matrix shift = Matrix::Zero(n, n);
      for (int i = 0; i + 1 < b; ++i) shift(offset + i, offset + i + 1) = 1.0;
      gens.push_back(shift);
      gens.push_back(shift.adjoint());
    }
    offset += b;
  }
  return StarAlgebra::from_basis(n, std::move(basis), std::move(gens), tol);
}

StarAlgebra full_algebra(Eigen::Index n, const Tolerances& tol) {
  const int sizes[] = {static_cast<int>(n)};
  return block_algebra(sizes, tol);
}

StarAlgebra scalar_algebra(Eigen::Index n, const Tolerances& tol) {
  Matrix basis = vec(Matrix::Identity(n, n)) / std::sqrt(static_cast<double>(n));
  return StarAlgebra::from_basis(n, std::move(basis), {Matrix::Identity(n, n)}, tol);
}

StarAlgebra commutant(std::span<const Matrix> operators, Eigen::Index n, const Tolerances& tol) {
  // X commutes with A iff K vec(X) = 0 with K = A^T (x) I - I (x) A. Accumulate
  // sum K*K in closed Kronecker form and take its numerical kernel.
  const Eigen::Index nn = n * n;
  const Matrix id = Matrix::Identity(n, n);
  Matrix h = Matrix::Zero(nn, nn);
  Matrix left = Matrix::Zero(n, n);
  Matrix right = Matrix::Zero(n, n);
  for (const auto& a : operators) {
    if (a.rows() != n || a.cols() != n) throw Error(ErrorKind::DimensionMismatch, "commutant");
    left += a.conjugate() * a.transpose();
    right += a.adjoint() * a;
    h -= kron(a.conjugate(), a);
    h -= kron(a.transpose(), a.adjoint());
  }
  h += kron(left, id) + kron(id, right);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const auto& vals = es.eigenvalues();
  const double cutoff = tol.eps_rank * std::max(vals(nn - 1), 1.0);
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < nn; ++i)
    if (vals(i) <= cutoff) ++keep;
  StarAlgebra out = StarAlgebra::from_basis(n, thin_q(es.eigenvectors().leftCols(keep)), {}, tol);
  // Closure holds by construction; check it where the pairwise cost is modest.
  if (out.dim() <= 64) {
    const double r = closure_residual(out);
    if (r > tol.eps_eq) {
      throw Error(ErrorKind::InvariantViolation,
                  "commutant failed product/adjoint closure (residual " + std::to_string(r) + ")");
    }
  }
  return out;
}

StarAlgebra commutant(const StarAlgebra& s, const Tolerances& tol) {
  return commutant(s.generators(), s.ambient_dim(), tol);
}

double containment_residual(const StarAlgebra& big, const StarAlgebra& small) {
  if (big.ambient_dim() != small.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "algebras act on different spaces");
  if (small.dim() == 0) return 0.0;
  Matrix r = small.basis_vectors();
  deflate(big.basis_vectors(), r);
  // Frobenius norm of the worst basis residual bounds its operator norm.
  return r.colwise().norm().maxCoeff();
}

bool contains_subspace(const StarAlgebra& big, const StarAlgebra& small, const Tolerances& tol) {
  return containment_residual(big, small) <= tol.eps_eq;
}

bool same_subspace(const StarAlgebra& a, const StarAlgebra& b, const Tolerances& tol) {
  return a.dim() == b.dim() && contains_subspace(a, b, tol) && contains_subspace(b, a, tol);
}

double closure_residual(const StarAlgebra& s) {
  const Eigen::Index n = s.ambient_dim();
  double worst = 0.0;
  const auto basis = s.elements();
  Matrix products(n * n, s.dim());
  for (const auto& g : s.generators()) {
    for (Eigen::Index k = 0; k < s.dim(); ++k) products.col(k) = vec(g * basis[k]);
    deflate(s.basis_vectors(), products);
    if (s.dim() > 0) worst = std::max(worst, products.colwise().norm().maxCoeff());
  }
  for (Eigen::Index k = 0; k < s.dim(); ++k) products.col(k) = vec(basis[k].adjoint());
  deflate(s.basis_vectors(), products);
  if (s.dim() > 0) worst = std::max(worst, products.colwise().norm().maxCoeff());
  return worst;
}

bool bicommutant_check(const StarAlgebra& s, const Tolerances& tol) {
  const StarAlgebra twice = commutant(commutant(s, tol), tol);
  if (!s.unital_in_ambient()) {
    // S'' contains the identity; compare S with the unit-compressed bicommutant.
    return contains_subspace(twice, s, tol) && twice.dim() == s.dim() + 1;
  }
  return same_subspace(twice, s, tol);
}

namespace {

// Columns of `coords` (in the basis of s) spanning {x : ||[x, op]|| small for all ops}.
Matrix commuting_coordinates(const StarAlgebra& s, const Matrix& coords, std::span<const Matrix> ops,
                             double rel_cutoff) {
  const Eigen::Index n = s.ambient_dim();
  const Eigen::Index c = coords.cols();
  std::vector<Matrix> elems;
  for (Eigen::Index j = 0; j < c; ++j) elems.push_back(s.from_coordinates(coords.col(j)));
  Matrix gram = Matrix::Zero(c, c);
  Matrix cols(n * n, c);
  for (const auto& g : ops) {
    for (Eigen::Index j = 0; j < c; ++j) cols.col(j) = vec(commutator(elems[static_cast<std::size_t>(j)], g));
    gram.noalias() += cols.adjoint() * cols;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()));
  const auto& vals = es.eigenvalues();
  const double cutoff = rel_cutoff * std::max(vals(c - 1), 1.0);
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < c; ++i)
    if (vals(i) <= cutoff) ++keep;
  return coords * es.eigenvectors().leftCols(keep);
}

}  // namespace

StarAlgebra relative_commutant(const StarAlgebra& s, std::span<const Matrix> ops,
                               const Tolerances& tol) {
  const Eigen::Index n = s.ambient_dim();
  const Eigen::Index d = s.dim();
  if (d == 0) return s;
  Matrix coords = Matrix::Identity(d, d);
  if (ops.size() > 4) {
    // Two fixed generic combinations first: their commutant contains the
    // answer, and the refinement below only runs on that (small) candidate.
    Matrix h1 = Matrix::Zero(n, n), h2 = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const double w1 = std::sin(1.0 + 0.7548776662 * static_cast<double>(k));
      const double w2 = std::cos(2.0 + 0.5698402910 * static_cast<double>(k));
      h1 += w1 * (ops[k] + ops[k].adjoint());
      h2 += w2 * cplx(0.0, 1.0) * (ops[k] - ops[k].adjoint());
    }
    const Matrix pair[] = {h1, h2};
    coords = commuting_coordinates(s, coords, pair, 1e-6);
  }
  if (coords.cols() > 0) coords = commuting_coordinates(s, coords, ops, tol.eps_rank);
  Matrix zb = s.basis_vectors() * coords;
  return StarAlgebra::from_basis(n, thin_q(zb), {}, tol);
}

StarAlgebra center(const StarAlgebra& s, const Tolerances& tol) {
  return relative_commutant(s, s.generators(), tol);
}

bool is_factor(const StarAlgebra& s, const Tolerances& tol) { return center(s, tol).dim() == 1; }

std::vector<Projection> minimal_projections_abelian(const StarAlgebra& s, const Tolerances& tol) {
  if (s.dim() == 0) return {};
  const Matrix r = s.unit().range_basis();
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto groups = spectral_groups(generic_hermitian(s, seed), r);
    if (static_cast<Eigen::Index>(groups.size()) != s.dim()) continue;
    bool ok = true;
    for (const auto& g : groups) ok = ok && s.contains(g.matrix(), tol);
    if (ok) return groups;
  }
  throw Error(ErrorKind::InvariantViolation,
              "could not split an algebra of dimension " + std::to_string(s.dim()) +
                  " into minimal projections (not abelian?)");
}

std::vector<Projection> all_projections_abelian(const StarAlgebra& s, const Tolerances& tol) {
  const auto minimal = minimal_projections_abelian(s, tol);
  const std::size_t m = minimal.size();
  if (m > 20) throw Error(ErrorKind::InvalidModel, "too many minimal projections to enumerate");
  const Eigen::Index n = s.ambient_dim();
  std::vector<Projection> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (std::uint64_t{1} << i)) p += minimal[i].matrix();
    out.push_back(Projection::from_matrix(p, tol));
  }
  return out;
}

std::vector<SimpleSummand> wedderburn_decomposition(const StarAlgebra& s, const Tolerances& tol) {
  const Eigen::Index n = s.ambient_dim();
  std::vector<SimpleSummand> out;
  const auto basis = s.elements();
  for (const auto& z : minimal_projections_abelian(center(s, tol), tol)) {
    std::vector<Matrix> ideal_elems;
    for (const auto& b : basis) ideal_elems.push_back(b * z.matrix());
    const StarAlgebra ideal = StarAlgebra::from_basis(n, span_basis(ideal_elems, n, tol), {}, tol);
    const auto size = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(ideal.dim()))));
    if (size * size != ideal.dim()) {
      throw Error(ErrorKind::InvariantViolation, "simple summand dimension is not a square");
    }
    const Matrix r = z.range_basis();
    std::vector<Projection> diag;
    for (std::uint64_t seed = 0; seed < 8 && static_cast<Eigen::Index>(diag.size()) != size; ++seed) {
      diag = spectral_groups(generic_hermitian(ideal, seed), r);
    }
    if (static_cast<Eigen::Index>(diag.size()) != size) {
      throw Error(ErrorKind::InvariantViolation, "could not find minimal projections of a summand");
    }
    SimpleSummand summand{z, std::vector<std::vector<Matrix>>(size, std::vector<Matrix>(size))};
    std::vector<Matrix> first_row(size);
    first_row[0] = diag[0].matrix();
    for (Eigen::Index k = 1; k < size; ++k) {
      std::vector<Matrix> cut;
      for (const auto& b : basis) cut.push_back(diag[0].matrix() * b * diag[k].matrix());
      const Matrix line = span_basis(cut, n, tol);
      if (line.cols() != 1) {
        throw Error(ErrorKind::InvariantViolation, "matrix unit space is not one-dimensional");
      }
      const Matrix v = unvec(line.col(0), n);
      const double lambda = (v * v.adjoint()).trace().real() / diag[0].rank();
      first_row[k] = v / std::sqrt(lambda);
    }
    for (Eigen::Index i = 0; i < size; ++i)
      for (Eigen::Index j = 0; j < size; ++j)
        summand.units[i][j] = first_row[i].adjoint() * first_row[j];
    out.push_back(std::move(summand));
  }
  return out;
}

Projection central_carrier(const StarAlgebra& s, const Projection& p, const Tolerances& tol) {
  require_member(s, p.matrix(), tol, "projection");
  const Eigen::Index n = s.ambient_dim();
  std::vector<Matrix> images{p.matrix()};
  for (Eigen::Index k = 0; k < s.dim(); ++k) images.push_back(s.element(k) * p.matrix());
  const Projection carrier = range_projection(images, n, tol);

  Matrix enumerated = Matrix::Zero(n, n);
  for (const auto& z : minimal_projections_abelian(center(s, tol), tol)) {
    if (op_norm(z.matrix() * p.matrix()) > 0.5) enumerated += z.matrix();
  }
  if (op_norm(enumerated - carrier.matrix()) > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation,
                "central carrier disagrees with minimal central projection enumeration");
  }
  return carrier;
}

StarAlgebra hereditary_corner(const StarAlgebra& s, const Projection& p, const Tolerances& tol) {
  require_member(s, p.matrix(), tol, "corner projection");
  const Eigen::Index n = s.ambient_dim();
  std::vector<Matrix> cut;
  for (Eigen::Index k = 0; k < s.dim(); ++k) cut.push_back(p.matrix() * s.element(k) * p.matrix());
  std::vector<Matrix> gens;
  if (projection_equal(p, s.unit(), tol)) gens = s.generators();
  StarAlgebra corner = StarAlgebra::from_basis(n, span_basis(cut, n, tol), std::move(gens), tol);
  if (!projection_equal(corner.unit(), p, tol) && !p.is_zero()) {
    throw Error(ErrorKind::InvariantViolation, "corner unit differs from the cutting projection");
  }
  return corner;
}

Matrix conditional_expectation(const StarAlgebra& m, const Projection& p, const Matrix& x,
                               const Tolerances& tol) {
  require_member(m, p.matrix(), tol, "projection");
  require_member(m, x, tol, "operand");
  return p.matrix() * x * p.matrix();
}

Projection smallest_dominating_projection(const StarAlgebra& b, const Projection& e,
                                          const Tolerances& tol) {
  const Eigen::Index n = b.ambient_dim();
  const StarAlgebra c = commutant(b, tol);
  std::vector<Matrix> images;
  for (Eigen::Index k = 0; k < c.dim(); ++k) images.push_back(c.element(k) * e.matrix());
  const Projection f = range_projection(images, n, tol);
  const double member = b.membership_residual(f.matrix());
  const double dominates = leq_residual(e.matrix(), f.matrix());
  if (member > tol.eps_eq || dominates > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation,
                "dominating projection check failed (membership residual " +
                    std::to_string(member) + ", order residual " + std::to_string(dominates) + ")");
  }
  return f;
}

}  // namespace e0
