#include "e0/dynamics.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace e0 {

namespace {

// Column norms of a vectorized residual block (Frobenius, an upper bound on the operator norm).
double worst_column(const Matrix& r, Eigen::Index* where = nullptr) {
  if (r.cols() == 0) return 0.0;
  Eigen::Index idx = 0;
  const double v = r.colwise().norm().maxCoeff(&idx);
  if (where) *where = idx;
  return v;
}

// Coordinates (in M's basis) of the corner basis elements.
Matrix corner_in_m(const StarAlgebra& m, const StarAlgebra& corner) {
  return m.basis_vectors().adjoint() * corner.basis_vectors();
}

// Coordinate matrix of x -> p x p on M.
Matrix compression_in_m(const StarAlgebra& m, const Projection& p) {
  const Matrix& q = m.basis_vectors();
  const Eigen::Index n = m.ambient_dim();
  Matrix out(q.rows(), q.cols());
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    out.col(k) = vec(p.matrix() * unvec(q.col(k), n) * p.matrix());
  }
  return q.adjoint() * out;
}

}  // namespace

EndomorphismResiduals endomorphism_residuals(const StarAlgebra& m, const Matrix& map) {
  EndomorphismResiduals r;
  const Eigen::Index n = m.ambient_dim();
  const Eigen::Index d = m.dim();
  const Matrix& q = m.basis_vectors();
  auto image = [&](const Matrix& x) { return unvec(q * (map * (q.adjoint() * vec(x))), n); };

  r.unital = op_norm(image(m.unit().matrix()) - m.unit().matrix());

  const Matrix images = q * map;  // vectorized alpha(b_k)
  Matrix lhs(n * n, d);
  Matrix rhs(n * n, d);
  for (const auto& g : m.generators()) {
    const Matrix ag = image(g);
    for (Eigen::Index k = 0; k < d; ++k) {
      lhs.col(k) = vec(g * m.element(k));
      rhs.col(k) = vec(ag * unvec(images.col(k), n));
    }
    // Both sides lie in M, so compare coordinates.
    r.multiplicative = std::max(r.multiplicative, worst_column(map * (q.adjoint() * lhs) - q.adjoint() * rhs));
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    const Matrix b = m.element(k);
    r.adjoint = std::max(r.adjoint, op_norm(image(b.adjoint()) - unvec(images.col(k), n).adjoint()));
  }
  return r;
}

Endomorphism Endomorphism::validate(AlgebraPtr algebra, Matrix map, const Tolerances& tol) {
  const Eigen::Index d = algebra->dim();
  if (map.rows() != d || map.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch, "endomorphism map must be " + std::to_string(d) +
                                                  "x" + std::to_string(d));
  }
  if (!map.allFinite()) throw Error(ErrorKind::InvalidModel, "endomorphism map has non-finite entries");
  const auto r = endomorphism_residuals(*algebra, map);
  if (r.unital > tol.eps_eq) {
    throw Error(ErrorKind::UnitalityViolation, "||alpha(1) - 1|| = " + std::to_string(r.unital));
  }
  if (r.multiplicative > 10 * tol.eps_eq) {
    // Locate the witnessing basis pair for the report.
    const Eigen::Index n = algebra->ambient_dim();
    const Matrix& q = algebra->basis_vectors();
    auto image = [&](const Matrix& x) { return unvec(q * (map * (q.adjoint() * vec(x))), n); };
    double worst = -1;
    Eigen::Index wi = 0, wj = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const Matrix bi = algebra->element(i);
      const Matrix ai = image(bi);
      for (Eigen::Index j = 0; j < d; ++j) {
        const Matrix bj = algebra->element(j);
        const double v = op_norm(image(bi * bj) - ai * image(bj));
        if (v > worst) { worst = v; wi = i; wj = j; }
      }
    }
    throw Error(ErrorKind::MultiplicativityViolation,
                "basis pair (" + std::to_string(wi) + ", " + std::to_string(wj) +
                    "): ||alpha(ab) - alpha(a)alpha(b)|| = " + std::to_string(worst));
  }
  if (r.adjoint > tol.eps_eq) {
    throw Error(ErrorKind::AdjointViolation, "||alpha(a*) - alpha(a)*|| = " + std::to_string(r.adjoint));
  }
  Endomorphism e;
  e.algebra_ = std::move(algebra);
  e.map_ = std::move(map);
  return e;
}

Endomorphism Endomorphism::from_function(AlgebraPtr algebra,
                                         const std::function<Matrix(const Matrix&)>& f,
                                         const Tolerances& tol) {
  Matrix map(algebra->dim(), algebra->dim());
  for (Eigen::Index k = 0; k < algebra->dim(); ++k) {
    const Matrix img = f(algebra->element(k));
    const double r = algebra->membership_residual(img);
    if (r > tol.eps_eq) {
      throw Error(ErrorKind::NotMember, "image of basis element " + std::to_string(k) +
                                            " leaves the algebra (residual " + std::to_string(r) + ")");
    }
    map.col(k) = algebra->coordinates(img);
  }
  return validate(std::move(algebra), std::move(map), tol);
}

Matrix Endomorphism::apply(const Matrix& x) const {
  return algebra_->from_coordinates(map_ * algebra_->coordinates(x));
}

Matrix Endomorphism::apply_power(const Matrix& x, int t) const {
  Vector c = algebra_->coordinates(x);
  for (int s = 0; s < t; ++s) c = map_ * c;
  return algebra_->from_coordinates(c);
}

Matrix Endomorphism::power(int t) const {
  if (t < 0) throw Error(ErrorKind::InvalidModel, "negative power");
  Matrix result = Matrix::Identity(map_.rows(), map_.cols());
  Matrix base = map_;
  for (unsigned e = static_cast<unsigned>(t); e > 0; e >>= 1) {
    if (e & 1U) result = result * base;
    if (e > 1) base = base * base;
  }
  return result;
}

Matrix CPSemigroup::apply(int t, const Matrix& a) const {
  return corner->from_coordinates(maps.at(static_cast<std::size_t>(t)) * corner->coordinates(a));
}

int default_horizon(const StarAlgebra& m) { return static_cast<int>(2 * m.ambient_dim()); }

void require_projection_in(const StarAlgebra& m, const Projection& p, const Tolerances& tol) {
  if (p.dim() != m.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "projection dimension");
  require_member(m, p.matrix(), tol, "projection");
}

bool is_increasing_projection(const Endomorphism& alpha, const Projection& p, const Tolerances& tol) {
  require_projection_in(alpha.algebra(), p, tol);
  return leq_residual(p.matrix(), alpha.apply(p.matrix())) <= tol.eps_eq;
}

bool is_fixed_projection(const Endomorphism& alpha, const Projection& p, const Tolerances& tol) {
  require_projection_in(alpha.algebra(), p, tol);
  return op_norm(alpha.apply(p.matrix()) - p.matrix()) <= tol.eps_eq;
}

namespace {

void require_increasing(const Endomorphism& alpha, const Projection& p, const Tolerances& tol) {
  if (!is_increasing_projection(alpha, p, tol)) {
    throw Error(ErrorKind::NotIncreasing,
                "alpha(p) >= p fails (residual " +
                    std::to_string(leq_residual(p.matrix(), alpha.apply(p.matrix()))) + ")");
  }
}

// phi_t in corner coordinates for t = 0..horizon.
std::vector<Matrix> compression_maps(const Endomorphism& alpha, const StarAlgebra& corner,
                                     const Projection& p, int horizon) {
  const StarAlgebra& m = alpha.algebra();
  const Matrix cm = corner_in_m(m, corner);
  // M coords -> p x p -> corner coords (orthogonal projection)
  const Matrix back_cut = cm.adjoint() * compression_in_m(m, p);
  std::vector<Matrix> maps;
  Matrix current = cm;  // alpha^t(corner basis) in M coordinates
  for (int t = 0; t <= horizon; ++t) {
    if (t > 0) current = alpha.map() * current;
    maps.push_back(back_cut * current);
  }
  return maps;
}

}  // namespace

CPSemigroup compress(const Endomorphism& alpha, const Projection& p, int horizon,
                     const Tolerances& tol) {
  require_increasing(alpha, p, tol);
  auto corner = std::make_shared<const StarAlgebra>(hereditary_corner(alpha.algebra(), p, tol));
  CPSemigroup phi{corner, p, compression_maps(alpha, *corner, p, horizon)};

  for (int t = 0; t <= horizon; ++t) {
    const double r = op_norm(phi.apply(t, p.matrix()) - p.matrix());
    if (r > tol.eps_eq) {
      throw Error(ErrorKind::InvariantViolation,
                  "compression is not unital at t=" + std::to_string(t) + " (" + std::to_string(r) + ")");
    }
  }
  // All pairs when cheap; otherwise phi_{t+1} = phi_1 phi_t, which gives every
  // pair by induction, tested on fixed random probe columns (Freivalds).
  const double dc = static_cast<double>(corner->dim());
  const bool all_pairs = dc * dc * dc * horizon * horizon / 2.0 <= 2e9;
  Matrix probes;
  if (!all_pairs) {
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd;
    probes.resize(corner->dim(), 8);
    for (Eigen::Index j = 0; j < probes.cols(); ++j)
      for (Eigen::Index i = 0; i < probes.rows(); ++i) probes(i, j) = cplx(nd(rng), nd(rng));
    probes.colwise().normalize();
  }
  for (int s = 1; s <= horizon; ++s) {
    if (!all_pairs && s > 1) break;
    for (int t = 1; s + t <= horizon; ++t) {
      const double r = all_pairs ? worst_column(phi.maps[s + t] - phi.maps[s] * phi.maps[t])
                                 : worst_column(phi.maps[s + t] * probes - phi.maps[s] * (phi.maps[t] * probes));
      if (r > tol.eps_eq) {
        throw Error(ErrorKind::InvariantViolation, "phi_{s+t} != phi_s phi_t at s=" +
                                                       std::to_string(s) + ", t=" + std::to_string(t));
      }
    }
  }
  // Complete positivity of phi_1 via Choi blocks on each simple summand; the
  // semigroup law above makes every phi_t a composition of CP maps.
  if (horizon >= 1) {
    for (const auto& summand : wedderburn_decomposition(*corner, tol)) {
      const int k = summand.size();
      const Eigen::Index n = corner->ambient_dim();
      Matrix choi(k * n, k * n);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) choi.block(i * n, j * n, n, n) = phi.apply(1, summand.units[i][j]);
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (choi + choi.adjoint()), Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) < -tol.eps_eq) {
        throw Error(ErrorKind::InvariantViolation,
                    "compression is not completely positive (Choi eigenvalue " +
                        std::to_string(es.eigenvalues()(0)) + ")");
      }
    }
  }
  return phi;
}

MultiplicativityVerdict is_multiplicative_compression(const Endomorphism& alpha,
                                                      const Projection& p, int horizon,
                                                      const Tolerances& tol) {
  require_increasing(alpha, p, tol);
  const StarAlgebra& m = alpha.algebra();
  const Eigen::Index n = m.ambient_dim();
  const StarAlgebra corner = hereditary_corner(m, p, tol);
  MultiplicativityVerdict v;

  // Commutation criterion: ||[p, alpha^t(g)]|| over corner generators and
  // their adjoints (the commutant of p is an algebra), t <= horizon.
  std::vector<Vector> comm_coords;
  for (const auto& g : corner.generators()) {
    comm_coords.push_back(m.coordinates(g));
    comm_coords.push_back(m.coordinates(g.adjoint()));
  }
  for (int t = 1; t <= horizon; ++t) {
    for (std::size_t k = 0; k < comm_coords.size(); ++k) {
      comm_coords[k] = alpha.map() * comm_coords[k];
      const double r = commutator(p.matrix(), m.from_coordinates(comm_coords[k])).norm();
      if (r > v.commutation_residual) {
        v.commutation_residual = r;
        v.witness_t = t;
        v.witness_index = static_cast<int>(k / 2);
      }
    }
  }

  // Product criterion phi_t(gb) = phi_t(g)phi_t(b) over corner generators g
  // and corner basis elements b, with phi_t(gb) = p alpha^t(g) alpha^t(b) p
  // (alpha is a validated homomorphism). Once phi_1 is multiplicative so is
  // phi_t = phi_1^t, so large corners stop after a bounded number of steps.
  const auto& gens = corner.generators();
  const Matrix& pm = p.matrix();
  const double nn = static_cast<double>(n);
  const double per_step = nn * nn * static_cast<double>(m.dim() * corner.dim()) +
                          2.0 * static_cast<double>(gens.size() * corner.dim()) * nn * nn * nn;
  const int steps = std::clamp(static_cast<int>(5e7 / std::max(per_step, 1.0)), 1, std::max(horizon, 1));
  std::vector<Vector> gen_coords;
  for (const auto& g : gens) gen_coords.push_back(m.coordinates(g));
  Matrix translated = corner_in_m(m, corner);
  for (int t = 1; t <= std::min(horizon, steps); ++t) {
    translated = alpha.map() * translated;
    for (auto& c : gen_coords) c = alpha.map() * c;
    const Matrix images = m.basis_vectors() * translated;  // vectorized alpha^t(b_k)
    const Eigen::Index dc = images.cols();
    Matrix abp(n, n * dc);  // [alpha^t(b_k) p] side by side
    for (Eigen::Index k = 0; k < dc; ++k) abp.middleCols(k * n, n).noalias() = unvec(images.col(k), n) * pm;
    const Matrix pabp = pm * abp;
    for (const auto& c : gen_coords) {
      const Matrix pag = pm * m.from_coordinates(c);
      const Matrix pagp = pag * pm;
      const Matrix defect = pag * abp - pagp * pabp;
      for (Eigen::Index k = 0; k < dc; ++k)
        v.product_residual = std::max(v.product_residual, defect.middleCols(k * n, n).norm());
    }
  }

  const bool commutes = v.commutation_residual <= tol.eps_eq;
  const bool products_ok = v.product_residual <= tol.eps_eq;
  if (commutes != products_ok) {
    throw Error(ErrorKind::InvariantViolation,
                "commutation and product criteria disagree (commutator " +
                    std::to_string(v.commutation_residual) + ", product defect " +
                    std::to_string(v.product_residual) + ")");
  }
  v.multiplicative = commutes;
  return v;
}

StarAlgebra image_algebra(const Endomorphism& alpha, int t, const Tolerances& tol) {
  const StarAlgebra& m = alpha.algebra();
  const Matrix images = m.basis_vectors() * alpha.power(t);
  std::vector<Matrix> gens;
  for (const auto& g : m.generators()) gens.push_back(alpha.apply_power(g, t));
  return StarAlgebra::from_basis(m.ambient_dim(), orthonormal_span(images, tol), std::move(gens), tol);
}

std::vector<std::vector<Matrix>> generator_orbit(const Endomorphism& alpha, int horizon) {
  const StarAlgebra& m = alpha.algebra();
  std::vector<Matrix> coords;
  for (const auto& g : m.generators()) {
    coords.push_back(m.coordinates(g));
    coords.push_back(m.coordinates(g.adjoint()));
  }
  std::vector<std::vector<Matrix>> orbit;
  for (int t = 0; t <= horizon; ++t) {
    std::vector<Matrix> level;
    for (auto& c : coords) {
      if (t > 0) c = alpha.map() * c;
      level.push_back(m.from_coordinates(c));
    }
    orbit.push_back(std::move(level));
  }
  return orbit;
}

double commutation_residual(const Matrix& x, std::span<const Matrix> ops) {
  double worst = 0.0;
  for (const auto& op : ops) worst = std::max(worst, commutator(x, op).norm());
  return worst;
}

Matrix invariant_closure(std::span<const Matrix> ops, const Matrix& start, const Tolerances& tol) {
  Matrix basis = orthonormal_span(start, tol);
  Matrix frontier = basis;
  const Eigen::Index n = start.rows();
  while (frontier.cols() > 0 && basis.cols() < n) {
    Matrix cand(n, frontier.cols() * static_cast<Eigen::Index>(ops.size()));
    for (std::size_t k = 0; k < ops.size(); ++k)
      cand.middleCols(static_cast<Eigen::Index>(k) * frontier.cols(), frontier.cols()) = ops[k] * frontier;
    for (int pass = 0; pass < 2; ++pass) cand -= basis * (basis.adjoint() * cand);
    Matrix fresh = orthonormal_span(cand, tol);
    if (fresh.cols() == 0) break;
    fresh -= basis * (basis.adjoint() * fresh);
    Eigen::HouseholderQR<Matrix> qr(fresh);
    fresh = qr.householderQ() * Matrix::Identity(n, fresh.cols());
    Matrix grown(n, basis.cols() + fresh.cols());
    grown << basis, fresh;
    basis = std::move(grown);
    frontier = std::move(fresh);
  }
  return basis;
}

}  // namespace e0
