#include "e0/cocycles.hpp"

#include <algorithm>
#include <string>

namespace e0 {

namespace {

std::string pair_text(int s, int t) { return "(" + std::to_string(s) + ", " + std::to_string(t) + ")"; }

const Projection& entry_at(const EndoPtr& alpha, const std::vector<Projection>& entries, int t) {
  if (t == 0) return alpha->algebra().unit();
  if (t < 0 || t > static_cast<int>(entries.size())) {
    throw Error(ErrorKind::InvalidModel, "time " + std::to_string(t) + " outside horizon");
  }
  return entries[static_cast<std::size_t>(t - 1)];
}

void require_alpha(const EndoPtr& alpha) {
  if (!alpha) throw Error(ErrorKind::InvalidModel, "missing endomorphism");
}

// alpha^s(x_t) for every t and every s with s + t <= T, indexed [t][s].
std::vector<std::vector<Matrix>> translates(const Endomorphism& alpha,
                                            const std::vector<Projection>& entries) {
  const StarAlgebra& m = alpha.algebra();
  const int T = static_cast<int>(entries.size());
  std::vector<std::vector<Matrix>> out(static_cast<std::size_t>(T + 1));
  for (int t = 1; t <= T; ++t) {
    Vector c = m.coordinates(entries[static_cast<std::size_t>(t - 1)].matrix());
    auto& row = out[static_cast<std::size_t>(t)];
    row.push_back(entries[static_cast<std::size_t>(t - 1)].matrix());
    for (int s = 1; s + t <= T; ++s) {
      c = alpha.map() * c;
      row.push_back(m.from_coordinates(c));
    }
  }
  return out;
}

void check_entries(const Endomorphism& alpha, const std::vector<Projection>& entries,
                   const std::vector<std::vector<Matrix>>& orbit, const Tolerances& tol,
                   bool nonzero) {
  const StarAlgebra& m = alpha.algebra();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const int t = static_cast<int>(k) + 1;
    const Projection& q = entries[k];
    if (q.dim() != m.ambient_dim()) {
      throw Error(ErrorKind::DimensionMismatch, "entry " + std::to_string(t) + " has wrong dimension");
    }
    if (nonzero && q.is_zero()) throw Error(ErrorKind::ZeroEntry, "entry at t=" + std::to_string(t) + " is zero");
    require_member(m, q.matrix(), tol, ("entry at t=" + std::to_string(t)).c_str());
    const double r = commutation_residual(q.matrix(), orbit[static_cast<std::size_t>(t)]);
    if (r > tol.eps_eq) {
      throw Error(ErrorKind::CommutationViolation,
                  "entry at t=" + std::to_string(t) + " does not commute with alpha^t(M) (" +
                      std::to_string(r) + ")");
    }
  }
}

// Product over the points of a partition, without validation.
Matrix raw_partition_product(const DominatingFamily& f, std::span<const int> points) {
  const Endomorphism& alpha = f.alpha();
  Matrix prod = f.at(points[0]).matrix();
  for (std::size_t k = 1; k < points.size(); ++k) {
    prod = prod * alpha.apply_power(f.at(points[k] - points[k - 1]).matrix(), points[k - 1]);
  }
  return prod;
}

}  // namespace

const Projection& ProjectiveCocycle::at(int t) const { return entry_at(alpha_, entries_, t); }
const Projection& DominatingFamily::at(int t) const { return entry_at(alpha_, entries_, t); }

ProjectiveCocycle validate_cocycle(EndoPtr alpha, std::vector<Projection> entries,
                                   const Tolerances& tol) {
  require_alpha(alpha);
  const int T = static_cast<int>(entries.size());
  const auto orbit = generator_orbit(*alpha, T);
  check_entries(*alpha, entries, orbit, tol, true);

  const auto shifted = translates(*alpha, entries);
  // Report the earliest violation, ordered by s + t and then s.
  for (int total = 2; total <= T; ++total) {
    for (int s = 1; s < total; ++s) {
      const int t = total - s;
      const Matrix rhs = entries[static_cast<std::size_t>(s - 1)].matrix() *
                         shifted[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
      const double r = op_norm(entries[static_cast<std::size_t>(total - 1)].matrix() - rhs);
      if (r > tol.eps_eq) {
        throw Error(ErrorKind::CocycleIdentityViolation,
                    "q_{s+t} != q_s alpha^s(q_t) at (s, t) = " + pair_text(s, t) + " (" +
                        std::to_string(r) + ")");
      }
    }
  }
  return ProjectiveCocycle(std::move(alpha), std::move(entries));
}

DominatingFamily validate_family(EndoPtr alpha, std::vector<Projection> entries,
                                 const Tolerances& tol) {
  require_alpha(alpha);
  const int T = static_cast<int>(entries.size());
  const auto orbit = generator_orbit(*alpha, T);
  check_entries(*alpha, entries, orbit, tol, false);

  const auto shifted = translates(*alpha, entries);
  for (int total = 2; total <= T; ++total) {
    for (int s = 1; s < total; ++s) {
      const int t = total - s;
      const Matrix& big = entries[static_cast<std::size_t>(total - 1)].matrix();
      const Matrix bound = entries[static_cast<std::size_t>(s - 1)].matrix() *
                           shifted[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
      const double r = op_norm(big - bound * big);
      if (r > tol.eps_eq) {
        throw Error(ErrorKind::InvariantViolation,
                    "f_{s+t} <= f_s alpha^s(f_t) fails at (s, t) = " + pair_text(s, t) + " (" +
                        std::to_string(r) + ")");
      }
    }
  }
  return DominatingFamily(std::move(alpha), std::move(entries));
}

bool cocycle_leq(const ProjectiveCocycle& q, const ProjectiveCocycle& r, const Tolerances& tol) {
  if (q.alpha_ptr() != r.alpha_ptr() && q.alpha().map().size() != r.alpha().map().size()) {
    throw Error(ErrorKind::DimensionMismatch, "cocycles over different endomorphisms");
  }
  if (q.horizon() != r.horizon()) {
    throw Error(ErrorKind::DimensionMismatch, "cocycle horizons differ: " + std::to_string(q.horizon()) +
                                                  " vs " + std::to_string(r.horizon()));
  }
  for (int t = 1; t <= q.horizon(); ++t)
    if (!projection_leq(q.at(t), r.at(t), tol)) return false;
  return true;
}

Projection partition_product(const DominatingFamily& f, std::span<const int> points,
                             const Tolerances& tol) {
  if (points.empty()) throw Error(ErrorKind::InvalidModel, "empty partition");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const int prev = k == 0 ? 0 : points[k - 1];
    if (points[k] <= prev || points[k] > f.horizon()) {
      throw Error(ErrorKind::InvalidModel, "partition points must increase within (0, horizon]");
    }
  }
  const Matrix prod = raw_partition_product(f, points);
  Projection out;
  try {
    out = Projection::from_matrix(prod, tol);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvariantViolation, std::string("partition product is not a projection: ") + e.what());
  }
  const StarAlgebra& m = f.alpha().algebra();
  const double mem = m.membership_residual(out.matrix());
  std::vector<Matrix> gens;
  for (const auto& g : m.generators()) {
    gens.push_back(f.alpha().apply_power(g, points.back()));
    gens.push_back(gens.back().adjoint());
  }
  const double comm = commutation_residual(out.matrix(), gens);
  if (mem > tol.eps_eq || comm > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation,
                "partition product leaves M ∩ alpha^t(M)' (membership " + std::to_string(mem) +
                    ", commutator " + std::to_string(comm) + ")");
  }
  return out;
}

ProjectiveCocycle cocycle_from_family(const DominatingFamily& f, const Tolerances& tol) {
  const int T = f.horizon();
  const Endomorphism& alpha = f.alpha();
  const StarAlgebra& m = alpha.algebra();
  std::vector<Projection> entries;
  if (T == 0) return ProjectiveCocycle(f.alpha_ptr(), {});

  // Finest partition {1, ..., t}: q_t = q_{t-1} alpha^{t-1}(f_1).
  Vector shifted = m.coordinates(f.at(1).matrix());
  Matrix prod = f.at(1).matrix();
  for (int t = 1; t <= T; ++t) {
    if (t > 1) {
      shifted = alpha.map() * shifted;
      prod = prod * m.from_coordinates(shifted);
    }
    Projection q;
    try {
      q = Projection::from_matrix(prod, tol);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvariantViolation,
                  "finest partition product at t=" + std::to_string(t) + " is not a projection: " + e.what());
    }
    if (q.is_zero()) {
      throw Error(ErrorKind::ZeroEntry, "finest partition product vanishes at t=" + std::to_string(t));
    }
    prod = q.matrix();
    entries.push_back(std::move(q));
  }

  // Coarser partitions must sit below the finest one.
  const int pair_stride = T <= 16 ? 1 : std::max(1, T / 8);
  for (int t = 1; t <= T; ++t) {
    const Matrix& qt = entries[static_cast<std::size_t>(t - 1)].matrix();
    const Matrix& ft = f.at(t).matrix();
    double worst = op_norm(ft - qt * ft);
    for (int tau = 1; tau < t; tau += pair_stride) {
      const int pts[2] = {tau, t};
      const Matrix coarse = raw_partition_product(f, pts);
      worst = std::max(worst, op_norm(coarse - qt * coarse));
    }
    if (worst > tol.eps_eq) {
      throw Error(ErrorKind::InvariantViolation,
                  "a coarse partition product exceeds the finest one at t=" + std::to_string(t) + " (" +
                      std::to_string(worst) + ")");
    }
  }

  try {
    return validate_cocycle(f.alpha_ptr(), std::move(entries), tol);
  } catch (const Error& e) {
    if (e.internal()) throw;
    throw Error(ErrorKind::InvariantViolation, std::string("cocycle built from family is invalid: ") + e.what());
  }
}

DominatingFamily dominating_family(EndoPtr alpha, const Projection& e, int horizon,
                                   const Tolerances& tol) {
  require_alpha(alpha);
  if (!is_increasing_projection(*alpha, e, tol)) {
    throw Error(ErrorKind::NotIncreasing, "alpha(e) >= e fails");
  }
  if (e.is_zero()) throw Error(ErrorKind::ZeroEntry, "e = 0");
  const auto orbit = generator_orbit(*alpha, horizon);
  const Matrix start = e.range_basis();
  std::vector<Projection> entries;
  for (int t = 1; t <= horizon; ++t) {
    Projection f = Projection::from_orthonormal(invariant_closure(orbit[static_cast<std::size_t>(t)], start, tol));
    if (leq_residual(e.matrix(), f.matrix()) > tol.eps_eq) {
      throw Error(ErrorKind::InvariantViolation, "f_t does not dominate e at t=" + std::to_string(t));
    }
    entries.push_back(std::move(f));
  }
  try {
    return validate_family(std::move(alpha), std::move(entries), tol);
  } catch (const Error& err) {
    if (err.internal()) throw;
    throw Error(ErrorKind::InvariantViolation, std::string("dominating family check failed: ") + err.what());
  }
}

ProjectiveCocycle minimal_cocycle_over(EndoPtr alpha, const Projection& e, int horizon,
                                       const Tolerances& tol) {
  return cocycle_from_family(dominating_family(std::move(alpha), e, horizon, tol), tol);
}

CocycleLimit cocycle_limit(const ProjectiveCocycle& q, const Tolerances& tol) {
  const int T = q.horizon();
  if (T < 2) throw Error(ErrorKind::NotStabilized, "horizon too short to detect stabilization");
  const Projection& last = q.at(T);
  int start = T;
  while (start > 1) {
    const Projection& prev = q.at(start - 1);
    if (prev.rank() != last.rank() || op_norm(prev.matrix() - last.matrix()) > tol.eps_eq) break;
    --start;
  }
  if (start == T) {
    throw Error(ErrorKind::NotStabilized, "q_t still changing at t=" + std::to_string(T));
  }
  CocycleLimit out;
  out.limit = last;
  out.stabilized_at = start;
  const Endomorphism& alpha = q.alpha();
  const StarAlgebra& m = alpha.algebra();
  Vector c = m.coordinates(last.matrix());
  for (int t = 1; t <= T - start; ++t) {
    c = alpha.map() * c;
    const double r = op_norm(q.at(t).matrix() * m.from_coordinates(c) - last.matrix());
    out.fixed_residual = std::max(out.fixed_residual, r);
  }
  if (out.fixed_residual > tol.eps_eq) {
    throw Error(ErrorKind::InvariantViolation,
                "q_t alpha^t(q_inf) != q_inf (" + std::to_string(out.fixed_residual) + ")");
  }
  return out;
}

Matrix AssociatedSemigroup::apply(int t, const Matrix& x) const {
  return cocycle.at(t).matrix() * cocycle.alpha().apply_power(x, t);
}

Matrix AssociatedSemigroup::map(int t) const {
  const StarAlgebra& m = cocycle.alpha().algebra();
  const Eigen::Index n = m.ambient_dim();
  const Matrix images = m.basis_vectors() * cocycle.alpha().power(t);
  const Matrix& qt = cocycle.at(t).matrix();
  Matrix left(n * n, m.dim());
  for (Eigen::Index k = 0; k < m.dim(); ++k) left.col(k) = vec(qt * unvec(images.col(k), n));
  return m.basis_vectors().adjoint() * left;
}

AssociatedSemigroup associated_semigroup(const ProjectiveCocycle& q, const Tolerances& tol) {
  const Endomorphism& alpha = q.alpha();
  const StarAlgebra& m = alpha.algebra();
  const int T = q.horizon();
  AssociatedSemigroup beta{q};

  for (int t = 0; t <= T; ++t) {
    const double r = op_norm(beta.apply(t, m.unit().matrix()) - q.at(t).matrix());
    if (r > tol.eps_eq) {
      throw Error(ErrorKind::InvariantViolation, "beta_t(1) != q_t at t=" + std::to_string(t));
    }
  }

  const double dd = static_cast<double>(m.dim());
  if (dd * dd * dd * T * T / 2.0 <= 2e8) {
    std::vector<Matrix> maps;
    for (int t = 0; t <= T; ++t) maps.push_back(beta.map(t));
    for (int s = 1; s <= T; ++s) {
      for (int t = 1; s + t <= T; ++t) {
        const double r = (maps[s + t] - maps[s] * maps[t]).colwise().norm().maxCoeff();
        if (r > (s + t) * 10 * tol.eps_eq) {
          throw Error(ErrorKind::InvariantViolation,
                      "beta_{s+t} != beta_s beta_t at (s, t) = " + pair_text(s, t) + " (" + std::to_string(r) + ")");
        }
      }
    }
    for (int t = 1; t <= T; ++t) {
      const double r = endomorphism_residuals(m, maps[static_cast<std::size_t>(t)]).multiplicative;
      if (r > 10 * tol.eps_eq) {
        throw Error(ErrorKind::InvariantViolation, "beta_t is not multiplicative at t=" + std::to_string(t));
      }
    }
    return beta;
  }

  // beta_t multiplicative iff q_t commutes with alpha^t(M).
  const auto orbit = generator_orbit(alpha, T);
  for (int t = 1; t <= T; ++t) {
    const double r = commutation_residual(q.at(t).matrix(), orbit[static_cast<std::size_t>(t)]);
    if (r > 10 * tol.eps_eq) {
      throw Error(ErrorKind::InvariantViolation, "beta_t is not multiplicative at t=" + std::to_string(t));
    }
  }
  const double r1 = endomorphism_residuals(m, beta.map(1)).multiplicative;
  if (r1 > 10 * tol.eps_eq) throw Error(ErrorKind::InvariantViolation, "beta_1 is not multiplicative");
  const Matrix& q1 = q.at(1).matrix();
  for (std::size_t k = 0; k < orbit[0].size(); ++k) {
    Matrix bt = orbit[0][k];
    for (int t = 1; t <= T; ++t) {
      bt = q1 * alpha.apply(bt);  // beta_1^t(g)
      const double r = (bt - q.at(t).matrix() * orbit[static_cast<std::size_t>(t)][k]).norm();
      if (r > t * 10 * tol.eps_eq) {
        throw Error(ErrorKind::InvariantViolation,
                    "beta_t != beta_1^t at t=" + std::to_string(t) + " (" + std::to_string(r) + ")");
      }
    }
  }
  return beta;
}

}  // namespace e0
