#include "e0/workbench.hpp"

#include <cmath>
#include <functional>

namespace e0 {

KrausMap KrausMap::validated(std::vector<Matrix> ops, const Tolerances& tol) {
  if (ops.empty()) throw Error(ErrorKind::InvalidModel, "Kraus list is empty");
  const Eigen::Index d = ops.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& l : ops) {
    if (l.rows() != d || l.cols() != d) throw Error(ErrorKind::DimensionMismatch, "Kraus operators must be d x d");
    if (!l.allFinite()) throw Error(ErrorKind::InvalidModel, "Kraus operator has non-finite entries");
    sum += l * l.adjoint();
  }
  const double r = op_norm(sum - Matrix::Identity(d, d));
  if (r > tol.eps_eq) {
    throw Error(ErrorKind::UnitalityViolation, "sum L_i L_i* differs from 1 by " + std::to_string(r));
  }
  KrausMap k;
  k.ops_ = std::move(ops);
  return k;
}

Matrix KrausMap::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& l : ops_) out += l * x * l.adjoint();
  return out;
}

Matrix KrausMap::apply_power(const Matrix& x, int t) const {
  Matrix y = x;
  for (int s = 0; s < t; ++s) y = apply(y);
  return y;
}

namespace {

std::vector<int> offsets_of(std::span<const int> blocks) {
  std::vector<int> off(blocks.size() + 1, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) off[i + 1] = off[i] + blocks[i];
  return off;
}

bool is_unitary(const Matrix& u, const Tolerances& tol) {
  return u.rows() == u.cols() && op_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) <= tol.eps_eq;
}

Projection projection_in(const StarAlgebra& m, const Matrix& p, const Tolerances& tol) {
  if (p.rows() != m.ambient_dim() || p.cols() != m.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "projection has the wrong size");
  }
  Projection out = Projection::from_matrix(p, tol);
  require_member(m, out.matrix(), tol, "projection");
  return out;
}

Matrix power_projector(const Matrix& q, int copies) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < copies; ++i) out = kron(out, q);
  return out;
}

// Enumerates sequences of source blocks whose sizes add up to `target`.
void compositions(std::span<const int> blocks, int target, std::vector<int>& prefix,
                  std::vector<std::vector<int>>& out, std::size_t cap) {
  if (out.size() >= cap) return;
  if (target == 0) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    if (blocks[s] > target) continue;
    prefix.push_back(static_cast<int>(s));
    compositions(blocks, target - blocks[s], prefix, out, cap);
    prefix.pop_back();
  }
}

}  // namespace

Model build_block_model(std::span<const int> blocks, const BlockMap& map, std::optional<Matrix> projection,
                        const Tolerances& tol) {
  tol.validate();
  if (blocks.empty()) throw Error(ErrorKind::InvalidModel, "no blocks");
  if (map.sources.size() != blocks.size()) {
    throw Error(ErrorKind::DimensionMismatch, "block map needs one source list per block");
  }
  if (!map.unitaries.empty() && map.unitaries.size() != blocks.size()) {
    throw Error(ErrorKind::DimensionMismatch, "block map needs one unitary slot per block");
  }
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    int total = 0;
    for (int s : map.sources[j]) {
      if (s < 0 || s >= static_cast<int>(blocks.size())) {
        throw Error(ErrorKind::InvalidModel, "source block index " + std::to_string(s) + " out of range");
      }
      total += blocks[static_cast<std::size_t>(s)];
    }
    if (total != blocks[j]) {
      throw Error(ErrorKind::DimensionMismatch, "sources of block " + std::to_string(j) + " have total size " +
                                                    std::to_string(total) + ", block has " +
                                                    std::to_string(blocks[j]));
    }
    if (!map.unitaries.empty() && map.unitaries[j]) {
      const Matrix& u = *map.unitaries[j];
      if (u.rows() != blocks[j] || u.cols() != blocks[j]) {
        throw Error(ErrorKind::DimensionMismatch, "unitary for block " + std::to_string(j) + " has the wrong size");
      }
      if (!is_unitary(u, tol)) throw Error(ErrorKind::InvalidModel, "block " + std::to_string(j) + " matrix is not unitary");
    }
  }

  auto algebra = std::make_shared<const StarAlgebra>(block_algebra(blocks, tol));
  const auto off = offsets_of(blocks);
  const Eigen::Index n = off.back();
  auto f = [&](const Matrix& x) {
    Matrix out = Matrix::Zero(n, n);
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      Matrix d = Matrix::Zero(blocks[j], blocks[j]);
      int at = 0;
      for (int s : map.sources[j]) {
        const int b = blocks[static_cast<std::size_t>(s)];
        d.block(at, at, b, b) = x.block(off[static_cast<std::size_t>(s)], off[static_cast<std::size_t>(s)], b, b);
        at += b;
      }
      if (!map.unitaries.empty() && map.unitaries[j]) d = *map.unitaries[j] * d * map.unitaries[j]->adjoint();
      out.block(off[j], off[j], blocks[j], blocks[j]) = d;
    }
    return out;
  };
  auto alpha = std::make_shared<const Endomorphism>(Endomorphism::from_function(algebra, f, tol));
  Model m;
  m.algebra = algebra;
  m.alpha = alpha;
  m.p = projection ? projection_in(*algebra, *projection, tol) : algebra->unit();
  m.horizon = default_horizon(*algebra);
  m.tol = tol;
  return m;
}

Matrix embed_system(const Matrix& x, Eigen::Index rest) { return kron(x, Matrix::Identity(rest, rest)); }

ChainDilation build_chain_dilation(const KrausMap& phi, int levels, const Tolerances& tol, int ancilla) {
  tol.validate();
  if (levels < 1) throw Error(ErrorKind::InvalidModel, "levels must be at least 1");
  const Eigen::Index d = phi.dim();
  const int r = phi.rank();
  const int k = ancilla == 0 ? r : ancilla;
  if (k < r) throw Error(ErrorKind::InvalidModel, "ancilla dimension below the number of Kraus operators");
  Eigen::Index rest = 1;
  for (int l = 0; l < levels; ++l) rest *= k;
  const Eigen::Index n = d * rest;

  ChainDilation out;
  out.kraus = phi;
  out.levels = levels;
  out.ancilla = k;

  // V h = sum_i (L_i* h) (x) k_i
  Matrix v = Matrix::Zero(d * k, d);
  for (int i = 0; i < r; ++i) {
    const Matrix ls = phi.ops()[static_cast<std::size_t>(i)].adjoint();
    for (Eigen::Index a = 0; a < d; ++a) v.row(a * k + i) = ls.row(a);
  }
  out.stinespring = v;
  double sres = op_norm(v.adjoint() * v - Matrix::Identity(d, d));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Matrix x = matrix_unit(d, i, j);
      sres = std::max(sres, op_norm(v.adjoint() * kron(x, Matrix::Identity(k, k)) * v - phi.apply(x)));
    }
  out.stinespring_residual = sres;
  if (sres > tol.eps_eq) throw Error(ErrorKind::InvariantViolation, "Stinespring identities fail (" + std::to_string(sres) + ")");

  // W* sends e_a (x) Omega to V e_a; remaining columns by Gram-Schmidt over the standard basis.
  const Eigen::Index dk = d * k;
  Matrix wstar = Matrix::Zero(dk, dk);
  std::vector<bool> filled(static_cast<std::size_t>(dk), false);
  for (Eigen::Index a = 0; a < d; ++a) {
    wstar.col(a * k) = v.col(a);
    filled[static_cast<std::size_t>(a * k)] = true;
  }
  Eigen::Index next_seed = 0;
  for (Eigen::Index c = 0; c < dk; ++c) {
    if (filled[static_cast<std::size_t>(c)]) continue;
    while (true) {
      Vector cand = Vector::Zero(dk);
      cand(next_seed++) = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index o = 0; o < dk; ++o)
          if (filled[static_cast<std::size_t>(o)]) cand -= wstar.col(o) * (wstar.col(o).adjoint() * cand)(0);
      const double nrm = cand.norm();
      if (nrm > 1e-6) {
        wstar.col(c) = cand / nrm;
        filled[static_cast<std::size_t>(c)] = true;
        break;
      }
      if (next_seed >= dk) throw Error(ErrorKind::InvariantViolation, "unitary completion ran out of seeds");
    }
  }
  const Matrix w = wstar.adjoint();

  // S: (H0, K1, ..., KL) -> (H0, K2, ..., KL, K1)
  Matrix s = Matrix::Zero(n, n);
  const Eigen::Index tail = rest / k;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index i1 = 0; i1 < k; ++i1)
      for (Eigen::Index low = 0; low < tail; ++low) {
        const Eigen::Index in = a * rest + i1 * tail + low;
        const Eigen::Index to = a * rest + low * k + i1;
        s(to, in) = 1.0;
      }
  const Matrix w1 = kron(w, Matrix::Identity(tail, tail));
  out.unitary = w1 * s;

  auto algebra = std::make_shared<const StarAlgebra>(full_algebra(n, tol));
  const Matrix& q = algebra->basis_vectors();
  Matrix map = q.adjoint() * (kron(out.unitary.conjugate(), out.unitary) * q);
  auto alpha = std::make_shared<const Endomorphism>(Endomorphism::validate(algebra, std::move(map), tol));

  Matrix omega = Matrix::Zero(k, k);
  omega(0, 0) = 1.0;
  const Matrix vac_tail = power_projector(omega, levels);
  const Projection p = Projection::from_matrix(kron(Matrix::Identity(d, d), vac_tail), tol);
  out.vacuum_increasing = is_increasing_projection(*alpha, p, tol);

  double hres = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Matrix x = matrix_unit(d, i, j);
      Vector c = algebra->coordinates(embed_system(x, rest));
      Matrix expected = x;
      for (int t = 1; t <= levels; ++t) {
        c = alpha->map() * c;
        expected = phi.apply(expected);
        const Matrix got = p.matrix() * algebra->from_coordinates(c) * p.matrix();
        hres = std::max(hres, op_norm(got - kron(expected, vac_tail)));
      }
    }
  out.heisenberg_residual = hres;
  if (hres > 1e-8) {
    throw Error(ErrorKind::InvariantViolation, "chain recovery fails (" + std::to_string(hres) + ")");
  }

  out.model.algebra = algebra;
  out.model.alpha = alpha;
  out.model.p = p;
  out.model.horizon = default_horizon(*algebra);
  out.model.tol = tol;
  return out;
}

Projection cyclic_cover(const Endomorphism& alpha, const Projection& e, const Tolerances& tol) {
  require_projection_in(alpha.algebra(), e, tol);
  Projection j = e;
  const int cap = static_cast<int>(alpha.algebra().ambient_dim()) + 1;
  for (int t = 0; t < cap; ++t) {
    Projection next = projection_join(j, Projection::from_matrix(alpha.apply(j.matrix()), tol), tol);
    if (next.rank() == j.rank()) break;
    j = std::move(next);
  }
  if (!is_fixed_projection(alpha, j, tol)) {
    throw Error(ErrorKind::InvariantViolation, "orbit join is not fixed by alpha");
  }
  return j;
}

ProjectiveCocycle powers_isometry_cocycle(EndoPtr alpha, const Matrix& u, int horizon, const Tolerances& tol) {
  const StarAlgebra& m = alpha->algebra();
  require_member(m, u, tol, "isometry");
  const double iso = op_norm(u.adjoint() * u - m.unit().matrix());
  if (iso > tol.eps_eq) throw Error(ErrorKind::InvalidModel, "u*u differs from the unit by " + std::to_string(iso));
  double inter = 0.0;
  for (Eigen::Index k = 0; k < m.dim(); ++k) {
    const Matrix a = m.element(k);
    inter = std::max(inter, op_norm(alpha->apply(a) * u - u * a));
  }
  if (inter > tol.eps_eq) {
    throw Error(ErrorKind::InvalidModel, "alpha(a) u != u a (residual " + std::to_string(inter) + ")");
  }
  std::vector<Projection> entries;
  Matrix ut = u;
  Vector shifted = m.coordinates(u);
  for (int t = 1; t <= horizon; ++t) {
    if (t > 1) {
      shifted = alpha->map() * shifted;
      ut = m.from_coordinates(shifted) * ut;
    }
    entries.push_back(Projection::from_matrix(ut * ut.adjoint(), tol));
  }
  return validate_cocycle(std::move(alpha), std::move(entries), tol);
}

double Sampler::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

double Sampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

cplx Sampler::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

int Sampler::below(int n) { return std::min(n - 1, static_cast<int>(uniform() * n)); }

Matrix Sampler::haar_unitary(Eigen::Index n) {
  Matrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = complex_normal();
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

namespace {

ModelSpec random_block_spec(Sampler& rng, std::span<const int> blocks, const Tolerances& tol) {
  const auto off = offsets_of(blocks);
  const int n = off.back();
  ModelSpec spec;
  spec.ambient_dim = n;
  spec.blocks.assign(blocks.begin(), blocks.end());
  spec.kind = EndoKind::BlockMap;
  spec.tol = tol;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    std::vector<std::vector<int>> options;
    std::vector<int> prefix;
    compositions(blocks, blocks[j], prefix, options, 256);
    spec.block_map.sources.push_back(options[static_cast<std::size_t>(rng.below(static_cast<int>(options.size())))]);
  }
  for (int b : blocks) spec.block_map.unitaries.emplace_back(rng.haar_unitary(b));

  const Model model = build_block_model(blocks, spec.block_map, std::nullopt, tol);
  const Endomorphism& alpha = *model.alpha;
  std::optional<Projection> fixed_fallback;
  for (int attempt = 0; attempt < 256; ++attempt) {
    Matrix e = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const int b = blocks[i];
      const int choice = rng.below(3);
      if (choice == 1 || (choice == 2 && b == 1)) {
        e.block(off[i], off[i], b, b).setIdentity();
      } else if (choice == 2) {
        const int rank = 1 + rng.below(b - 1);
        const Matrix u = rng.haar_unitary(b).leftCols(rank);
        e.block(off[i], off[i], b, b) = u * u.adjoint();
      }
    }
    Projection p = Projection::from_matrix(e, tol);
    if (p.is_zero()) continue;
    // p <- p ∧ alpha(p) until stable; the limit satisfies p <= alpha(p).
    for (int it = 0; it <= n && !p.is_zero(); ++it) {
      Projection next = projection_meet(p, Projection::from_matrix(alpha.apply(p.matrix()), tol), tol);
      if (next.rank() == p.rank()) break;
      p = std::move(next);
    }
    if (p.is_zero() || !model.algebra->contains(p.matrix(), tol)) continue;
    if (!is_increasing_projection(alpha, p, tol)) continue;
    if (is_fixed_projection(alpha, p, tol)) {
      if (!fixed_fallback) fixed_fallback = p;
      continue;
    }
    spec.projection = p.matrix();
    return spec;
  }
  if (fixed_fallback) {
    spec.projection = fixed_fallback->matrix();
    return spec;
  }
  throw Error(ErrorKind::SearchExhausted, "no nonzero increasing projection found in 256 attempts");
}

ModelSpec random_chain_spec(Sampler& rng, std::span<const int> sizes, const Tolerances& tol) {
  const int d = sizes.size() > 0 ? sizes[0] : 2;
  const int r = sizes.size() > 1 ? sizes[1] : 2;
  const int levels = sizes.size() > 2 ? sizes[2] : 2;
  if (d < 1 || r < 1 || levels < 1) throw Error(ErrorKind::InvalidModel, "chain sizes must be positive");
  const Matrix v = rng.haar_unitary(static_cast<Eigen::Index>(d) * r).leftCols(d);
  std::vector<Matrix> kraus;
  for (int i = 0; i < r; ++i) {
    Matrix ls(d, d);
    for (int a = 0; a < d; ++a) ls.row(a) = v.row(static_cast<Eigen::Index>(a) * r + i);
    kraus.push_back(ls.adjoint());
  }
  const ChainDilation chain = build_chain_dilation(KrausMap::validated(kraus, tol), levels, tol);
  ModelSpec spec;
  spec.ambient_dim = static_cast<int>(chain.model.algebra->ambient_dim());
  spec.kind = EndoKind::KrausChain;
  spec.kraus = std::move(kraus);
  spec.levels = levels;
  spec.tol = tol;
  const Projection p = chain.vacuum_increasing ? chain.model.p : cyclic_cover(*chain.model.alpha, chain.model.p, tol);
  spec.projection = p.matrix();
  return spec;
}

}  // namespace

ModelSpec random_model(std::uint64_t seed, std::span<const int> sizes, RandomStyle style, const Tolerances& tol) {
  tol.validate();
  Sampler rng(seed);
  ModelSpec spec = style == RandomStyle::Block ? random_block_spec(rng, sizes, tol) : random_chain_spec(rng, sizes, tol);
  const Model m = build_model(spec);
  if (!is_increasing_projection(*m.alpha, m.p, tol)) {
    throw Error(ErrorKind::InvariantViolation, "generated projection is not increasing");
  }
  return spec;
}

Model build_model(const ModelSpec& spec) {
  const Tolerances& tol = spec.tol;
  tol.validate();
  Model m;
  switch (spec.kind) {
    case EndoKind::BlockMap: {
      if (spec.blocks.empty()) throw Error(ErrorKind::InvalidModel, "block_map requires \"blocks\"");
      m = build_block_model(spec.blocks, spec.block_map, spec.projection, tol);
      break;
    }
    case EndoKind::KrausChain: {
      const ChainDilation chain = build_chain_dilation(KrausMap::validated(spec.kraus, tol), spec.levels, tol, spec.ancilla);
      m = chain.model;
      if (spec.projection) m.p = projection_in(*m.algebra, *spec.projection, tol);
      break;
    }
    case EndoKind::BasisMap: {
      AlgebraPtr algebra;
      if (!spec.blocks.empty()) {
        algebra = std::make_shared<const StarAlgebra>(block_algebra(spec.blocks, tol));
      } else if (!spec.generators.empty()) {
        algebra = std::make_shared<const StarAlgebra>(span_closure(spec.generators, spec.ambient_dim, tol));
      } else {
        throw Error(ErrorKind::InvalidModel, "model needs \"blocks\" or \"generators\"");
      }
      if (spec.domain.size() != spec.images.size() || spec.domain.empty()) {
        throw Error(ErrorKind::InvalidModel, "basis_map needs matching, nonempty \"domain\" and \"images\"");
      }
      const Eigen::Index d = algebra->dim();
      const Eigen::Index cnt = static_cast<Eigen::Index>(spec.domain.size());
      Matrix dc(d, cnt), ic(d, cnt);
      for (Eigen::Index k = 0; k < cnt; ++k) {
        require_member(*algebra, spec.domain[static_cast<std::size_t>(k)], tol, "domain element");
        require_member(*algebra, spec.images[static_cast<std::size_t>(k)], tol, "image element");
        dc.col(k) = algebra->coordinates(spec.domain[static_cast<std::size_t>(k)]);
        ic.col(k) = algebra->coordinates(spec.images[static_cast<std::size_t>(k)]);
      }
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(dc.adjoint());
      cod.setThreshold(tol.eps_rank);
      if (cod.rank() != d) throw Error(ErrorKind::InvalidModel, "domain does not span the algebra");
      // map * dc = ic  <=>  dc* map* = ic*
      Matrix map = cod.solve(ic.adjoint()).adjoint();
      const double fit = (map * dc - ic).colwise().norm().maxCoeff();
      if (fit > tol.eps_eq) throw Error(ErrorKind::InvalidModel, "basis_map images are not linear in the domain");
      m.algebra = algebra;
      m.alpha = std::make_shared<const Endomorphism>(Endomorphism::validate(algebra, std::move(map), tol));
      m.p = spec.projection ? projection_in(*algebra, *spec.projection, tol) : algebra->unit();
      m.tol = tol;
      break;
    }
  }
  if (spec.ambient_dim != 0 && spec.ambient_dim != m.algebra->ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "ambient_dim " + std::to_string(spec.ambient_dim) +
                                                  " does not match the algebra (" +
                                                  std::to_string(m.algebra->ambient_dim()) + ")");
  }
  m.horizon = spec.horizon > 0 ? spec.horizon : default_horizon(*m.algebra);
  m.tol = tol;
  return m;
}

Model swap_in_model(const Tolerances& tol) {
  const int blocks[] = {2, 2};
  BlockMap map{{{1}, {1}}, {}};
  Matrix p = Matrix::Zero(4, 4);
  p(2, 2) = 1.0;
  return build_block_model(blocks, map, p, tol);
}

Model identity_model(std::span<const int> blocks, const Matrix& p, const Tolerances& tol) {
  BlockMap map;
  for (std::size_t j = 0; j < blocks.size(); ++j) map.sources.push_back({static_cast<int>(j)});
  return build_block_model(blocks, map, p, tol);
}

Model straddle_model(const Matrix& u, const Matrix& e, const Tolerances& tol) {
  const int blocks[] = {2, 1, 1};
  BlockMap map{{{1, 2}, {1}, {2}}, {u, std::nullopt, std::nullopt}};
  Matrix p = Matrix::Zero(4, 4);
  p.topLeftCorner(2, 2) = e;
  p(2, 2) = 1.0;
  p(3, 3) = 1.0;
  return build_block_model(blocks, map, p, tol);
}

KrausMap amplitude_damping(double gamma, const Tolerances& tol) {
  Matrix l0 = Matrix::Zero(2, 2), l1 = Matrix::Zero(2, 2);
  l0(0, 0) = 1.0;
  l0(1, 1) = std::sqrt(1.0 - gamma);
  l1(1, 0) = std::sqrt(gamma);
  return KrausMap::validated({l0, l1}, tol);
}

}  // namespace e0
