#pragma once

// Model construction: block endomorphisms, tensor-chain dilations of Kraus
// maps, Powers-style isometry cocycles, seeded random models.

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "e0/minimality.hpp"

namespace e0 {

/// phi(x) = sum_i L_i x L_i*, unital: sum_i L_i L_i* = 1.
class KrausMap {
 public:
  KrausMap() = default;
  /// Throws InvalidModel on empty or non-square input, UnitalityViolation otherwise.
  static KrausMap validated(std::vector<Matrix> ops, const Tolerances& tol);

  Eigen::Index dim() const { return ops_.empty() ? 0 : ops_.front().rows(); }
  int rank() const { return static_cast<int>(ops_.size()); }
  const std::vector<Matrix>& ops() const { return ops_; }

  Matrix apply(const Matrix& x) const;
  Matrix apply_power(const Matrix& x, int t) const;

 private:
  std::vector<Matrix> ops_;
};

/// Target block j receives the direct sum of the listed source blocks
/// (0-based), conjugated by unitaries[j] when present.
struct BlockMap {
  std::vector<std::vector<int>> sources;
  std::vector<std::optional<Matrix>> unitaries;
};

enum class EndoKind { BasisMap, BlockMap, KrausChain };

struct ModelSpec {
  int ambient_dim = 0;
  std::vector<int> blocks;          // block-diagonal algebra, or
  std::vector<Matrix> generators;   // algebra generated by these
  EndoKind kind = EndoKind::BlockMap;
  std::vector<Matrix> domain;       // basis_map: alpha(domain[k]) = images[k]
  std::vector<Matrix> images;
  BlockMap block_map;
  std::vector<Matrix> kraus;        // kraus_chain
  int levels = 0;
  int ancilla = 0;                  // 0: number of Kraus operators
  std::optional<Matrix> projection; // default: unit of M
  int horizon = 0;                  // 0: 2N
  Tolerances tol;
};

struct Model {
  AlgebraPtr algebra;
  EndoPtr alpha;
  Projection p;
  int horizon = 0;
  Tolerances tol;
};

/// Validates the description and builds the model. Throws InvalidModel,
/// DimensionMismatch, NotAProjection, NotMember or an endomorphism error.
/// The projection is not required to be increasing here.
Model build_model(const ModelSpec& spec);

/// M = sum of M_{n_i}, alpha(a) = sum_j U_j (sum_{s in sources_j} a_s) U_j*.
Model build_block_model(std::span<const int> blocks, const BlockMap& map,
                        std::optional<Matrix> projection, const Tolerances& tol);

struct ChainDilation {
  Model model;                      // p is the vacuum projection 1 (x) |Omega><Omega|^L
  KrausMap kraus;
  int levels = 0;
  int ancilla = 0;
  Matrix stinespring;               // V: C^d -> C^d (x) K
  Matrix unitary;                   // U = W_1 S, alpha = Ad U
  bool vacuum_increasing = false;
  double stinespring_residual = 0;  // max(||V*V - 1||, ||V*(x (x) 1)V - phi(x)||)
  double heisenberg_residual = 0;   // max ||p alpha^t(x (x) 1) p - phi^t(x) (x) vacuum||, t <= L
};

/// Truncated tensor-chain dilation on C^d (x) K^{(x)L}. Throws
/// InvariantViolation when the Stinespring or Heisenberg identities fail.
ChainDilation build_chain_dilation(const KrausMap& phi, int levels, const Tolerances& tol,
                                   int ancilla = 0);

/// x (x) 1 on C^d (x) K^{(x)L}.
Matrix embed_system(const Matrix& x, Eigen::Index rest);

/// Join of alpha^t(e), t >= 0. Verified fixed by alpha.
Projection cyclic_cover(const Endomorphism& alpha, const Projection& e, const Tolerances& tol);

/// q_t = u_t u_t*, u_t = alpha^{t-1}(u) ... alpha(u) u, for an isometry u in M
/// with alpha(a) u = u a. Throws InvalidModel when u is not an isometry or
/// does not intertwine.
ProjectiveCocycle powers_isometry_cocycle(EndoPtr alpha, const Matrix& u, int horizon,
                                          const Tolerances& tol);

enum class RandomStyle { Block, Chain };

/// Deterministic in (seed, sizes, style, tolerances). Block style: sizes are
/// block sizes. Chain style: sizes = {d, r, L} (r defaults to 2, L to 2).
/// Throws SearchExhausted when no suitable increasing projection turns up.
ModelSpec random_model(std::uint64_t seed, std::span<const int> sizes, RandomStyle style,
                       const Tolerances& tol = {});

/// Gaussian and Haar samplers on a fixed engine (portable across platforms).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform();
  double normal();
  cplx complex_normal();
  int below(int n);
  Matrix haar_unitary(Eigen::Index n);

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fixtures.

/// M_2 + M_2, alpha(a + b) = b + b, p = 0 + e_11.
Model swap_in_model(const Tolerances& tol = {});
/// Identity endomorphism on the given blocks with projection p.
Model identity_model(std::span<const int> blocks, const Matrix& p, const Tolerances& tol = {});
/// M_2 + C + C, alpha(a + b + c) = U diag(b, c) U* + b + c, p = e + 1 + 1.
/// Increasing, with non-multiplicative compression for generic U.
Model straddle_model(const Matrix& u, const Matrix& e, const Tolerances& tol = {});

/// Amplitude-damping style pair on C^2 with parameter gamma.
KrausMap amplitude_damping(double gamma, const Tolerances& tol = {});

}  // namespace e0
