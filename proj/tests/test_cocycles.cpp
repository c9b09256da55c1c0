#include <doctest.h>

#include "helpers.hpp"

using namespace e0;
using th::diag;

namespace {

std::vector<Projection> constant(const Projection& q, int n) { return std::vector<Projection>(static_cast<std::size_t>(n), q); }

}  // namespace

TEST_CASE("validate_cocycle") {
  const Model swap = swap_in_model();
  const auto unit = swap.alpha->algebra().unit();
  CHECK_NOTHROW(validate_cocycle(swap.alpha, constant(unit, 6), {}));

  const auto lower = th::proj(diag({0, 0, 1, 1}));
  CHECK_NOTHROW(validate_cocycle(swap.alpha, constant(lower, 6), {}));

  try {
    validate_cocycle(swap.alpha, {lower, unit}, {});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CocycleIdentityViolation);
    CHECK(std::string(e.what()).find("(1, 1)") != std::string::npos);
  }

  try {
    validate_cocycle(swap.alpha, {lower, Projection::zero(4)}, {});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroEntry);
  }

  // 0 + e11 does not commute with alpha(M) = {b + b}
  try {
    validate_cocycle(swap.alpha, constant(th::proj(diag({0, 0, 1, 0})), 3), {});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CommutationViolation);
  }
}

TEST_CASE("cocycle order") {
  const Model swap = swap_in_model();
  const auto trivial = validate_cocycle(swap.alpha, constant(swap.alpha->algebra().unit(), 5), {});
  const auto c = validate_cocycle(swap.alpha, constant(th::proj(diag({0, 0, 1, 1})), 5), {});
  CHECK(cocycle_leq(c, trivial, {}));
  CHECK(cocycle_leq(c, c, {}));
  CHECK_FALSE(cocycle_leq(trivial, c, {}));
}

TEST_CASE("partition products") {
  const Model swap = swap_in_model();
  const auto f = validate_family(swap.alpha, constant(th::proj(diag({0, 0, 1, 1})), 6), {});
  const int single[] = {4};
  CHECK(projection_equal(partition_product(f, single, {}), f.at(4), {}));
  const int two[] = {1, 4};
  const int fine[] = {1, 2, 3, 4};
  CHECK(projection_leq(partition_product(f, single, {}), partition_product(f, two, {}), {}));
  CHECK(projection_equal(partition_product(f, fine, {}), th::proj(diag({0, 0, 1, 1})), {}));

  const int bad[] = {2, 2};
  CHECK_THROWS_AS(partition_product(f, bad, {}), Error);
  const int late[] = {1, 7};
  CHECK_THROWS_AS(partition_product(f, late, {}), Error);
}

TEST_CASE("cocycle_from_family") {
  const Model swap = swap_in_model();
  const auto unit = swap.alpha->algebra().unit();
  const auto q1 = cocycle_from_family(validate_family(swap.alpha, constant(unit, 5), {}), {});
  for (int t = 1; t <= 5; ++t) CHECK(projection_equal(q1.at(t), unit, {}));

  const auto lower = th::proj(diag({0, 0, 1, 1}));
  const auto q2 = cocycle_from_family(validate_family(swap.alpha, constant(lower, 5), {}), {});
  for (int t = 1; t <= 5; ++t) CHECK(projection_equal(q2.at(t), lower, {}));

  const int blocks[] = {2, 2};
  const Model id = identity_model(blocks, diag({1, 0, 0, 0}));
  const auto carrier = central_carrier(id.alpha->algebra(), id.p, {});
  const auto q3 = cocycle_from_family(validate_family(id.alpha, constant(carrier, 4), {}), {});
  for (int t = 1; t <= 4; ++t) CHECK(projection_equal(q3.at(t), carrier, {}));
}

TEST_CASE("minimal_cocycle_over") {
  const Model swap = swap_in_model();
  const auto unit = swap.alpha->algebra().unit();
  const auto trivial = minimal_cocycle_over(swap.alpha, unit, 6, {});
  for (int t = 1; t <= 6; ++t) CHECK(projection_equal(trivial.at(t), unit, {}));

  const auto q = minimal_cocycle_over(swap.alpha, swap.p, 6, {});
  for (int t = 1; t <= 6; ++t) CHECK(projection_equal(q.at(t), th::proj(diag({0, 0, 1, 1})), {}));

  const int blocks[] = {1, 2};
  const Model id = identity_model(blocks, diag({0, 1, 0}));
  const auto qi = minimal_cocycle_over(id.alpha, id.p, 4, {});
  CHECK(projection_equal(qi.at(3), th::proj(diag({0, 1, 1})), {}));

  try {
    minimal_cocycle_over(swap.alpha, th::proj(diag({1, 0, 0, 0})), 4, {});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotIncreasing);
  }
}

TEST_CASE("cocycle_limit") {
  const Model swap = swap_in_model();
  const auto trivial = minimal_cocycle_over(swap.alpha, swap.alpha->algebra().unit(), 6, {});
  CHECK(projection_equal(cocycle_limit(trivial, {}).limit, swap.alpha->algebra().unit(), {}));

  const auto q = minimal_cocycle_over(swap.alpha, swap.p, 6, {});
  const auto lim = cocycle_limit(q, {});
  CHECK(projection_equal(lim.limit, th::proj(diag({0, 0, 1, 1})), {}));
  CHECK(projection_leq(lim.limit, q.at(1), {}));
  CHECK(lim.fixed_residual < 1e-10);

  // one entry cannot show stabilization
  const auto short_q = minimal_cocycle_over(swap.alpha, swap.p, 1, {});
  CHECK_THROWS_AS(cocycle_limit(short_q, {}), Error);
}

TEST_CASE("associated semigroup") {
  const Model swap = swap_in_model();
  Sampler rng(8);
  const Matrix a = th::random_element(rng, swap.alpha->algebra());

  const auto trivial = minimal_cocycle_over(swap.alpha, swap.alpha->algebra().unit(), 5, {});
  const auto b0 = associated_semigroup(trivial, {});
  for (int t = 0; t <= 5; ++t) CHECK(op_norm(b0.apply(t, a) - swap.alpha->apply_power(a, t)) < 1e-12);

  const auto q = minimal_cocycle_over(swap.alpha, swap.p, 5, {});
  const auto beta = associated_semigroup(q, {});
  Matrix expect = Matrix::Zero(4, 4);
  expect.bottomRightCorner(2, 2) = a.bottomRightCorner(2, 2);
  for (int t = 1; t <= 5; ++t) {
    CHECK(op_norm(beta.apply(t, a) - expect) < 1e-12);
    CHECK(op_norm(beta.apply(t, Matrix::Identity(4, 4)) - q.at(t).matrix()) < 1e-12);
  }
  CHECK((beta.map(2) - beta.map(1) * beta.map(1)).norm() < 1e-10);
}

TEST_CASE("dominating family of a straddle corner") {
  Sampler rng(12);
  const Model s = straddle_model(rng.haar_unitary(2), th::unit(2, 0, 0));
  const auto f = dominating_family(s.alpha, s.p, s.horizon, {});
  for (int t = 1; t <= f.horizon(); ++t) CHECK(projection_leq(s.p, f.at(t), {}));
  const auto q = cocycle_from_family(f, {});
  for (int t = 1; t <= q.horizon(); ++t) CHECK(projection_leq(f.at(t), q.at(t), {}));
  for (int t = 2; t <= q.horizon(); ++t) CHECK(projection_leq(q.at(t), q.at(t - 1), {}));
}
