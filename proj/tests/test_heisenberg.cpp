#include <catch_amalgamated.hpp>

#include "u1fock/heisenberg.hpp"

using namespace u1fock;

namespace {
Arena<mpq_class> arena_q(int cutoff) { return {Truncation{cutoff, {-2, 2}}, mpq_class(1, 2), 0.0}; }
}  // namespace

TEST_CASE("apply_J on simple vectors") {
  auto arena = arena_q(12);
  SectorState<mpq_class> j1(SectorKey{0, Partition({1})}, 1);
  auto r = apply_J(1, j1, arena);
  CHECK(r.entries() == sector_vacuum<mpq_class>(0).entries());

  auto charged = sector_vacuum<mpq_class>(1);
  CHECK(apply_J(0, charged, arena).coefficient(SectorKey{1, Partition{}}) == mpq_class(1, 2));

  auto created = apply_J(-2, sector_vacuum<mpq_class>(0), arena);
  CHECK(created.coefficient(SectorKey{0, Partition({2})}) == 1);
  CHECK(created.size() == 1);

  // m * multiplicity on contraction
  SectorState<mpq_class> v(SectorKey{0, Partition({2, 2, 1})}, 1);
  CHECK(apply_J(2, v, arena).coefficient(SectorKey{0, Partition({2, 1})}) == 4);
  CHECK(apply_J(3, v, arena).empty());
}

TEST_CASE("apply_J_tensor acts on one factor") {
  auto arena = arena_q(12);
  auto v = tensor_basis<mpq_class>(0, Partition({1}), Partition{});
  CHECK(apply_J_tensor(Side::left, 1, v, arena).entries() == tensor_vacuum<mpq_class>(0).entries());

  auto c = tensor_vacuum<mpq_class>(1);
  auto r = apply_J_tensor(Side::right, 0, c, arena);
  CHECK(r.coefficient(TensorKey{1, Partition{}, Partition{}}) == mpq_class(1, 2));

  auto zero_cut = arena_q(0);
  auto o = apply_J_tensor(Side::left, -1, tensor_vacuum<mpq_class>(0), zero_cut);
  CHECK(o.empty());
  CHECK(o.overflow());
}

TEST_CASE("current relations on the overflow-free interior") {
  const int levels = 6;
  const int max_mode = 6;
  auto arena = arena_q(levels + 2 * max_mode);
  for (int j = -2; j <= 2; ++j) {
    for (const auto& p : enumerate_basis_upto(levels)) {
      SectorState<mpq_class> v(SectorKey{j, p}, 1);
      for (int m = -max_mode; m <= max_mode; ++m) {
        for (int n = -max_mode; n <= max_mode; ++n) {
          auto lhs = apply_J(m, apply_J(n, v, arena), arena);
          lhs -= apply_J(n, apply_J(m, v, arena), arena);
          REQUIRE_FALSE(lhs.overflow());
          SectorState<mpq_class> rhs;
          if (m == -n) rhs = v * mpq_class(m);
          CHECK(lhs.entries() == rhs.entries());
        }
      }
    }
  }
}

TEST_CASE("left and right tensor actions commute") {
  auto arena = arena_q(10);
  for (const auto& l : enumerate_basis_upto(3)) {
    for (const auto& r : enumerate_basis_upto(3)) {
      auto v = tensor_basis<mpq_class>(1, l, r);
      for (int m = -3; m <= 3; ++m) {
        for (int n = -3; n <= 3; ++n) {
          auto a = apply_J_tensor(Side::left, m, apply_J_tensor(Side::right, n, v, arena), arena);
          auto b = apply_J_tensor(Side::right, n, apply_J_tensor(Side::left, m, v, arena), arena);
          CHECK(a.entries() == b.entries());
        }
      }
    }
  }
}

TEST_CASE("truncation drops and flags components above the cutoff") {
  auto arena = arena_q(3);
  SectorState<mpq_class> v(SectorKey{0, Partition({2, 1})}, 1);
  auto r = apply_J(-1, v, arena);
  CHECK(r.empty());
  CHECK(r.overflow());
  auto ok = apply_J(1, v, arena);
  CHECK_FALSE(ok.overflow());
}
