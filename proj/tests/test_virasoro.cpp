#include <catch_amalgamated.hpp>

#include "u1fock/virasoro.hpp"

using namespace u1fock;

namespace {

Arena<mpq_class> arena_q(int cutoff) { return {Truncation{cutoff, {-2, 2}}, mpq_class(1, 2), 0.0}; }

// L_n straight from the normal-ordered double sum, k in [-K, K], built out of
// apply_J on states. Independent of the per-monomial kernel.
SectorState<mpq_class> sugawara_by_double_sum(int n, const SectorState<mpq_class>& v, const Arena<mpq_class>& a,
                                              int K) {
  SectorState<mpq_class> out;
  for (int k = -K; k <= K; ++k) {
    const int x = n - k;
    const int y = k;
    SectorState<mpq_class> t = x <= y ? apply_J(x, apply_J(y, v, a), a) : apply_J(y, apply_J(x, v, a), a);
    out.add_scaled(t, mpq_class(1, 2));
  }
  return out;
}

}  // namespace

TEST_CASE("L0 on vacua and the grading") {
  auto arena = arena_q(12);
  for (int j = -2; j <= 2; ++j) {
    auto r = apply_L(0, sector_vacuum<mpq_class>(j), arena);
    mpq_class beta = arena.charge(j);
    mpq_class expect = beta * beta / 2;
    CHECK(r.coefficient(SectorKey{j, Partition{}}) == expect);
    CHECK(r.entries() == sugawara_by_double_sum(0, sector_vacuum<mpq_class>(j), arena, 12).entries());
  }
  SectorState<mpq_class> v(SectorKey{0, Partition({1})}, 1);
  CHECK(apply_L(0, v, arena).entries() == v.entries());
  CHECK(apply_L(2, sector_vacuum<mpq_class>(0), arena).empty());
  CHECK(apply_L(-1, sector_vacuum<mpq_class>(0), arena).empty());
  // L_{-1} Omega_beta = beta J_{-1} Omega_beta
  auto lm1 = apply_L(-1, sector_vacuum<mpq_class>(2), arena);
  CHECK(lm1.coefficient(SectorKey{2, Partition({1})}) == 1);
}

TEST_CASE("L0 eigenvalue equals level plus sector offset") {
  auto arena = arena_q(10);
  for (int j = -2; j <= 2; ++j) {
    for (const auto& p : enumerate_basis_upto(8)) {
      SectorState<mpq_class> v(SectorKey{j, p}, 1);
      mpq_class beta = arena.charge(j);
      CHECK(apply_L(0, v, arena).entries() == (v * mpq_class(p.level() + beta * beta / 2)).entries());
    }
  }
}

TEST_CASE("kernel agrees with the explicit double sum") {
  auto arena = arena_q(14);
  for (int j : {0, 1, -2})
    for (const auto& p : enumerate_basis_upto(5))
      for (int n = -4; n <= 4; ++n) {
        SectorState<mpq_class> v(SectorKey{j, p}, 1);
        CHECK(apply_L(n, v, arena).entries() == sugawara_by_double_sum(n, v, arena, 12).entries());
      }
}

TEST_CASE("Virasoro relations with c = 1") {
  const int levels = 5;
  const int max_mode = 3;
  auto arena = arena_q(levels + 2 * max_mode);
  for (int j = -2; j <= 2; ++j) {
    for (const auto& p : enumerate_basis_upto(levels)) {
      SectorState<mpq_class> v(SectorKey{j, p}, 1);
      for (int m = -max_mode; m <= max_mode; ++m)
        for (int n = -max_mode; n <= max_mode; ++n) {
          auto lhs = apply_L(m, apply_L(n, v, arena), arena) - apply_L(n, apply_L(m, v, arena), arena);
          auto rhs = apply_L(m + n, v, arena) * mpq_class(m - n);
          if (m == -n) rhs.add_scaled(v, mpq_class(m * (m * m - 1), 12));
          REQUIRE_FALSE(lhs.overflow());
          CHECK((lhs - rhs).empty());
        }
    }
  }
}

TEST_CASE("[L_m, J_n] = -n J_{m+n}") {
  auto arena = arena_q(14);
  for (int j = -1; j <= 1; ++j)
    for (const auto& p : enumerate_basis_upto(5))
      for (int m = -3; m <= 3; ++m)
        for (int n = -3; n <= 3; ++n) {
          SectorState<mpq_class> v(SectorKey{j, p}, 1);
          auto lhs = apply_L(m, apply_J(n, v, arena), arena) - apply_J(n, apply_L(m, v, arena), arena);
          auto rhs = apply_J(m + n, v, arena) * mpq_class(-n);
          CHECK((lhs - rhs).empty());
        }
}

TEST_CASE("Lorentz generators") {
  auto arena = arena_q(12);
  auto omega = tensor_vacuum<mpq_class>(0);
  CHECK(apply_lorentz(LorentzGenerator::k0, omega, arena).empty());
  auto v = tensor_basis<mpq_class>(0, Partition({1}), Partition{});
  CHECK(apply_lorentz(LorentzGenerator::k0, v, arena).entries() == v.entries());
  CHECK(apply_lorentz(LorentzGenerator::l_plus, omega, arena).empty());
  CHECK(apply_lorentz(LorentzGenerator::l_minus, omega, arena).empty());

  // [l1, l-1] = 2 k0 and [k0, l+-1] = -+ l+-1 on interior tensors
  for (int j = -1; j <= 1; ++j)
    for (const auto& l : enumerate_basis_upto(3))
      for (const auto& r : enumerate_basis_upto(3)) {
        auto w = tensor_basis<mpq_class>(j, l, r);
        auto lp = [&](const TensorState<mpq_class>& x) { return apply_lorentz(LorentzGenerator::l_plus, x, arena); };
        auto lm = [&](const TensorState<mpq_class>& x) { return apply_lorentz(LorentzGenerator::l_minus, x, arena); };
        auto k0 = [&](const TensorState<mpq_class>& x) { return apply_lorentz(LorentzGenerator::k0, x, arena); };
        CHECK((lp(lm(w)) - lm(lp(w)) - k0(w) * mpq_class(2)).empty());
        CHECK((k0(lp(w)) - lp(k0(w)) + lp(w)).empty());
        CHECK((k0(lm(w)) - lm(k0(w)) - lm(w)).empty());
      }
}
