#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "u1fock/heisenberg.hpp"

using namespace u1fock;

namespace {

// Brute force: count multiplicity vectors (m_1..m_n) with sum i*m_i = n.
long brute_partition_count(int n) {
  std::function<long(int, int)> rec = [&](int remaining, int part) -> long {
    if (part == 0) return remaining == 0 ? 1 : 0;
    long total = 0;
    for (int m = 0; m * part <= remaining; ++m) total += rec(remaining - m * part, part - 1);
    return total;
  };
  return rec(n, n);
}

Arena<mpq_class> arena_q(int cutoff, int jmin = -2, int jmax = 2, mpq_class alpha0 = mpq_class(1, 2)) {
  return Arena<mpq_class>{Truncation{cutoff, {jmin, jmax}}, alpha0, 0.0};
}

// <J_{-lambda}Omega, J_{-mu}Omega> by moving annihilators through creators.
mpq_class brute_gram(const Partition& lambda, const Partition& mu) {
  auto arena = arena_q(lambda.level() + mu.level());
  SectorState<mpq_class> v = sector_vacuum<mpq_class>();
  for (int p : mu.parts()) v = apply_J(-p, v, arena);
  for (int p : lambda.parts()) v = apply_J(p, v, arena);
  return v.coefficient(SectorKey{0, Partition{}});
}

}  // namespace

TEST_CASE("enumerate_basis counts and ordering") {
  Truncation t{12, {-2, 2}};
  auto four = enumerate_basis(t, 0, 4);
  REQUIRE(four.size() == static_cast<size_t>(brute_partition_count(4)));
  CHECK(four.size() == 5);
  CHECK(four[0] == Partition({4}));
  CHECK(four[1] == Partition({3, 1}));
  CHECK(four[2] == Partition({2, 2}));
  CHECK(four[4] == Partition({1, 1, 1, 1}));
  auto zero = enumerate_basis(t, 0, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].empty());
  CHECK(enumerate_basis(t, 1, 12).size() == static_cast<size_t>(brute_partition_count(12)));
  CHECK(enumerate_basis(t, 1, 12).size() == 77);
  for (int n = 0; n <= 20; ++n) CHECK(partition_count(n) == brute_partition_count(n));
  CHECK_THROWS_AS(enumerate_basis(t, 3, 2), std::out_of_range);
  CHECK_THROWS_AS(enumerate_basis(t, 0, 13), std::out_of_range);
}

TEST_CASE("partition invariants") {
  CHECK_THROWS_AS(Partition({1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Partition({2, 0}), std::invalid_argument);
  Partition p({3, 1, 1});
  CHECK(p.level() == 5);
  CHECK(p.with_part(2) == Partition({3, 2, 1, 1}));
  CHECK(p.without_part(1) == Partition({3, 1}));
  CHECK(p.merged(Partition({2, 1})) == Partition({3, 2, 1, 1, 1}));
  CHECK(partition_difference(p, Partition({3, 1})) == Partition({1}));
  CHECK_THROWS(partition_difference(p, Partition({2})));
  int count = 0;
  for_each_submultiset(p, [&](const Partition&, const mpz_class&) { ++count; });
  CHECK(count == 6);  // (1+1)*(2+1)
}

TEST_CASE("gram matches repeated commutator moves") {
  CHECK(gram<mpq_class>(Partition({1}), Partition({1})) == 1);
  CHECK(gram<mpq_class>(Partition({2, 1}), Partition({3})) == 0);
  CHECK(gram<mpq_class>(Partition({2, 2}), Partition({2, 2})) == 8);
  CHECK(brute_gram(Partition({2, 2}), Partition({2, 2})) == 8);
  for (int a = 0; a <= 6; ++a)
    for (const auto& lambda : partitions_of(a))
      for (const auto& mu : partitions_of(a)) CHECK(gram<mpq_class>(lambda, mu) == brute_gram(lambda, mu));
}

TEST_CASE("inner products of sector and tensor states") {
  auto omega = sector_vacuum<mpq_class>();
  CHECK(inner_product(omega, omega) == 1);
  auto t = tensor_basis<mpq_class>(0, Partition({1}), Partition{});
  CHECK(inner_product(t, t) == 1);
  CHECK(inner_product(sector_vacuum<mpq_class>(0), sector_vacuum<mpq_class>(1)) == 0);
  auto tt = tensor_basis<mpq_class>(0, Partition({2, 2}), Partition({3}));
  CHECK(inner_product(tt, tt) == 8 * 3);
}

TEST_CASE("inner product is Hermitian and positive on random states") {
  std::mt19937_64 rng(11);
  auto basis = enumerate_basis_upto(5);
  auto random_state = [&] {
    TensorState<GaussianRational> v;
    const int terms = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < terms; ++i) {
      const auto& l = basis[rng() % basis.size()];
      const auto& r = basis[rng() % basis.size()];
      v.add(TensorKey{static_cast<int>(rng() % 3) - 1, l, r},
            GaussianRational(mpq_class(static_cast<long>(rng() % 11) - 5, 3),
                             mpq_class(static_cast<long>(rng() % 11) - 5, 7)));
    }
    return v;
  };
  for (int i = 0; i < 120; ++i) {
    auto v = random_state();
    auto w = random_state();
    CHECK(inner_product(v, w) == inner_product(w, v).conj());
    auto vv = inner_product(v, v);
    CHECK(sgn(vv.im()) == 0);
    CHECK(sgn(vv.re()) >= 0);
  }
  for (const auto& p : basis) CHECK(sgn(gram<mpq_class>(p, p)) > 0);
}

TEST_CASE("J adjointness against the Gram form") {
  auto arena = arena_q(10);
  auto basis = enumerate_basis_upto(6);
  for (int m = 1; m <= 4; ++m) {
    for (const auto& a : basis) {
      for (const auto& b : basis) {
        if (a.level() + m != b.level()) continue;
        for (int j = -1; j <= 1; ++j) {
          SectorState<mpq_class> v(SectorKey{j, a}, 1);
          SectorState<mpq_class> w(SectorKey{j, b}, 1);
          CHECK(inner_product(apply_J(-m, v, arena), w) == inner_product(v, apply_J(m, w, arena)));
        }
      }
    }
  }
}

TEST_CASE("state dump round trip") {
  TensorState<GaussianRational> v;
  v.add(TensorKey{1, Partition({2, 1}), Partition{}}, GaussianRational(mpq_class(-3, 4), mpq_class(1, 5)));
  v.add(TensorKey{0, Partition{}, Partition({1})}, GaussianRational(mpq_class(2)));
  std::stringstream ss;
  dump_state(ss, v);
  auto first_line = ss.str().substr(0, ss.str().find('\n'));
  CHECK(first_line == R"({"j":0,"left":[],"right":[1],"re":"2/1","im":"0/1"})");
  auto back = load_tensor_state<GaussianRational>(ss);
  CHECK(back.entries() == v.entries());

  TensorState<FloatComplex> f;
  f.add(TensorKey{0, Partition({3}), Partition({1, 1})}, FloatComplex(0.1, -2.5));
  std::stringstream sf;
  dump_state(sf, f);
  CHECK(load_tensor_state<FloatComplex>(sf).entries() == f.entries());
}
