#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <sstream>

#include "u1fock/vertex.hpp"
#include "u1fock/virasoro.hpp"

using namespace u1fock;

namespace {

using Q = mpq_class;

Arena<Q> arena_q(int cutoff, Q alpha0 = Q(1, 2)) { return {Truncation{cutoff, {-4, 4}}, alpha0, 0.0}; }

// Commuting-variable power series: exp(sum_n c_n x_n) truncated at total
// weight `max_level`, keyed by the partition of weights.
std::map<Partition, Q> exp_series(const std::map<int, Q>& linear, int max_level) {
  std::map<Partition, Q> result{{Partition{}, Q(1)}};
  std::map<Partition, Q> power{{Partition{}, Q(1)}};
  for (int k = 1; k <= max_level; ++k) {
    std::map<Partition, Q> next;
    for (const auto& [mono, c] : power)
      for (const auto& [n, cn] : linear)
        if (mono.level() + n <= max_level) next[mono.with_part(n)] += c * cn;
    power = next;
    Q fact = 1;
    for (int i = 2; i <= k; ++i) fact *= i;
    for (const auto& [mono, c] : power) result[mono] += c / fact;
  }
  return result;
}

}  // namespace

TEST_CASE("expand_E against an independent power-series exponential") {
  const Q alpha(3, 5);
  const int cutoff = 8;
  std::map<int, Q> lin_minus, lin_plus;
  for (int n = 1; n <= cutoff; ++n) {
    lin_minus[n] = alpha / n;
    lin_plus[n] = -alpha / n;
  }
  auto minus_series = exp_series(lin_minus, cutoff);
  auto plus_series = exp_series(lin_plus, cutoff);
  auto em = expand_E(ESign::minus, alpha, cutoff);
  auto ep = expand_E(ESign::plus, alpha, cutoff);
  for (int k = 0; k <= cutoff; ++k) {
    for (const auto& t : em[static_cast<size_t>(k)]) CHECK(t.coefficient == minus_series[t.monomial]);
    for (const auto& t : ep[static_cast<size_t>(k)]) CHECK(t.coefficient == plus_series[t.monomial]);
  }
  // spot values
  REQUIRE(em[0].size() == 1);
  CHECK(em[0][0].coefficient == 1);
  CHECK(em[1][0].monomial == Partition({1}));
  CHECK(em[1][0].coefficient == alpha);
  for (const auto& t : ep[2]) {
    if (t.monomial == Partition({1, 1})) CHECK(t.coefficient == alpha * alpha / 2);
    if (t.monomial == Partition({2})) CHECK(t.coefficient == -alpha / 2);
  }
}

TEST_CASE("Y modes on the vacuum") {
  auto arena = arena_q(12);
  const Q alpha(1, 2);
  auto y0 = apply_Y_mode(alpha, 0, sector_vacuum<Q>(0), arena);
  CHECK(y0.entries() == sector_vacuum<Q>(1).entries());
  auto y1 = apply_Y_mode(alpha, 1, sector_vacuum<Q>(0), arena);
  CHECK(y1.size() == 1);
  CHECK(y1.coefficient(SectorKey{1, Partition({1})}) == alpha);
  CHECK(apply_Y_mode(alpha, -1, sector_vacuum<Q>(0), arena).empty());
  CHECK_THROWS_AS(apply_Y_mode(Q(1, 3), 0, sector_vacuum<Q>(0), arena), std::invalid_argument);
}

TEST_CASE("vacuum norms follow the binomial closed form") {
  CHECK(vacuum_mode_norm_sq(Q(1, 2), 0) == 1);
  CHECK(vacuum_mode_norm_sq(Q(1, 2), 1) == Q(1, 4));
  CHECK(vacuum_mode_norm_sq(Q(1, 2), 2) == Q(5, 32));
  auto arena = arena_q(20);
  ChargedField<Q> field(Q(1, 2), arena);
  auto table = vacuum_mode_norm_table(Q(1, 2), 20);
  for (int n = 0; n <= 20; ++n) {
    auto v = field.apply(n, sector_vacuum<Q>(0));
    CHECK(norm_sq(v) == vacuum_mode_norm_sq(Q(1, 2), n));
    CHECK(table[static_cast<size_t>(n)] == vacuum_mode_norm_sq(Q(1, 2), n));
  }
  // other charges, including |alpha| > 1
  for (Q a : {Q(1), Q(3, 2), Q(-1, 2)}) {
    ChargedField<Q> f(a, arena_q(10));
    for (int n = 0; n <= 10; ++n) CHECK(norm_sq(f.apply(n, sector_vacuum<Q>(0))) == vacuum_mode_norm_sq(a, n));
  }
}

TEST_CASE("decay exponent of the vacuum norms") {
  const double alpha = 0.5;
  const double expected = alpha * alpha - 1.0;  // 2d - 1
  for (int n = 64; n <= 512; n *= 2) {
    double ratio = vacuum_mode_norm_sq(alpha, 2 * n) / vacuum_mode_norm_sq(alpha, n);
    CHECK(std::abs(std::log2(ratio) - expected) < 0.05);
  }
}

TEST_CASE("recursive oracle anchors") {
  RecursiveModeOracle<Q> oracle(Q(1, 2));
  CHECK(oracle.element(Partition{}, 0, Partition{}) == 1);
  CHECK(oracle.element(Partition({1}), 1, Partition{}) == Q(1, 2));
  auto arena = arena_q(8);
  auto r = apply_Y_mode_recursive(Q(1, 2), 0, sector_vacuum<Q>(0), arena);
  CHECK(r.entries() == sector_vacuum<Q>(1).entries());
}

TEST_CASE("expansion and recursion agree") {
  auto arena = arena_q(6);
  for (Q alpha : {Q(1, 2), Q(-1), Q(3, 2)}) {
    ChargedField<Q> field(alpha, arena);
    for (int j : {0, 1}) {
      for (const auto& p : enumerate_basis_upto(6)) {
        SectorState<Q> v(SectorKey{j, p}, 1);
        for (int delta = -6; delta <= 6; ++delta) {
          auto a = field.apply(delta, v);
          auto b = apply_Y_mode_recursive(alpha, delta, v, arena);
          CHECK(a.entries() == b.entries());
        }
      }
    }
  }
}

TEST_CASE("current covariance [J_m, Y(delta)] = alpha Y(delta - m)") {
  const Q alpha(1, 2);
  auto arena = arena_q(14);
  ChargedField<Q> field(alpha, arena);
  for (int j : {-1, 0, 1})
    for (const auto& p : enumerate_basis_upto(4))
      for (int delta = -3; delta <= 3; ++delta)
        for (int m = -4; m <= 4; ++m) {
          SectorState<Q> v(SectorKey{j, p}, 1);
          auto lhs = apply_J(m, field.apply(delta, v), arena) - field.apply(delta, apply_J(m, v, arena));
          auto rhs = field.apply(delta - m, v) * alpha;
          REQUIRE_FALSE(lhs.overflow());
          CHECK((lhs - rhs).empty());
        }
}

TEST_CASE("primary covariance [L_m, Y_s] = ((d-1)m - s) Y_{m+s}") {
  for (Q alpha : {Q(1, 2), Q(1)}) {
    auto arena = arena_q(12);
    ChargedField<Q> field(alpha, arena);
    const Q d = field.weight();
    for (int j : {-1, 0, 2})
      for (const auto& p : enumerate_basis_upto(4))
        for (int delta = -2; delta <= 3; ++delta)
          for (int m = -3; m <= 3; ++m) {
            SectorState<Q> v(SectorKey{j, p}, 1);
            const Q s = field.mode_index(delta, j);
            auto lhs = apply_L(m, field.apply(delta, v), arena) - field.apply(delta, apply_L(m, v, arena));
            auto rhs = field.apply(delta - m, v) * Q((d - 1) * m - s);
            REQUIRE_FALSE(lhs.overflow());
            CHECK((lhs - rhs).empty());
          }
  }
}

TEST_CASE("adjoint relation Y_alpha(delta)^* = Y_{-alpha}(-delta)") {
  auto arena = arena_q(8);
  const Q alpha(1, 2);
  ChargedField<Q> plus(alpha, arena);
  ChargedField<Q> minus(-alpha, arena);
  for (const auto& p : enumerate_basis_upto(4))
    for (const auto& q : enumerate_basis_upto(6)) {
      const int delta = q.level() - p.level();
      SectorState<Q> v(SectorKey{0, p}, 1);
      SectorState<Q> w(SectorKey{1, q}, 1);
      CHECK(inner_product(plus.apply(delta, v), w) == inner_product(v, minus.apply(-delta, w)));
    }
}

TEST_CASE("truncated mode norms obey the energy bound") {
  SECTION("single matrix element at L = 0") {
    auto est = truncated_mode_norm<Q>(Q(1, 2), 0, arena_q(0));
    CHECK(est.value == Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("alpha = 1/2 and alpha = 1 at L = 8 against a dense SVD") {
    for (Q alpha : {Q(1, 2), Q(1)}) {
      auto arena = arena_q(8);
      ChargedField<Q> field(alpha, arena);
      for (int delta : {-3, 0, 3}) {
        auto est = truncated_mode_norm<Q>(alpha, delta, arena);
        auto m = mode_block_matrix(field, delta, 8);
        Eigen::MatrixXd e(m.size(), m[0].size());
        for (size_t r = 0; r < m.size(); ++r)
          for (size_t c = 0; c < m[0].size(); ++c) e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
        CHECK(est.value == Catch::Approx(svd.singularValues()(0)).epsilon(1e-8));
        CHECK(est.value <= 1.0 + 1e-9);
      }
    }
  }
  SECTION("empty block") {
    auto est = truncated_mode_norm<Q>(Q(1, 2), 9, arena_q(8));
    CHECK(est.value == 0.0);
    CHECK(est.source_dim == 0);
  }
}

TEST_CASE("mode block CSV export") {
  auto arena = arena_q(2);
  ChargedField<Q> field(Q(1, 2), arena);
  std::stringstream ss;
  write_mode_block_csv(ss, field, 1, 2);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "source_level,source_partition,target_partition,re,im");
  std::string first;
  std::getline(ss, first);
  CHECK(first == "0,[],[1],1/2,0/1");
}

TEST_CASE("norm profiles reproduce ||Y(delta) J_{-p} Omega||^2") {
  for (const Q& alpha : {Q(1, 2), Q(-3, 2)}) {
    ChargedField<Q> field(alpha, arena_q(14));
    const auto vac = vacuum_mode_norm_table(alpha, 20);
    for (const auto& p : enumerate_basis_upto(4)) {
      const auto prof = mode_norm_profile(alpha, p);
      CHECK(prof == mode_norm_profile(Q(-alpha), p));
      for (int delta = -5; delta <= 8; ++delta) {
        if (p.level() + delta > 14) continue;
        INFO(p.to_string() << " delta " << delta);
        CHECK(mode_norm_from_profile(prof, delta, vac) == norm_sq(field.on_basis(delta, p)));
      }
    }
  }
}
