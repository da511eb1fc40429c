#include <catch_amalgamated.hpp>

#include "u1fock/harness.hpp"

using namespace u1fock;

namespace {

using Q = mpq_class;

Arena<Q> arena_q(int cutoff) { return {Truncation{cutoff, {-4, 4}}, Q(1, 2), 0.0}; }

const SuiteResult& suite(const AlgebraReport& r, const std::string& name) {
  for (const auto& s : r.suites)
    if (s.name == name) return s;
  throw std::out_of_range(name);
}

}  // namespace

TEST_CASE("all suites pass at L = 8") {
  auto rep = verify_algebra(arena_q(8));
  for (const auto& s : rep.suites) {
    INFO(s.to_json().dump());
    CHECK(s.ok());
    CHECK(s.checked > 0);
  }
  CHECK(rep.ok());
  CHECK(rep.to_json()["pass"] == true);
  CHECK_FALSE(rep.to_json().contains("first_failure"));
}

TEST_CASE("interior budget per mode pair") {
  // at L = 2 the pair (-1, -1) has levels <= 0 only: one vector per sector
  std::vector<std::string> w;
  AlgebraOptions<Q> o;
  o.current_range = 1;
  auto s = check_current_relations(arena_q(2), o, w);
  // cells: 9 mode pairs; vectors per sector at budgets 0,1,2: 4,2,1 partitions up to the level
  // budgets: (-1,-1)->2, (-1,0),(0,-1),(-1,1),(1,-1)->1, rest 0
  const long per_sector = 1 * 1 + 4 * 2 + 4 * 4;
  CHECK(s.checked == 5 * per_sector);
  CHECK(s.ok());
  CHECK(w.empty());
}

TEST_CASE("a wrong Sugawara prefactor is pinpointed") {
  AlgebraOptions<Q> o;
  o.sugawara_prefactor = Q(1, 3);
  auto rep = verify_algebra(arena_q(6), o);
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(suite(rep, "virasoro_relations").ok());
  CHECK(suite(rep, "current_relations").ok());
  CHECK(suite(rep, "oracle_equivalence").ok());
  const auto* f = rep.first_failure();
  REQUIRE(f != nullptr);
  auto j = rep.to_json();
  CHECK(j["first_failure"]["suite"] == "virasoro_relations");
  CHECK(j["first_failure"]["basis"].get<std::string>().rfind("j=", 0) == 0);
  // the first failing cell in sweep order
  CHECK(f->m == -4);
}

TEST_CASE("L = 0 passes with vacuous interior warnings") {
  auto rep = verify_algebra(arena_q(0));
  CHECK(rep.ok());
  REQUIRE_FALSE(rep.warnings.empty());
  for (const auto& w : rep.warnings) CHECK(w.rfind("vacuous interior", 0) == 0);
}

TEST_CASE("sectors outside the window are skipped") {
  Arena<Q> narrow{Truncation{4, {0, 0}}, Q(1, 2), 0.0};
  std::vector<std::string> w;
  AlgebraOptions<Q> o;
  auto s = check_primary_covariance(narrow, o, w);
  CHECK(s.checked == 0);
  REQUIRE(w.size() == 1);
  CHECK(w[0] == "vacuous interior: primary_covariance checked no basis vector");
}

TEST_CASE("float arithmetic with a tolerance") {
  Arena<FloatComplex> arena{Truncation{6, {-2, 2}}, 0.5, 1e-9};
  AlgebraOptions<FloatComplex> o;
  o.alpha = 0.5;
  auto rep = verify_algebra(arena, o);
  CHECK(rep.ok());
}

TEST_CASE("exact gaussian arithmetic") {
  Arena<GaussianRational> arena{Truncation{6, {-2, 2}}, Q(1, 2), 0.0};
  AlgebraOptions<GaussianRational> o;
  o.alpha = Q(-1, 2);
  CHECK(verify_algebra(arena, o).ok());
}
