#include <catch_amalgamated.hpp>

#include <cmath>

#include "u1fock/diagnostics.hpp"
#include "u1fock/twodim.hpp"

using namespace u1fock;

TEST_CASE("slope of a synthetic power law") {
  std::vector<std::pair<double, double>> s;
  for (int n = 1; n <= 200; ++n) s.emplace_back(n, std::pow(n, -1.5));
  CHECK(loglog_slope(s, 10, 100) == Catch::Approx(-1.5).margin(1e-12));
  std::vector<std::pair<double, double>> c;
  for (int n = 1; n <= 50; ++n) c.emplace_back(n, 3.0);
  CHECK(loglog_slope(c) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("slope of the vacuum band norms at d = 1/8") {
  auto bands = vacuum_band_norms(0.5, 0, 200);
  std::vector<std::pair<double, double>> s;
  for (size_t n = 1; n < bands.size(); ++n) s.emplace_back(static_cast<double>(n), bands[n]);
  CHECK(std::abs(loglog_slope(s, 20, 200) + 1.5) < 0.05);
}

TEST_CASE("slope needs three positive points") {
  std::vector<std::pair<double, double>> s{{1, 1.0}, {2, 0.5}};
  CHECK_THROWS_AS(loglog_slope(s), std::invalid_argument);
  s.emplace_back(3, 0.0);
  CHECK_THROWS_AS(loglog_slope(s), std::domain_error);
}

TEST_CASE("integral tail bound") {
  std::vector<double> bands(100, 0.0);
  bands.back() = 1e-6;
  auto b = tail_budget(bands, -1.5);
  CHECK_FALSE(b.infinite);
  CHECK(b.value == Catch::Approx(2e-4));
  CHECK(tail_budget(bands, -1.5, kBudgetSafety).value == Catch::Approx(4e-4));
  CHECK(tail_budget(bands, -1.0).infinite);
  CHECK(tail_budget({}, -1.5).value == 0.0);
  CHECK_FALSE(tail_budget({}, -1.5).infinite);
}

TEST_CASE("tail bound decreases in N and dominates the true tail") {
  const double slope = -1.5;
  double prev = INFINITY;
  for (int N = 10; N <= 400; N += 10) {
    std::vector<double> terms;
    for (int n = 1; n <= N; ++n) terms.push_back(std::pow(n, slope));
    auto b = tail_budget(terms, slope);
    CHECK(b.value < prev);
    prev = b.value;
    double tail = 0;
    for (int n = N + 1; n <= 2000000; ++n) tail += std::pow(n, slope);
    tail += 2.0 * std::pow(2000000.0, -0.5);  // remainder beyond the loop
    CHECK(tail <= b.value);
  }
}

TEST_CASE("quadratic fit recovers coefficients exactly") {
  std::array<mpq_class, 3> x{mpq_class(0), mpq_class(1, 2), mpq_class(1)};
  auto f = [](const mpq_class& t) { return mpq_class(mpq_class(3, 7) - 2 * t + mpq_class(5, 3) * t * t); };
  std::array<mpq_class, 3> y{f(x[0]), f(x[1]), f(x[2])};
  auto c = quadratic_fit(x, y);
  CHECK(c[0] == mpq_class(3, 7));
  CHECK(c[1] == -2);
  CHECK(c[2] == mpq_class(5, 3));
  CHECK_THROWS(quadratic_fit(std::array<mpq_class, 3>{0, 0, 1}, y));
}
