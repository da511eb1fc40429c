#ifndef U1FOCK_DIAGNOSTICS_HPP
#define U1FOCK_DIAGNOSTICS_HPP

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace u1fock {

/// Least-squares slope of log(value) against log(n) over points with n in
/// [window_lo, window_hi].
inline double loglog_slope(const std::vector<std::pair<double, double>>& series, double window_lo, double window_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& [n, value] : series) {
    if (n < window_lo || n > window_hi) continue;
    if (!(n > 0) || !(value > 0)) throw std::domain_error("loglog_slope: nonpositive point in window");
    const double x = std::log(n);
    const double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 3) throw std::invalid_argument("loglog_slope: fewer than 3 points in window");
  const double denom = count * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("loglog_slope: degenerate window");
  return (count * sxy - sx * sy) / denom;
}

/// Whole series as a window.
inline double loglog_slope(const std::vector<std::pair<double, double>>& series) {
  return loglog_slope(series, 0.0, std::numeric_limits<double>::infinity());
}

struct TailBudget {
  double value = 0;
  bool infinite = false;
};

/// Integral-comparison bound on sum_{n > N} of a series decaying like n^slope,
/// given the terms n = 1..N. `safety` multiplies the bound.
inline TailBudget tail_budget(const std::vector<double>& band_norms, double fitted_slope, double safety = 1.0) {
  if (band_norms.empty()) return {};
  if (!(fitted_slope < -1.0)) return {std::numeric_limits<double>::infinity(), true};
  const double n = static_cast<double>(band_norms.size());
  return {safety * band_norms.back() * n / (-1.0 - fitted_slope), false};
}

/// Safety factor applied wherever a budget decides a verdict.
inline constexpr double kBudgetSafety = 2.0;

/// r(x) = c0 + c1 x + c2 x^2 through three points with distinct abscissae.
template <class X, class T>
std::array<T, 3> quadratic_fit(const std::array<X, 3>& x, const std::array<T, 3>& y) {
  std::array<T, 3> c{T(0), T(0), T(0)};
  for (int i = 0; i < 3; ++i) {
    const X& a = x[static_cast<size_t>((i + 1) % 3)];
    const X& b = x[static_cast<size_t>((i + 2) % 3)];
    const X& xi = x[static_cast<size_t>(i)];
    const X denom = (xi - a) * (xi - b);
    if (denom == X(0)) throw std::invalid_argument("quadratic_fit: repeated abscissa");
    // (t - a)(t - b) / denom = (t^2 - (a + b) t + ab) / denom
    const T w = y[static_cast<size_t>(i)] * T(X(1) / denom);
    c[0] += w * T(X(a * b));
    c[1] -= w * T(X(a + b));
    c[2] += w;
  }
  return c;
}

}  // namespace u1fock

#endif  // U1FOCK_DIAGNOSTICS_HPP
