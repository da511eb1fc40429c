#ifndef U1FOCK_VERTEX_HPP
#define U1FOCK_VERTEX_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "u1fock/heisenberg.hpp"

namespace u1fock {

// The charged field Y_alpha(z) = c_alpha E^-(alpha,z) E^+(alpha,z) z^{alpha J_0}.
//
// Modes are keyed by the integer level shift `delta` rather than the real
// index s; on a sector of charge beta they are related by
// s = -alpha*beta - d - delta with d = alpha^2/2. The z^{alpha J_0} factor
// only enters through this relation.

enum class ESign { plus, minus };

template <class R>
struct ETerm {
  Partition monomial;
  R coefficient;
};

/// Level-k coefficients of E^{sign}(alpha, z) as polynomials in the current
/// modes: E^- contributes alpha^len/z_lambda J_{-lambda} at z^{k},
/// E^+ contributes (-alpha)^len/z_lambda J_{lambda} at z^{-k}.
template <class R>
std::vector<ETerm<R>> expand_E_level(ESign sign, const R& alpha, int level) {
  std::vector<ETerm<R>> out;
  const R a = sign == ESign::minus ? alpha : R(-alpha);
  for (auto& p : partitions_of(level)) {
    R c = real_pow(a, static_cast<unsigned>(p.length())) / real_from_rational<R>(mpq_class(z_lambda(p)));
    out.push_back({std::move(p), std::move(c)});
  }
  return out;
}

template <class R>
using ETable = std::vector<std::vector<ETerm<R>>>;

template <class R>
ETable<R> expand_E(ESign sign, const R& alpha, int cutoff) {
  ETable<R> table;
  for (int k = 0; k <= cutoff; ++k) table.push_back(expand_E_level(sign, alpha, k));
  return table;
}

namespace detail {

template <class R>
int charge_steps(const R& alpha, const R& alpha0) {
  if constexpr (std::is_same_v<R, double>) {
    if (alpha0 == 0.0) throw std::invalid_argument("alpha0 must be nonzero");
    const double q = alpha / alpha0;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9) throw std::invalid_argument("alpha is not an integer multiple of alpha0");
    return static_cast<int>(r);
  } else {
    if (sgn(alpha0) == 0) throw std::invalid_argument("alpha0 must be nonzero");
    mpq_class q = alpha / alpha0;
    if (q.get_den() != 1) throw std::invalid_argument("alpha is not an integer multiple of alpha0");
    return static_cast<int>(q.get_num().get_si());
  }
}

}  // namespace detail

/// Y_alpha as a family of graded maps H_beta -> H_{beta+alpha}. Images of
/// basis monomials are memoized; the object is safe to share across threads.
template <class S>
class ChargedField {
 public:
  using R = Real<S>;

  ChargedField(R alpha, const Arena<S>& arena)
      : alpha_(std::move(alpha)), arena_(arena), steps_(detail::charge_steps(alpha_, arena.alpha0)) {}

  const R& alpha() const { return alpha_; }
  R weight() const { return alpha_ * alpha_ / R(2); }
  int charge_steps() const { return steps_; }
  const Arena<S>& arena() const { return arena_; }

  /// Real mode index s of the level-shift-`delta` mode on sector j.
  R mode_index(int delta, int source_j) const {
    return -alpha_ * arena_.charge(source_j) - weight() - R(delta);
  }

  /// Y(delta) J_{-p} Omega with no cutoff, sector bookkeeping excluded.
  const ChiralVector<S>& on_basis(int delta, const Partition& p) const {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(delta, p);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    return cache_.emplace(key, compute(delta, p)).first->second;
  }

  /// Level-`delta` component of Y_alpha v, truncated; also shifts sectors.
  SectorState<S> apply(int delta, const SectorState<S>& v) const {
    SectorState<S> out;
    out.flag_overflow(v.overflow());
    for (const auto& [key, c] : v.entries()) {
      const int target_level = key.p.level() + delta;
      if (target_level < 0) continue;
      const int tj = key.j + steps_;
      if (target_level > arena_.cutoff() || !arena_.trunc.window.contains(tj)) {
        out.flag_overflow();
        continue;
      }
      for (const auto& [q, k] : on_basis(delta, key.p).entries()) out.add(SectorKey{tj, q}, c * k);
    }
    return out;
  }

 private:
  const std::vector<ETerm<R>>& e_level(ESign sign, int level) const {
    auto& table = sign == ESign::minus ? e_minus_ : e_plus_;
    while (static_cast<int>(table.size()) <= level)
      table.push_back(expand_E_level(sign, alpha_, static_cast<int>(table.size())));
    return table[static_cast<size_t>(level)];
  }

  // E^-(a) E^+(b) with a - b = delta. E^+ monomials J_mu act on J_{-p} Omega
  // only for mu inside p, with coefficient prod_i m_i(p)!/(m_i(p)-m_i(mu))! i^{m_i(mu)};
  // combined with 1/z_mu this leaves (-alpha)^len(mu) prod_i C(m_i(p), m_i(mu)).
  ChiralVector<S> compute(int delta, const Partition& p) const {
    ChiralVector<S> out;
    if (p.level() + delta < 0) return out;
    const R neg_alpha = -alpha_;
    for_each_submultiset(p, [&](const Partition& mu, const mpz_class& binom) {
      const int a = mu.level() + delta;
      if (a < 0) return;
      const Partition rest = partition_difference(p, mu);
      const R plus_coeff = real_pow(neg_alpha, static_cast<unsigned>(mu.length())) *
                           real_from_rational<R>(mpq_class(binom));
      for (const auto& term : e_level(ESign::minus, a)) {
        out.add(rest.merged(term.monomial), ScalarTraits<S>::from_real(plus_coeff * term.coefficient));
      }
    });
    return out;
  }

  R alpha_;
  Arena<S> arena_;
  int steps_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, Partition>, ChiralVector<S>> cache_;
  mutable ETable<R> e_minus_;
  mutable ETable<R> e_plus_;
};

/// One mode of Y_alpha applied to a charged state.
template <class S>
SectorState<S> apply_Y_mode(const Real<S>& alpha, int delta, const SectorState<S>& v, const Arena<S>& arena) {
  return ChargedField<S>(alpha, arena).apply(delta, v);
}

/// Matrix elements <J_{-bra} Omega_{beta+alpha}, Y(delta) J_{-ket} Omega_beta>
/// obtained only from [J_m, Y(delta)] = alpha Y(delta - m), the current
/// relations and the anchor <Omega', Y(0) Omega> = 1. Independent of the
/// exponential expansion.
template <class S>
class RecursiveModeOracle {
 public:
  using R = Real<S>;

  explicit RecursiveModeOracle(R alpha) : alpha_(std::move(alpha)) {}

  R element(const Partition& bra, int delta, const Partition& ket) {
    if (bra.level() != ket.level() + delta) return R(0);
    auto key = std::make_tuple(bra, delta, ket);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    R value(0);
    if (!bra.empty()) {
      const int top = bra.parts()[0];
      const Partition rest = bra.without_part(top);
      // <J_{-rest}, J_top Y J_{-ket}> = alpha <.., Y(delta-top) ..> + <.., Y J_top J_{-ket}>
      value = alpha_ * element(rest, delta - top, ket);
      const int mult = ket.multiplicity(top);
      if (mult > 0) value += R(static_cast<long>(top) * mult) * element(rest, delta, ket.without_part(top));
    } else if (!ket.empty()) {
      const int top = ket.parts()[0];
      value = -alpha_ * element(bra, delta + top, ket.without_part(top));
    } else {
      value = delta == 0 ? R(1) : R(0);
    }
    memo_.emplace(std::move(key), value);
    return value;
  }

 private:
  R alpha_;
  std::map<std::tuple<Partition, int, Partition>, R> memo_;
};

/// Same mode as apply_Y_mode, computed through RecursiveModeOracle.
template <class S>
SectorState<S> apply_Y_mode_recursive(const Real<S>& alpha, int delta, const SectorState<S>& v,
                                      const Arena<S>& arena) {
  const int steps = detail::charge_steps(alpha, arena.alpha0);
  RecursiveModeOracle<S> oracle(alpha);
  SectorState<S> out;
  out.flag_overflow(v.overflow());
  for (const auto& [key, c] : v.entries()) {
    const int target_level = key.p.level() + delta;
    if (target_level < 0) continue;
    const int tj = key.j + steps;
    if (target_level > arena.cutoff() || !arena.trunc.window.contains(tj)) {
      out.flag_overflow();
      continue;
    }
    for (const auto& bra : partitions_of(target_level)) {
      Real<S> m = oracle.element(bra, delta, key.p);
      if (m == Real<S>(0)) continue;
      m /= gram_real<S>(bra);
      out.add(SectorKey{tj, bra}, c * ScalarTraits<S>::from_real(m));
    }
  }
  return out;
}

/// ||Y(n) Omega||^2 = prod_{k<n} (2d + k) / n!, the binomial C(2d+n-1, n).
template <class R>
R vacuum_mode_norm_sq(const R& alpha, int n) {
  if (n < 0) throw std::invalid_argument("vacuum_mode_norm_sq: n must be nonnegative");
  const R two_d = alpha * alpha;
  R out(1);
  for (int k = 0; k < n; ++k) {
    out *= two_d + R(k);
    out /= R(k + 1);
  }
  return out;
}

/// All values vacuum_mode_norm_sq(alpha, n) for n = 0..n_max.
template <class R>
std::vector<R> vacuum_mode_norm_table(const R& alpha, int n_max) {
  std::vector<R> out;
  const R two_d = alpha * alpha;
  R cur(1);
  out.push_back(cur);
  for (int k = 0; k < n_max; ++k) {
    cur *= two_d + R(k);
    cur /= R(k + 1);
    out.push_back(cur);
  }
  return out;
}

namespace detail {

// <J_{-A} Y(d+sa) Omega, J_{-B} Y(d+sb) Omega> as a combination of
// ||Y(d+k) Omega||^2, accumulated into out[k]. Peels A from the back.
template <class R>
void profile_pairing(const R& alpha, std::vector<int>& A, int sa, std::vector<int>& B, int sb, const R& c,
                     std::map<int, R>& out) {
  if (A.empty()) {
    int sum_b = 0;
    for (int b : B) sum_b += b;
    if (sa - sum_b != sb) return;
    R f = c;
    for (size_t i = 0; i < B.size(); ++i) f *= alpha;
    out[sb] += f;
    return;
  }
  const int k = A.back();
  A.pop_back();
  // every copy of k in B contracts the same way
  const auto copies = std::count(B.begin(), B.end(), k);
  if (copies > 0) {
    auto at = std::find(B.begin(), B.end(), k);
    const auto pos = at - B.begin();
    B.erase(at);
    profile_pairing(alpha, A, sa, B, sb, R(c * R(k) * R(static_cast<int>(copies))), out);
    B.insert(B.begin() + pos, k);
  }
  profile_pairing(alpha, A, sa, B, sb - k, R(c * alpha), out);
  A.push_back(k);
}

}  // namespace detail

/// ||Y(delta) J_{-p} Omega||^2 = sum_k c_k ||Y(delta + k) Omega||^2 for every
/// delta and every sector. Returns the map k -> c_k.
template <class R>
std::map<int, R> mode_norm_profile(const R& alpha, const Partition& p) {
  const std::vector<int> parts(p.parts().begin(), p.parts().end());
  const size_t r = parts.size();
  std::map<int, R> out;
  // Y(delta) J_{-p} = sum_S (-alpha)^{|S|} J_{-(p minus S)} Y(delta + |S|)
  auto split = [&](unsigned mask, std::vector<int>& rest, int& shift, R& coeff) {
    rest.clear();
    shift = 0;
    coeff = R(1);
    for (size_t i = 0; i < r; ++i) {
      if (mask & (1u << i)) {
        shift += parts[i];
        coeff *= R(-alpha);
      } else {
        rest.push_back(parts[i]);
      }
    }
  };
  std::vector<int> A, B;
  int sa = 0, sb = 0;
  R ca, cb;
  for (unsigned s = 0; s < (1u << r); ++s) {
    for (unsigned t = 0; t < (1u << r); ++t) {
      split(s, A, sa, ca);
      split(t, B, sb, cb);
      detail::profile_pairing(alpha, A, sa, B, sb, R(ca * cb), out);
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == R(0) ? out.erase(it) : std::next(it);
  return out;
}

/// Evaluates a profile at delta; `vacuum` must reach delta + max shift.
template <class R>
R mode_norm_from_profile(const std::map<int, R>& profile, int delta, const std::vector<R>& vacuum) {
  R acc(0);
  for (const auto& [k, c] : profile) {
    const int n = delta + k;
    if (n < 0) continue;
    if (static_cast<size_t>(n) >= vacuum.size()) throw std::out_of_range("mode_norm_from_profile: table too short");
    acc += c * vacuum[static_cast<size_t>(n)];
  }
  return acc;
}

struct ModeNormEstimate {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  int source_dim = 0;
  int target_dim = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Dense orthonormal-basis block of Y(delta) restricted to levels <= cutoff,
/// row = target, column = source. The block is sector-independent.
template <class S>
std::vector<std::vector<double>> mode_block_matrix(const ChargedField<S>& field, int delta, int cutoff,
                                                   std::vector<Partition>* sources = nullptr,
                                                   std::vector<Partition>* targets = nullptr) {
  std::vector<Partition> src;
  std::vector<Partition> tgt;
  for (int l = std::max(0, -delta); l <= cutoff && l + delta <= cutoff; ++l) {
    auto s = partitions_of(l);
    auto t = partitions_of(l + delta);
    src.insert(src.end(), s.begin(), s.end());
    tgt.insert(tgt.end(), t.begin(), t.end());
  }
  std::map<Partition, size_t> row_of;
  for (size_t i = 0; i < tgt.size(); ++i) row_of[tgt[i]] = i;
  std::vector<std::vector<double>> m(tgt.size(), std::vector<double>(src.size(), 0.0));
  for (size_t c = 0; c < src.size(); ++c) {
    const double src_norm = std::sqrt(mpq_class(z_lambda(src[c])).get_d());
    for (const auto& [q, k] : field.on_basis(delta, src[c]).entries()) {
      const double tgt_norm = std::sqrt(mpq_class(z_lambda(q)).get_d());
      m[row_of.at(q)][c] = ScalarTraits<S>::re_double(k) * tgt_norm / src_norm;
    }
  }
  if (sources) *sources = std::move(src);
  if (targets) *targets = std::move(tgt);
  return m;
}

/// Largest singular value of the truncated Y(delta) block by power iteration
/// on M^T M. Throws ConvergenceError when the eigen-residual stalls.
template <class S>
ModeNormEstimate truncated_mode_norm(const Real<S>& alpha, int delta, const Arena<S>& arena,
                                     int max_iterations = 200000, double rel_residual = 1e-11) {
  ChargedField<S> field(alpha, arena);
  auto m = mode_block_matrix(field, delta, arena.cutoff());
  ModeNormEstimate est;
  est.target_dim = static_cast<int>(m.size());
  est.source_dim = m.empty() ? 0 : static_cast<int>(m[0].size());
  if (est.source_dim == 0 || est.target_dim == 0) return est;
  const size_t n = static_cast<size_t>(est.source_dim);
  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = 1.0 + 1.0 / static_cast<double>(i + 2);
  auto normalize = [](std::vector<double>& x) {
    double s = 0;
    for (double e : x) s += e * e;
    s = std::sqrt(s);
    if (s > 0)
      for (double& e : x) e /= s;
    return s;
  };
  normalize(v);
  std::vector<double> mv(m.size());
  std::vector<double> w(n);
  double residual = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    for (size_t r = 0; r < m.size(); ++r) {
      double acc = 0;
      for (size_t c = 0; c < n; ++c) acc += m[r][c] * v[c];
      mv[r] = acc;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (size_t r = 0; r < m.size(); ++r)
      for (size_t c = 0; c < n; ++c) w[c] += m[r][c] * mv[r];
    double rho = 0;
    for (size_t c = 0; c < n; ++c) rho += v[c] * w[c];
    double res = 0;
    for (size_t c = 0; c < n; ++c) res += (w[c] - rho * v[c]) * (w[c] - rho * v[c]);
    residual = std::sqrt(res);
    est.iterations = it;
    est.value = std::sqrt(std::max(rho, 0.0));
    est.residual = residual;
    if (rho <= 0.0 || residual <= rel_residual * rho) {
      if (rho <= 0.0) {
        // v is in the kernel; M is zero unless the start vector was unlucky.
        double total = 0;
        for (const auto& row : m)
          for (double e : row) total += e * e;
        if (total > 0) throw ConvergenceError("power iteration collapsed onto the kernel", residual);
      }
      return est;
    }
    v = w;
    normalize(v);
  }
  throw ConvergenceError("power iteration did not converge, residual " + std::to_string(residual), residual);
}

/// CSV export of one mode block: source_level, source_partition,
/// target_partition, re, im. Partitions are written space-separated in
/// brackets, e.g. "[2 1]".
template <class S>
void write_mode_block_csv(std::ostream& os, const ChargedField<S>& field, int delta, int cutoff) {
  auto fmt = [](const Partition& p) {
    std::string s = "[";
    for (int i = 0; i < p.length(); ++i) {
      if (i) s += " ";
      s += std::to_string(p.parts()[static_cast<size_t>(i)]);
    }
    return s + "]";
  };
  os << "source_level,source_partition,target_partition,re,im\n";
  for (int l = std::max(0, -delta); l <= cutoff && l + delta <= cutoff; ++l) {
    for (const auto& src : partitions_of(l)) {
      for (const auto& [q, k] : field.on_basis(delta, src).entries()) {
        os << l << "," << fmt(src) << "," << fmt(q) << "," << ScalarTraits<S>::re_string(k) << ","
           << ScalarTraits<S>::im_string(k) << "\n";
      }
    }
  }
}

}  // namespace u1fock

#endif  // U1FOCK_VERTEX_HPP
