#ifndef U1FOCK_TWODIM_HPP
#define U1FOCK_TWODIM_HPP

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "u1fock/diagnostics.hpp"
#include "u1fock/vertex.hpp"

namespace u1fock {

/// Fourier mode m of Y_alpha(w) (x) Y_alpha(w^{-1}) on the diagonal-charge
/// space: sum over bands delta_L of Y(delta_L) (x) Y(delta_L + m). The
/// symmetrized mode adds the same sum for -alpha.
template <class R>
struct TimeZeroMode {
  R alpha;
  int m = 0;
  bool symmetrized = true;
};

template <class R>
struct BandRecord {
  int band = 0;  // left level shift delta_L
  R norm_sq;
};

template <class S>
struct TimeZeroResult {
  TensorState<S> state;
  std::vector<BandRecord<Real<S>>> bands;  // ascending band index

  /// Norm^2 of the last included band; the proxy for the dropped tail.
  Real<S> tail_proxy() const { return bands.empty() ? Real<S>(0) : bands.back().norm_sq; }
  int last_band() const { return bands.empty() ? 0 : bands.back().band; }
};

/// Optional per-term weight f(k, epsilon) where k is the real mode index of
/// the left factor and epsilon = +1/-1 selects Y_{+alpha}/Y_{-alpha}.
template <class S>
using BandWeight = std::function<S(const Real<S>& k, int epsilon)>;

/// Time-zero field modes for one alpha, with both charge signs prepared.
/// Banded summation is cut by the arena's level cutoff on each factor.
template <class S>
class TimeZeroField {
 public:
  using R = Real<S>;

  TimeZeroField(const R& alpha, const Arena<S>& arena) : arena_(arena), plus_(alpha, arena), minus_(-alpha, arena) {}

  const ChargedField<S>& field(int epsilon) const { return epsilon > 0 ? plus_ : minus_; }
  const Arena<S>& arena() const { return arena_; }
  R alpha() const { return plus_.alpha(); }
  R weight() const { return plus_.weight(); }

  /// Psi_{epsilon alpha, m} (epsilon = +1 or -1) or the symmetrized sum
  /// (epsilon = 0), optionally weighted term by term.
  TimeZeroResult<S> apply(int m, int epsilon, const TensorState<S>& v, const BandWeight<S>& weight = {}) const {
    std::map<int, TensorState<S>> bands;
    bool overflow = v.overflow();
    const int cutoff = arena_.cutoff();
    for (int eps : {1, -1}) {
      if (epsilon != 0 && eps != epsilon) continue;
      const ChargedField<S>& f = field(eps);
      for (const auto& [key, c] : v.entries()) {
        const int tj = key.j + f.charge_steps();
        if (!arena_.trunc.window.contains(tj)) {
          overflow = true;
          continue;
        }
        const int ll = key.left.level();
        const int lr = key.right.level();
        const int b_lo = std::max(-ll, -lr - m);
        const int b_hi = std::min(cutoff - ll, cutoff - lr - m);
        for (int b = b_lo; b <= b_hi; ++b) {
          S coeff = c;
          if (weight) coeff *= weight(f.mode_index(b, key.j), eps);
          if (ScalarTraits<S>::is_structural_zero(coeff)) continue;
          const auto& left = f.on_basis(b, key.left);
          const auto& right = f.on_basis(b + m, key.right);
          auto& band = bands[b];
          for (const auto& [pl, cl] : left.entries()) {
            const S lc = coeff * cl;
            for (const auto& [pr, cr] : right.entries()) band.add(TensorKey{tj, pl, pr}, lc * cr);
          }
        }
      }
    }
    TimeZeroResult<S> out;
    for (auto& [b, st] : bands) {
      out.bands.push_back({b, norm_sq(st)});
      out.state += st;
    }
    out.state.flag_overflow(overflow);
    return out;
  }

  /// <bra, Psi_m ket> term by term, without forming the image. Agrees with
  /// inner_product(bra, apply(m, epsilon, ket, weight).state).
  S matrix_element(const TensorState<S>& bra, int m, int epsilon, const TensorState<S>& ket,
                   const BandWeight<S>& weight = {}) const {
    S acc(0);
    const int cutoff = arena_.cutoff();
    for (int eps : {1, -1}) {
      if (epsilon != 0 && eps != epsilon) continue;
      const ChargedField<S>& f = field(eps);
      for (const auto& [k2, c2] : ket.entries()) {
        const int tj = k2.j + f.charge_steps();
        if (!arena_.trunc.window.contains(tj)) continue;
        for (const auto& [k1, c1] : bra.entries()) {
          if (k1.j != tj || k1.left.level() > cutoff || k1.right.level() > cutoff) continue;
          const int b = k1.left.level() - k2.left.level();
          if (b + m != k1.right.level() - k2.right.level()) continue;
          const S l = f.on_basis(b, k2.left).coefficient(k1.left);
          if (ScalarTraits<S>::is_structural_zero(l)) continue;
          const S r = f.on_basis(b + m, k2.right).coefficient(k1.right);
          if (ScalarTraits<S>::is_structural_zero(r)) continue;
          S term = ScalarTraits<S>::conj(c1) * c2 * l * r *
                   ScalarTraits<S>::from_real(R(gram_real<S>(k1.left) * gram_real<S>(k1.right)));
          if (weight) term *= weight(f.mode_index(b, k2.j), eps);
          acc += term;
        }
      }
    }
    return acc;
  }

  /// <Psi_a u, Psi_b v> inside the truncation, from chiral inner products of
  /// the band images; agrees with the inner product of the two full images.
  S cross_element(const TensorState<S>& u, int a, int eps_u, const TensorState<S>& v, int b, int eps_v) const {
    S acc(0);
    const int cutoff = arena_.cutoff();
    for (int e1 : {1, -1}) {
      if (eps_u != 0 && e1 != eps_u) continue;
      const ChargedField<S>& f1 = field(e1);
      for (int e2 : {1, -1}) {
        if (eps_v != 0 && e2 != eps_v) continue;
        const ChargedField<S>& f2 = field(e2);
        for (const auto& [k1, c1] : u.entries()) {
          const int tj = k1.j + f1.charge_steps();
          if (!arena_.trunc.window.contains(tj)) continue;
          for (const auto& [k2, c2] : v.entries()) {
            if (k2.j + f2.charge_steps() != tj) continue;
            const int l1 = k1.left.level(), r1 = k1.right.level();
            const int l2 = k2.left.level(), r2 = k2.right.level();
            // equal target levels fix b2 = b1 + l1 - l2 and need r1 + a - l1 == r2 + b - l2
            if (r1 + a - l1 != r2 + b - l2) continue;
            const int lo = std::max(-l1, -r1 - a);
            const int hi = std::min(cutoff - l1, cutoff - r1 - a);
            S pair_sum(0);
            for (int b1 = lo; b1 <= hi; ++b1) {
              const int b2 = b1 + l1 - l2;
              const S left = inner_product(f1.on_basis(b1, k1.left), f2.on_basis(b2, k2.left));
              if (ScalarTraits<S>::is_structural_zero(left)) continue;
              pair_sum += left * inner_product(f1.on_basis(b1 + a, k1.right), f2.on_basis(b2 + b, k2.right));
            }
            acc += ScalarTraits<S>::conj(c1) * c2 * pair_sum;
          }
        }
      }
    }
    return acc;
  }

 private:
  Arena<S> arena_;
  ChargedField<S> plus_;
  ChargedField<S> minus_;
};

/// Partial sum of the time-zero mode on v inside the truncation, with the
/// band norms as tail report.
template <class S>
TimeZeroResult<S> apply_time_zero(const TimeZeroMode<Real<S>>& mode, const TensorState<S>& v, const Arena<S>& arena) {
  TimeZeroField<S> field(mode.alpha, arena);
  return field.apply(mode.m, mode.symmetrized ? 0 : 1, v);
}

/// S_N = sum_{n=0}^{N} ||Y(n)Omega||^2 ||Y(n+m)Omega||^2 for N = 1..n_max,
/// the squared norm of the vacuum partial sums (bands are orthogonal).
template <class R>
std::vector<R> partial_sum_norm_series(const R& alpha, int m, int n_max) {
  const int top = n_max + std::max(m, 0);
  auto v = vacuum_mode_norm_table(alpha, top);
  auto norm = [&](int k) { return k < 0 ? R(0) : v[static_cast<size_t>(k)]; };
  std::vector<R> out;
  R acc = norm(0) * norm(m);
  for (int n = 1; n <= n_max; ++n) {
    acc += norm(n) * norm(n + m);
    out.push_back(acc);
  }
  return out;
}

/// Per-band vacuum norms ||Y(n)Omega||^2 ||Y(n+m)Omega||^2, n = 0..n_max.
template <class R>
std::vector<R> vacuum_band_norms(const R& alpha, int m, int n_max) {
  auto v = vacuum_mode_norm_table(alpha, n_max + std::max(m, 0));
  std::vector<R> out;
  for (int n = 0; n <= n_max; ++n) {
    const int k = n + m;
    out.push_back(k < 0 ? R(0) : v[static_cast<size_t>(n)] * v[static_cast<size_t>(k)]);
  }
  return out;
}

/// Bound on the squared norm of the bands b >= b_from of Psi_m applied to a
/// basis vector with chiral factors `left`, `right`: `exact_terms` bands are
/// summed from the exact norm profiles, the rest by the integral bound on a
/// power law fitted to the trailing half of them.
template <class R>
TailBudget band_tail(const R& alpha, int m, const Partition& left, const Partition& right, int b_from,
                     bool symmetrized, int exact_terms = 1024) {
  const double a = to_double(alpha);
  const auto pl = mode_norm_profile(a, left);
  const auto pr = mode_norm_profile(a, right);
  int reach = 0;
  for (const auto& [k, c] : pl) reach = std::max(reach, k);
  for (const auto& [k, c] : pr) reach = std::max(reach, k + m);
  const int top = std::max(0, b_from + exact_terms + reach + std::abs(m) + 1);
  const auto vac = vacuum_mode_norm_table(a, top);
  std::vector<double> terms;
  double acc = 0;
  for (int i = 0; i < exact_terms; ++i) {
    const int b = b_from + i;
    const double t = mode_norm_from_profile(pl, b, vac) * mode_norm_from_profile(pr, b + m, vac);
    terms.push_back(t);
    acc += t;
  }
  const double mult = symmetrized ? 2.0 : 1.0;
  std::vector<std::pair<double, double>> pts;
  for (int i = exact_terms / 2; i < exact_terms; ++i) {
    const double n = b_from + i;
    if (n > 0 && terms[static_cast<size_t>(i)] > 0) pts.emplace_back(n, terms[static_cast<size_t>(i)]);
  }
  if (pts.empty()) return {mult * acc, false};
  if (pts.size() < 3) return {std::numeric_limits<double>::infinity(), true};
  const double slope = loglog_slope(pts);
  if (!(slope < -1.0)) return {std::numeric_limits<double>::infinity(), true};
  const double n_last = pts.back().first;
  const double rest = kBudgetSafety * pts.back().second * n_last / (-1.0 - slope);
  return {mult * (acc + rest), false};
}

/// Exchange of the two chiral factors.
template <class S>
TensorState<S> flip(const TensorState<S>& v) {
  TensorState<S> out;
  for (const auto& [k, c] : v.entries()) out.add(TensorKey{k.j, k.right, k.left}, c);
  out.flag_overflow(v.overflow());
  return out;
}

/// Implementer of J_m -> -J_m: (-1)^{number of parts}, and sector j -> -j
/// since J_0 changes sign too.
template <class S>
SectorState<S> sign_automorphism(const SectorState<S>& v) {
  SectorState<S> out;
  for (const auto& [k, c] : v.entries()) out.add(SectorKey{-k.j, k.p}, k.p.length() % 2 ? S(-c) : c);
  out.flag_overflow(v.overflow());
  return out;
}

template <class S>
TensorState<S> sign_automorphism(const TensorState<S>& v) {
  TensorState<S> out;
  for (const auto& [k, c] : v.entries())
    out.add(TensorKey{-k.j, k.left, k.right}, (k.left.length() + k.right.length()) % 2 ? S(-c) : c);
  out.flag_overflow(v.overflow());
  return out;
}

namespace detail {
inline std::string render_real(const mpq_class& q) { return decimal_string(q, 30); }
inline std::string render_real(double x) { return shortest_decimal(x); }
}  // namespace detail

/// Convergence-study CSV: band, band_norm_sq, partial_sum.
template <class R>
void write_convergence_csv(std::ostream& os, const std::vector<R>& band_norms, int first_band = 0) {
  os << "band,band_norm_sq,partial_sum\n";
  R acc(0);
  for (size_t i = 0; i < band_norms.size(); ++i) {
    acc += band_norms[i];
    os << first_band + static_cast<int>(i) << "," << detail::render_real(band_norms[i]) << ","
       << detail::render_real(acc) << "\n";
  }
}

}  // namespace u1fock

#endif  // U1FOCK_TWODIM_HPP
