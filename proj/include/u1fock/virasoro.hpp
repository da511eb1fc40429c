#ifndef U1FOCK_VIRASORO_HPP
#define U1FOCK_VIRASORO_HPP

#include <algorithm>

#include "u1fock/heisenberg.hpp"

namespace u1fock {

/// Sugawara mode L_n = (1/2) sum_k :J_{n-k} J_k: on one monomial, no cutoff.
/// Only k in [n - level, level] can contribute. `prefactor` is the 1/2 of
/// the construction; the harness overrides it for fault injection only.
template <class S>
ChiralVector<S> sugawara_on_basis(int n, const Partition& p, const Real<S>& charge,
                                  const Real<S>& prefactor = rational<Real<S>>(1, 2)) {
  ChiralVector<S> out;
  const int level = p.level();
  const S pre = ScalarTraits<S>::from_real(prefactor);
  for (int k = n - level; k <= level; ++k) {
    const int hi = std::max(k, n - k);
    const int lo = std::min(k, n - k);
    current_on_basis<S>(hi, p, charge, [&](const Partition& q, const S& c1) {
      current_on_basis<S>(lo, q, charge, [&](const Partition& r, const S& c2) { out.add(r, pre * c1 * c2); });
    });
  }
  return out;
}

template <class S>
ChiralVector<S> apply_virasoro_chiral(int n, const ChiralVector<S>& v, const Real<S>& charge) {
  ChiralVector<S> out;
  for (const auto& [p, c] : v.entries()) out.add_scaled(sugawara_on_basis<S>(n, p, charge), c);
  out.flag_overflow(v.overflow());
  return out;
}

/// Virasoro mode L_n on charged sectors; overflow flagged like apply_J.
template <class S>
SectorState<S> apply_L(int n, const SectorState<S>& v, const Arena<S>& arena,
                       const Real<S>& prefactor = rational<Real<S>>(1, 2)) {
  SectorState<S> out;
  out.flag_overflow(v.overflow());
  for (const auto& [key, c] : v.entries()) {
    auto img = sugawara_on_basis<S>(n, key.p, arena.charge(key.j), prefactor);
    for (const auto& [q, k] : img.entries()) {
      if (q.level() > arena.cutoff()) {
        out.flag_overflow();
      } else {
        out.add(SectorKey{key.j, q}, c * k);
      }
    }
  }
  return out;
}

template <class S>
TensorState<S> apply_L_tensor(Side side, int n, const TensorState<S>& v, const Arena<S>& arena,
                              const Real<S>& prefactor = rational<Real<S>>(1, 2)) {
  TensorState<S> out;
  out.flag_overflow(v.overflow());
  for (const auto& [key, c] : v.entries()) {
    const Partition& target = side == Side::left ? key.left : key.right;
    auto img = sugawara_on_basis<S>(n, target, arena.charge(key.j), prefactor);
    for (const auto& [q, k] : img.entries()) {
      if (q.level() > arena.cutoff()) {
        out.flag_overflow();
        continue;
      }
      TensorKey nk = key;
      (side == Side::left ? nk.left : nk.right) = q;
      out.add(nk, c * k);
    }
  }
  return out;
}

/// Unperturbed two-dimensional generators built from L-hat modes:
/// l_plus = L1 (x) 1 + 1 (x) L-1, l_minus = L-1 (x) 1 + 1 (x) L1,
/// k0 = L0 (x) 1 - 1 (x) L0.
enum class LorentzGenerator { l_plus, l_minus, k0 };

/// Chiral-combination A = L_a (x) 1 + sign * 1 (x) L_b.
struct ChiralCombination {
  int left_mode = 0;
  int right_mode = 0;
  int right_sign = 1;

  ChiralCombination adjoint() const { return {-left_mode, -right_mode, right_sign}; }
};

inline ChiralCombination lorentz_combination(LorentzGenerator g) {
  switch (g) {
    case LorentzGenerator::l_plus: return {1, -1, 1};
    case LorentzGenerator::l_minus: return {-1, 1, 1};
    case LorentzGenerator::k0: return {0, 0, -1};
  }
  return {};
}

template <class S>
TensorState<S> apply_combination(const ChiralCombination& g, const TensorState<S>& v, const Arena<S>& arena) {
  auto out = apply_L_tensor(Side::left, g.left_mode, v, arena);
  out.add_scaled(apply_L_tensor(Side::right, g.right_mode, v, arena), S(g.right_sign));
  return out;
}

template <class S>
TensorState<S> apply_lorentz(LorentzGenerator g, const TensorState<S>& v, const Arena<S>& arena) {
  return apply_combination(lorentz_combination(g), v, arena);
}

}  // namespace u1fock

#endif  // U1FOCK_VIRASORO_HPP
