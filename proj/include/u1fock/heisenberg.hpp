#ifndef U1FOCK_HEISENBERG_HPP
#define U1FOCK_HEISENBERG_HPP

#include "u1fock/fock.hpp"

namespace u1fock {

enum class Side { left, right };

/// J_m on the monomial J_{-p} Omega_beta, without any cutoff. Emits at most
/// one (partition, coefficient) pair.
template <class S, class Emit>
void current_on_basis(int m, const Partition& p, const Real<S>& charge, Emit&& emit) {
  if (m < 0) {
    emit(p.with_part(-m), S(1));
  } else if (m == 0) {
    if (!(charge == Real<S>(0))) emit(p, ScalarTraits<S>::from_real(charge));
  } else {
    const int mult = p.multiplicity(m);
    if (mult > 0) emit(p.without_part(m), S(static_cast<long>(m) * mult));
  }
}

/// J_m on a chiral vector of charge beta; no cutoff.
template <class S>
ChiralVector<S> apply_current_chiral(int m, const ChiralVector<S>& v, const Real<S>& charge) {
  ChiralVector<S> out;
  for (const auto& [p, c] : v.entries())
    current_on_basis<S>(m, p, charge, [&](const Partition& q, const S& k) { out.add(q, c * k); });
  out.flag_overflow(v.overflow());
  return out;
}

/// Current mode J_m on charged sectors. Components above the level cutoff
/// are dropped and flagged.
template <class S>
SectorState<S> apply_J(int m, const SectorState<S>& v, const Arena<S>& arena) {
  SectorState<S> out;
  out.flag_overflow(v.overflow());
  for (const auto& [key, c] : v.entries()) {
    current_on_basis<S>(m, key.p, arena.charge(key.j), [&](const Partition& q, const S& k) {
      if (q.level() > arena.cutoff()) {
        out.flag_overflow();
      } else {
        out.add(SectorKey{key.j, q}, c * k);
      }
    });
  }
  return out;
}

/// J_m on one tensor factor, identity on the other.
template <class S>
TensorState<S> apply_J_tensor(Side side, int m, const TensorState<S>& v, const Arena<S>& arena) {
  TensorState<S> out;
  out.flag_overflow(v.overflow());
  for (const auto& [key, c] : v.entries()) {
    const Partition& target = side == Side::left ? key.left : key.right;
    current_on_basis<S>(m, target, arena.charge(key.j), [&](const Partition& q, const S& k) {
      if (q.level() > arena.cutoff()) {
        out.flag_overflow();
        return;
      }
      TensorKey nk = key;
      (side == Side::left ? nk.left : nk.right) = q;
      out.add(nk, c * k);
    });
  }
  return out;
}

}  // namespace u1fock

#endif  // U1FOCK_HEISENBERG_HPP
