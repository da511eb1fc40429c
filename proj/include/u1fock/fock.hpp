#ifndef U1FOCK_FOCK_HPP
#define U1FOCK_FOCK_HPP

#include <compare>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "u1fock/partition.hpp"
#include "u1fock/scalar.hpp"

namespace u1fock {

struct ChargeWindow {
  int j_min = 0;
  int j_max = 0;
  bool contains(int j) const { return j >= j_min && j <= j_max; }
};

/// Finite arena: chiral level cutoff per tensor factor and a window of
/// charge sectors j (charge j * alpha0).
struct Truncation {
  int level_cutoff = 0;
  ChargeWindow window;

  bool admits(int j, int level) const { return window.contains(j) && level >= 0 && level <= level_cutoff; }
};

/// Truncation plus the run-wide charge quantum alpha0 and the comparison
/// tolerance of the active arithmetic.
template <class S>
struct Arena {
  Truncation trunc;
  Real<S> alpha0 = Real<S>(1);
  double tolerance = 0.0;

  int cutoff() const { return trunc.level_cutoff; }
  Real<S> charge(int j) const { return alpha0 * Real<S>(j); }
  Arena with_cutoff(int level_cutoff) const {
    Arena a = *this;
    a.trunc.level_cutoff = level_cutoff;
    return a;
  }
};

/// Basis partitions of one sector at one level.
inline std::vector<Partition> enumerate_basis(const Truncation& trunc, int j, int level) {
  if (!trunc.window.contains(j)) throw std::out_of_range("sector " + std::to_string(j) + " outside charge window");
  if (level < 0 || level > trunc.level_cutoff) throw std::out_of_range("level outside truncation");
  return partitions_of(level);
}

/// Every basis partition of level <= cutoff.
inline std::vector<Partition> enumerate_basis_upto(int cutoff) {
  std::vector<Partition> out;
  for (int l = 0; l <= cutoff; ++l) {
    auto ps = partitions_of(l);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

struct SectorKey {
  int j = 0;
  Partition p;
  auto operator<=>(const SectorKey&) const = default;
  bool operator==(const SectorKey&) const = default;
};

struct TensorKey {
  int j = 0;
  Partition left;
  Partition right;
  auto operator<=>(const TensorKey&) const = default;
  bool operator==(const TensorKey&) const = default;
};

/// Squared norm of a basis monomial; distinct monomials are orthogonal.
template <class S>
S gram(const Partition& a, const Partition& b) {
  if (!(a == b)) return S(0);
  return ScalarTraits<S>::from_real(real_from_rational<Real<S>>(mpq_class(z_lambda(a))));
}

template <class S>
Real<S> gram_real(const Partition& a) {
  return real_from_rational<Real<S>>(mpq_class(z_lambda(a)));
}

inline mpz_class key_gram(const Partition& p) { return z_lambda(p); }
inline mpz_class key_gram(const SectorKey& k) { return z_lambda(k.p); }
inline mpz_class key_gram(const TensorKey& k) { return z_lambda(k.left) * z_lambda(k.right); }

/// Finitely supported vector over a deterministic ordered basis. Components
/// dropped by a truncation are reported through `overflow`.
template <class Key, class S>
class SparseVector {
 public:
  using key_type = Key;
  using scalar_type = S;
  using map_type = std::map<Key, S>;

  SparseVector() = default;
  SparseVector(Key k, S c) { add(std::move(k), std::move(c)); }

  const map_type& entries() const { return entries_; }
  bool overflow() const { return overflow_; }
  void flag_overflow(bool v = true) { overflow_ = overflow_ || v; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  S coefficient(const Key& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? S(0) : it->second;
  }

  void add(const Key& k, const S& c) {
    if (ScalarTraits<S>::is_structural_zero(c)) return;
    auto [it, inserted] = entries_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<S>::is_structural_zero(it->second)) entries_.erase(it);
    }
  }

  void add_scaled(const SparseVector& o, const S& c) {
    for (const auto& [k, v] : o.entries_) add(k, v * c);
    flag_overflow(o.overflow_);
  }

  SparseVector& operator+=(const SparseVector& o) {
    add_scaled(o, S(1));
    return *this;
  }
  SparseVector& operator-=(const SparseVector& o) {
    add_scaled(o, S(-1));
    return *this;
  }
  SparseVector& operator*=(const S& c) {
    if (ScalarTraits<S>::is_structural_zero(c)) {
      entries_.clear();
      return *this;
    }
    for (auto& [k, v] : entries_) v *= c;
    return *this;
  }
  friend SparseVector operator+(SparseVector a, const SparseVector& b) { return a += b; }
  friend SparseVector operator-(SparseVector a, const SparseVector& b) { return a -= b; }
  friend SparseVector operator*(SparseVector a, const S& c) { return a *= c; }
  friend SparseVector operator*(const S& c, SparseVector a) { return a *= c; }

  /// True when every coefficient is zero within `tol` (exact modes: tol ignored).
  bool is_zero(double tol) const {
    for (const auto& [k, v] : entries_)
      if (!ScalarTraits<S>::is_zero(v, tol)) return false;
    return true;
  }

 private:
  map_type entries_;
  bool overflow_ = false;
};

/// Vector inside one chiral sector, keyed by partition only.
template <class S>
using ChiralVector = SparseVector<Partition, S>;
template <class S>
using SectorState = SparseVector<SectorKey, S>;
template <class S>
using TensorState = SparseVector<TensorKey, S>;

/// Hermitian form, conjugate-linear in the first argument.
template <class Key, class S>
S inner_product(const SparseVector<Key, S>& v, const SparseVector<Key, S>& w) {
  const auto& a = v.entries();
  const auto& b = w.entries();
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  S acc(0);
  for (const auto& [k, x] : small) {
    auto it = large.find(k);
    if (it == large.end()) continue;
    const S& va = (&small == &a) ? x : it->second;
    const S& wb = (&small == &a) ? it->second : x;
    acc += ScalarTraits<S>::conj(va) * wb *
           ScalarTraits<S>::from_real(real_from_rational<Real<S>>(mpq_class(key_gram(k))));
  }
  return acc;
}

template <class Key, class S>
Real<S> norm_sq(const SparseVector<Key, S>& v) {
  Real<S> acc(0);
  for (const auto& [k, x] : v.entries())
    acc += ScalarTraits<S>::abs_sq(x) * real_from_rational<Real<S>>(mpq_class(key_gram(k)));
  return acc;
}

/// Vacuum Omega of sector j.
template <class S>
SectorState<S> sector_vacuum(int j = 0) {
  return SectorState<S>(SectorKey{j, Partition{}}, S(1));
}

template <class S>
TensorState<S> tensor_vacuum(int j = 0) {
  return TensorState<S>(TensorKey{j, Partition{}, Partition{}}, S(1));
}

template <class S>
TensorState<S> tensor_basis(int j, Partition left, Partition right) {
  return TensorState<S>(TensorKey{j, std::move(left), std::move(right)}, S(1));
}

/// Left (x) right of two chiral states in the same sector; components whose
/// sectors differ are skipped since they leave the diagonal-charge space.
template <class S>
TensorState<S> tensor_product(const SectorState<S>& left, const SectorState<S>& right) {
  TensorState<S> out;
  for (const auto& [kl, cl] : left.entries())
    for (const auto& [kr, cr] : right.entries())
      if (kl.j == kr.j) out.add(TensorKey{kl.j, kl.p, kr.p}, cl * cr);
  out.flag_overflow(left.overflow() || right.overflow());
  return out;
}

// JSON-lines state dumps ----------------------------------------------------

namespace detail {

template <class S>
S scalar_from_strings(const std::string& re, const std::string& im) {
  if constexpr (std::is_same_v<S, FloatComplex>) {
    return {std::stod(re), std::stod(im)};
  } else {
    auto r = detail::parse_exact(re);
    auto i = detail::parse_exact(im);
    if (!r || !i) throw std::invalid_argument("bad rational in state dump");
    if constexpr (std::is_same_v<S, mpq_class>) {
      if (sgn(*i) != 0) throw std::invalid_argument("imaginary component in exact-rational dump");
      return *r;
    } else {
      return GaussianRational(*r, *i);
    }
  }
}

inline std::vector<int> parts_vector(const Partition& p) { return {p.parts().begin(), p.parts().end()}; }

}  // namespace detail

template <class S>
void dump_state(std::ostream& os, const TensorState<S>& v) {
  for (const auto& [k, c] : v.entries()) {
    nlohmann::ordered_json rec;
    rec["j"] = k.j;
    rec["left"] = detail::parts_vector(k.left);
    rec["right"] = detail::parts_vector(k.right);
    rec["re"] = ScalarTraits<S>::re_string(c);
    rec["im"] = ScalarTraits<S>::im_string(c);
    os << rec.dump() << '\n';
  }
}

/// Chiral states use the same record with an empty "right".
template <class S>
void dump_state(std::ostream& os, const SectorState<S>& v) {
  for (const auto& [k, c] : v.entries()) {
    nlohmann::ordered_json rec;
    rec["j"] = k.j;
    rec["left"] = detail::parts_vector(k.p);
    rec["right"] = std::vector<int>{};
    rec["re"] = ScalarTraits<S>::re_string(c);
    rec["im"] = ScalarTraits<S>::im_string(c);
    os << rec.dump() << '\n';
  }
}

template <class S>
TensorState<S> load_tensor_state(std::istream& is) {
  TensorState<S> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto rec = nlohmann::json::parse(line);
    TensorKey k{rec.at("j").get<int>(), Partition(rec.at("left").get<std::vector<int>>()),
                Partition(rec.at("right").get<std::vector<int>>())};
    out.add(k, detail::scalar_from_strings<S>(rec.at("re").get<std::string>(), rec.at("im").get<std::string>()));
  }
  return out;
}

}  // namespace u1fock

#endif  // U1FOCK_FOCK_HPP
