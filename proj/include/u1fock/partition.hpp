#ifndef U1FOCK_PARTITION_HPP
#define U1FOCK_PARTITION_HPP

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace u1fock {

/// Weakly decreasing sequence of positive integers. Indexes the monomial
/// J_{-p1} J_{-p2} ... Omega of a chiral sector.
class Partition {
 public:
  Partition() = default;

  /// Throws unless `parts` is weakly decreasing and positive.
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 1) throw std::invalid_argument("partition parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1]) throw std::invalid_argument("partition parts must be weakly decreasing");
    }
    level_ = std::accumulate(parts_.begin(), parts_.end(), 0);
  }

  static Partition from_unsorted(std::vector<int> parts) {
    std::sort(parts.begin(), parts.end(), std::greater<>());
    return Partition(std::move(parts));
  }

  std::span<const int> parts() const { return parts_; }
  int level() const { return level_; }
  int length() const { return static_cast<int>(parts_.size()); }
  bool empty() const { return parts_.empty(); }

  int multiplicity(int part) const {
    return static_cast<int>(std::count(parts_.begin(), parts_.end(), part));
  }

  /// (part, multiplicity) pairs in decreasing part order.
  std::vector<std::pair<int, int>> multiplicities() const {
    std::vector<std::pair<int, int>> out;
    for (int p : parts_) {
      if (!out.empty() && out.back().first == p) {
        ++out.back().second;
      } else {
        out.emplace_back(p, 1);
      }
    }
    return out;
  }

  Partition with_part(int part) const {
    if (part < 1) throw std::invalid_argument("partition parts must be positive");
    Partition out;
    out.parts_.reserve(parts_.size() + 1);
    auto it = std::upper_bound(parts_.begin(), parts_.end(), part, std::greater<>());
    out.parts_.insert(out.parts_.end(), parts_.begin(), it);
    out.parts_.push_back(part);
    out.parts_.insert(out.parts_.end(), it, parts_.end());
    out.level_ = level_ + part;
    return out;
  }

  /// Removes one copy of `part`; the part must be present.
  Partition without_part(int part) const {
    auto it = std::find(parts_.begin(), parts_.end(), part);
    if (it == parts_.end()) throw std::invalid_argument("part not present in partition");
    Partition out = *this;
    out.parts_.erase(out.parts_.begin() + (it - parts_.begin()));
    out.level_ -= part;
    return out;
  }

  /// Multiset union.
  Partition merged(const Partition& other) const {
    Partition out;
    out.parts_.resize(parts_.size() + other.parts_.size());
    std::merge(parts_.begin(), parts_.end(), other.parts_.begin(), other.parts_.end(), out.parts_.begin(),
               std::greater<>());
    out.level_ = level_ + other.level_;
    return out;
  }

  std::string to_string() const {
    std::string s = "[";
    for (size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[i]);
    }
    return s + "]";
  }

  bool operator==(const Partition& o) const { return parts_ == o.parts_; }

  // Level first, then reverse-lexicographic: [4] < [3,1] < [2,2] < [2,1,1].
  std::strong_ordering operator<=>(const Partition& o) const {
    if (auto c = level_ <=> o.level_; c != 0) return c;
    return o.parts_ <=> parts_;
  }

 private:
  std::vector<int> parts_;
  int level_ = 0;
};

/// All partitions of `level` in reverse-lexicographic order.
inline std::vector<Partition> partitions_of(int level) {
  if (level < 0) throw std::invalid_argument("negative level");
  std::vector<Partition> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int remaining, int max_part) {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      cur.push_back(p);
      rec(remaining - p, p);
      cur.pop_back();
    }
  };
  rec(level, level);
  return out;
}

/// Number of partitions p(n), by the standard recurrence on largest part.
inline long partition_count(int n) {
  std::vector<long> p(static_cast<size_t>(n) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int k = part; k <= n; ++k) p[static_cast<size_t>(k)] += p[static_cast<size_t>(k - part)];
  return p[static_cast<size_t>(n)];
}

/// z_lambda = prod_i i^{m_i} m_i!, the squared norm of the monomial.
inline mpz_class z_lambda(const Partition& p) {
  mpz_class z = 1;
  for (auto [part, mult] : p.multiplicities()) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(mult));
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(part), static_cast<unsigned long>(mult));
    z *= f * pw;
  }
  return z;
}

/// Visits every sub-multiset mu of `p` together with prod_i C(m_i(p), m_i(mu)).
template <class Visit>
void for_each_submultiset(const Partition& p, Visit&& visit) {
  const auto mult = p.multiplicities();
  std::vector<int> take(mult.size(), 0);
  std::vector<int> parts;
  while (true) {
    parts.clear();
    mpz_class weight = 1;
    for (size_t i = 0; i < mult.size(); ++i) {
      for (int t = 0; t < take[i]; ++t) parts.push_back(mult[i].first);
      mpz_class b;
      mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(mult[i].second), static_cast<unsigned long>(take[i]));
      weight *= b;
    }
    visit(Partition(parts), weight);
    size_t i = 0;
    while (i < mult.size() && take[i] == mult[i].second) take[i++] = 0;
    if (i == mult.size()) break;
    ++take[i];
  }
}

/// Multiset difference p \ q; q must be contained in p.
inline Partition partition_difference(const Partition& p, const Partition& q) {
  std::vector<int> out;
  auto a = p.parts();
  auto b = q.parts();
  size_t j = 0;
  for (int x : a) {
    if (j < b.size() && b[j] == x) {
      ++j;
    } else {
      out.push_back(x);
    }
  }
  if (j != b.size()) throw std::invalid_argument("partition_difference: not a sub-multiset");
  return Partition(std::move(out));
}

}  // namespace u1fock

#endif  // U1FOCK_PARTITION_HPP
