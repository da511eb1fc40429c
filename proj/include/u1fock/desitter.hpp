#ifndef U1FOCK_DESITTER_HPP
#define U1FOCK_DESITTER_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "u1fock/diagnostics.hpp"
#include "u1fock/twodim.hpp"
#include "u1fock/virasoro.hpp"

namespace u1fock {

enum class Family { lorentz, virasoro_c0, d_half };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::lorentz: return "lorentz";
    case Family::virasoro_c0: return "virasoro_c0";
    case Family::d_half: return "d_half";
  }
  return "?";
}

template <class S>
double magnitude(const S& x) {
  return std::hypot(ScalarTraits<S>::re_double(x), ScalarTraits<S>::im_double(x));
}

namespace detail {
inline std::string real_string(const mpq_class& q) { return rational_string(q); }
inline std::string real_string(double x) { return shortest_decimal(x); }
inline std::string budget_string(double b) { return std::isinf(b) ? "inf" : shortest_decimal(b); }
}  // namespace detail

/// An operator of the form C + c * Psi^sym_k, C a chiral combination (or
/// absent). Adjoints follow the mode-level relations.
template <class S>
struct GeneratorTerms {
  ChiralCombination chiral;
  bool has_chiral = true;
  S psi_coeff = S(0);
  int psi_mode = 0;

  GeneratorTerms adjoint() const { return {chiral.adjoint(), has_chiral, ScalarTraits<S>::conj(psi_coeff), -psi_mode}; }
};

template <class S>
GeneratorTerms<S> psi_only(int mode) {
  return {ChiralCombination{}, false, S(1), mode};
}

template <class S>
struct PerturbedGenerator {
  using R = Real<S>;
  Family family = Family::lorentz;
  int m = 0;
  R lambda = R(0);
  R alpha = R(0);

  GeneratorTerms<S> terms() const {
    GeneratorTerms<S> t;
    t.psi_mode = m;
    const S lam = ScalarTraits<S>::from_real(lambda);
    switch (family) {
      case Family::lorentz:
        if (m < -1 || m > 1) throw std::invalid_argument("lorentz generator needs m in {-1,0,1}");
        t.chiral = m == 0 ? ChiralCombination{0, 0, -1} : ChiralCombination{m, -m, 1};
        t.psi_coeff = m == 0 ? S(0) : lam;
        break;
      case Family::virasoro_c0:
        t.chiral = {m, -m, -1};
        if (m != 0 && !ScalarTraits<S>::is_structural_zero(lam)) {
          if constexpr (!ScalarTraits<S>::has_imaginary_unit)
            throw std::invalid_argument("virasoro_c0 needs complex arithmetic");
          else
            t.psi_coeff = ScalarTraits<S>::imaginary_unit() * lam * S(m);
        }
        break;
      case Family::d_half:
        t.chiral = {m, -m, -1};
        t.psi_coeff = lam;
        break;
    }
    return t;
  }
};

/// Parts of a sesquilinear form split by order in the Psi coefficients.
template <class S>
struct WeakParts {
  S chiral = S(0);
  S mixed = S(0);
  S psi_psi = S(0);
  double budget = 0;  // bound on the truncation error of psi_psi
  bool unbounded = false;

  S total() const { return chiral + mixed + psi_psi; }
  WeakParts& operator-=(const WeakParts& o) {
    chiral -= o.chiral;
    mixed -= o.mixed;
    psi_psi -= o.psi_psi;
    budget += o.budget;
    unbounded = unbounded || o.unbounded;
    return *this;
  }
};

/// Weak forms of generator products between interior tensor states at a
/// fixed truncation. Psi images of basis vectors are cached.
template <class S>
class WeakFormEngine {
 public:
  using R = Real<S>;

  struct PsiImage {
    TensorState<S> state;
    TailBudget tail;  // on the squared norm of the dropped bands
  };

  WeakFormEngine(const R& alpha, const Arena<S>& arena, int interior_buffer)
      : arena_(arena), field_(alpha, arena), buffer_(interior_buffer) {
    if (interior_buffer < 0) throw std::invalid_argument("interior buffer must be nonnegative");
  }

  const Arena<S>& arena() const { return arena_; }
  const TimeZeroField<S>& field() const { return field_; }
  int buffer() const { return buffer_; }
  int max_interior_level() const { return arena_.cutoff() - buffer_; }
  int steps() const { return std::abs(field_.field(1).charge_steps()); }

  bool sector_interior(int j) const {
    return arena_.trunc.window.contains(j + steps()) && arena_.trunc.window.contains(j - steps());
  }

  bool is_interior(const TensorState<S>& v) const {
    for (const auto& [k, c] : v.entries())
      if (k.left.level() > max_interior_level() || k.right.level() > max_interior_level() || !sector_interior(k.j))
        return false;
    return true;
  }

  void require_interior(const TensorState<S>& v) const {
    if (!is_interior(v))
      throw std::domain_error("test vector is not interior (level <= L - buffer and charge window margin)");
  }

  const PsiImage& psi_basis(int mode, const TensorKey& key) {
    auto it = cache_.find({mode, key});
    if (it != cache_.end()) return it->second;
    auto r = field_.apply(mode, 0, TensorState<S>(key, S(1)));
    return cache_.emplace(std::make_pair(mode, key), PsiImage{std::move(r.state), psi_tail(mode, key)})
        .first->second;
  }

  /// Squared norm of the bands of Psi^sym_mode e_key beyond the cutoff. It
  /// does not depend on the sector.
  TailBudget psi_tail(int mode, const TensorKey& key) {
    const std::tuple<int, Partition, Partition> k{mode, key.left, key.right};
    auto it = tails_.find(k);
    if (it != tails_.end()) return it->second;
    const int L = arena_.cutoff();
    const int b_hi = std::min(L - key.left.level(), L - key.right.level() - mode);
    return tails_.emplace(k, band_tail(field_.alpha(), mode, key.left, key.right, b_hi + 1, true)).first->second;
  }

  TensorState<S> psi(int mode, const TensorState<S>& v) {
    TensorState<S> out;
    for (const auto& [k, c] : v.entries()) out.add_scaled(psi_basis(mode, k).state, c);
    return out;
  }

  /// Bound on the norm of the dropped part of Psi^sym_mode v.
  double psi_tail_norm(int mode, const TensorState<S>& v) {
    double acc = 0;
    for (const auto& [k, c] : v.entries()) {
      const auto t = psi_tail(mode, k);
      if (t.infinite) return std::numeric_limits<double>::infinity();
      acc += magnitude(c) * std::sqrt(t.value);
    }
    return acc;
  }

  /// <bra, Psi^sym_mode ket> inside the truncation.
  S psi_element(const TensorState<S>& bra, int mode, const TensorState<S>& ket) const {
    return field_.matrix_element(bra, mode, 0, ket);
  }

  TensorState<S> chiral(const ChiralCombination& c, const TensorState<S>& v) const {
    return apply_combination(c, v, arena_);
  }

  /// <X^* phi1, Y phi2>.
  WeakParts<S> product(const GeneratorTerms<S>& X, const GeneratorTerms<S>& Y, const TensorState<S>& phi1,
                       const TensorState<S>& phi2) {
    WeakParts<S> p;
    const auto xa = X.adjoint();
    const bool xpsi = !ScalarTraits<S>::is_structural_zero(X.psi_coeff);
    const bool ypsi = !ScalarTraits<S>::is_structural_zero(Y.psi_coeff);
    TensorState<S> xc, yc;
    if (X.has_chiral) xc = chiral(xa.chiral, phi1);
    if (Y.has_chiral) yc = chiral(Y.chiral, phi2);
    if (X.has_chiral && Y.has_chiral) p.chiral = inner_product(xc, yc);
    if (ypsi && X.has_chiral) p.mixed += Y.psi_coeff * psi_element(xc, Y.psi_mode, phi2);
    if (xpsi && Y.has_chiral) p.mixed += X.psi_coeff * ScalarTraits<S>::conj(psi_element(yc, xa.psi_mode, phi1));
    if (xpsi && ypsi) {
      const S coeff = X.psi_coeff * Y.psi_coeff;
      p.psi_psi = coeff * field_.cross_element(phi1, xa.psi_mode, 0, phi2, Y.psi_mode, 0);
      const double t = psi_tail_norm(xa.psi_mode, phi1) * psi_tail_norm(Y.psi_mode, phi2);
      if (std::isinf(t))
        p.unbounded = true;
      else
        p.budget = magnitude(coeff) * t;
    }
    return p;
  }

  /// <A^* phi1, B phi2> - <B^* phi1, A phi2>.
  WeakParts<S> weak_commutator(const GeneratorTerms<S>& A, const GeneratorTerms<S>& B, const TensorState<S>& phi1,
                               const TensorState<S>& phi2) {
    require_interior(phi1);
    require_interior(phi2);
    auto p = product(A, B, phi1, phi2);
    p -= product(B, A, phi1, phi2);
    return p;
  }

  /// <phi1, G phi2> split into chiral part (in `chiral`) and Psi part (in `mixed`).
  WeakParts<S> matrix_element(const GeneratorTerms<S>& G, const TensorState<S>& phi1, const TensorState<S>& phi2) {
    WeakParts<S> p;
    if (G.has_chiral) p.chiral = inner_product(phi1, chiral(G.chiral, phi2));
    if (!ScalarTraits<S>::is_structural_zero(G.psi_coeff))
      p.mixed = G.psi_coeff * psi_element(phi1, G.psi_mode, phi2);
    return p;
  }

  /// <phi1, [C, Psi^sym_n] phi2> as a weak form.
  S mixed_commutator(const ChiralCombination& c, int n, const TensorState<S>& phi1, const TensorState<S>& phi2) {
    return psi_element(chiral(c.adjoint(), phi1), n, phi2) -
           ScalarTraits<S>::conj(psi_element(chiral(c, phi2), -n, phi1));
  }

  /// Closed form of the same: sum_k w(k) Y_k (x) Y_{k-mu-n} with
  /// w(k) = (d mu - k) + sigma (n + mu - d mu - k) for C = L_mu (x) 1 + sigma 1 (x) L_{-mu}.
  S mixed_closed_form(const ChiralCombination& c, int n, const TensorState<S>& phi1, const TensorState<S>& phi2) const {
    if (c.right_mode != -c.left_mode) throw std::invalid_argument("closed form needs right_mode = -left_mode");
    const R d = field_.weight();
    const R mu(c.left_mode);
    const R sigma(c.right_sign);
    const R nn(n);
    BandWeight<S> w = [&](const R& k, int) {
      return ScalarTraits<S>::from_real(R(d * mu - k + sigma * (nn + mu - d * mu - k)));
    };
    return field_.matrix_element(phi1, c.left_mode + n, 0, phi2, w);
  }

 private:
  Arena<S> arena_;
  TimeZeroField<S> field_;
  int buffer_;
  std::map<std::pair<int, TensorKey>, PsiImage> cache_;
  std::map<std::tuple<int, Partition, Partition>, TailBudget> tails_;
};

// ---------------------------------------------------------------------------
// Test-vector sampling

template <class S>
struct TestPair {
  TensorState<S> phi1;
  TensorState<S> phi2;
  std::string label;
};

namespace detail {

inline size_t pick(std::mt19937_64& rng, size_t n) { return static_cast<size_t>(rng() % n); }

inline Partition random_partition(std::mt19937_64& rng, int level) {
  auto ps = partitions_of(level);
  return ps[pick(rng, ps.size())];
}

inline std::string key_label(const TensorKey& k) {
  return "j=" + std::to_string(k.j) + " " + k.left.to_string() + "x" + k.right.to_string();
}

}  // namespace detail

/// Interior basis pairs with K0(phi1) = K0(phi2) - shift, the only pairs on
/// which a product shifting K0 by -shift can be nonzero. The vacuum pair
/// leads when admissible.
template <class S>
std::vector<TestPair<S>> sample_pairs(const WeakFormEngine<S>& engine, int shift, int samples, std::mt19937_64& rng,
                                      bool include_vacuum = true) {
  std::vector<TestPair<S>> out;
  const int top = engine.max_interior_level();
  if (top < 0) return out;
  std::vector<int> sectors;
  for (int j = engine.arena().trunc.window.j_min; j <= engine.arena().trunc.window.j_max; ++j)
    if (engine.sector_interior(j)) sectors.push_back(j);
  if (sectors.empty()) return out;
  if (include_vacuum && engine.sector_interior(0)) {
    auto omega = tensor_vacuum<S>(0);
    out.push_back({omega, omega, "vacuum"});
  }
  const int s = engine.steps();
  for (int i = 0, tries = 0; i < samples && tries < 100 * (samples + 1); ++tries) {
    const int j2 = sectors[detail::pick(rng, sectors.size())];
    std::vector<int> j1s;
    for (int j : {j2, j2 + 2 * s, j2 - 2 * s})
      if (engine.sector_interior(j)) j1s.push_back(j);
    const int j1 = j1s[detail::pick(rng, j1s.size())];
    const int ll2 = static_cast<int>(detail::pick(rng, static_cast<size_t>(top + 1)));
    const int lr2 = static_cast<int>(detail::pick(rng, static_cast<size_t>(top + 1)));
    const int diff = ll2 - lr2 - shift;
    const int lo = std::max(0, diff);
    const int hi = std::min(top, top + diff);
    if (lo > hi) continue;
    const int ll1 = lo + static_cast<int>(detail::pick(rng, static_cast<size_t>(hi - lo + 1)));
    const int lr1 = ll1 - diff;
    TensorKey k2{j2, detail::random_partition(rng, ll2), detail::random_partition(rng, lr2)};
    TensorKey k1{j1, detail::random_partition(rng, ll1), detail::random_partition(rng, lr1)};
    out.push_back({TensorState<S>(k1, S(1)), TensorState<S>(k2, S(1)),
                   detail::key_label(k1) + " | " + detail::key_label(k2)});
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relation sweeps

template <class S>
struct RelationRow {
  using R = Real<S>;
  Family family = Family::lorentz;
  int m = 0;
  int n = 0;
  R lambda = R(0);
  R alpha = R(0);
  int L = 0;
  int buffer = 0;
  std::string pair;
  S residual = S(0);
  S chiral_residual = S(0);
  S mixed_residual = S(0);
  S psi_psi = S(0);
  double budget = 0;
  bool unbounded = false;
  bool mixed_closed_form = true;
  std::string verdict;

  bool identity_failure() const { return verdict == "identity_failure"; }
  bool budget_failure() const { return verdict == "budget_exceeded" || verdict == "unbounded_budget"; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["family"] = family_name(family);
    j["m"] = m;
    j["n"] = n;
    j["lambda"] = detail::real_string(lambda);
    j["alpha"] = detail::real_string(alpha);
    j["L"] = L;
    j["buffer"] = buffer;
    j["residual_re"] = ScalarTraits<S>::re_string(residual);
    j["residual_im"] = ScalarTraits<S>::im_string(residual);
    j["tail_budget"] = detail::budget_string(unbounded ? std::numeric_limits<double>::infinity() : budget);
    j["verdict"] = verdict;
    j["pair"] = pair;
    j["mixed_residual_re"] = ScalarTraits<S>::re_string(mixed_residual);
    j["mixed_residual_im"] = ScalarTraits<S>::im_string(mixed_residual);
    j["psi_psi_re"] = ScalarTraits<S>::re_string(psi_psi);
    j["psi_psi_im"] = ScalarTraits<S>::im_string(psi_psi);
    j["mixed_closed_form"] = mixed_closed_form;
    return j;
  }
};

template <class S>
std::string relation_verdict(const RelationRow<S>& r, double tol) {
  using T = ScalarTraits<S>;
  if (!T::is_zero(r.chiral_residual, tol) || !T::is_zero(r.mixed_residual, tol) || !r.mixed_closed_form)
    return "identity_failure";
  if (T::is_zero(r.residual, tol)) return "exact";
  if (r.unbounded) return "unbounded_budget";
  return magnitude(r.residual) <= r.budget + tol ? "within_budget" : "budget_exceeded";
}

template <class S>
struct SweepParams {
  using R = Real<S>;
  R lambda = R(0);
  R alpha = R(0);
  Arena<S> arena;
  int buffer = 6;
  int mode_range = 1;
  int samples = 2;
  std::uint64_t seed = 1;
};

/// One row of the weak relation [X_m, X_n] = (m - n) X_{m+n} on a test pair.
template <class S>
RelationRow<S> relation_row(WeakFormEngine<S>& engine, Family family, int m, int n, const Real<S>& lambda,
                            const Real<S>& alpha, const TestPair<S>& pair) {
  auto gen = [&](int k) { return PerturbedGenerator<S>{family, k, lambda, alpha}.terms(); };
  RelationRow<S> row;
  row.family = family;
  row.m = m;
  row.n = n;
  row.lambda = lambda;
  row.alpha = alpha;
  row.L = engine.arena().cutoff();
  row.buffer = engine.buffer();
  row.pair = pair.label;
  const auto A = gen(m);
  const auto B = gen(n);
  auto wc = engine.weak_commutator(A, B, pair.phi1, pair.phi2);
  WeakParts<S> target;
  if (m != n) {
    target = engine.matrix_element(gen(m + n), pair.phi1, pair.phi2);
    target.chiral *= S(m - n);
    target.mixed *= S(m - n);
  }
  row.chiral_residual = wc.chiral - target.chiral;
  row.mixed_residual = wc.mixed - target.mixed;
  row.psi_psi = wc.psi_psi;
  row.residual = row.chiral_residual + row.mixed_residual + row.psi_psi;
  row.budget = wc.budget;
  row.unbounded = wc.unbounded;
  // closed forms of both cross commutators
  for (const auto& [g, k] : {std::pair{A, n}, std::pair{B, m}}) {
    const S lhs = engine.mixed_commutator(g.chiral, k, pair.phi1, pair.phi2);
    const S rhs = engine.mixed_closed_form(g.chiral, k, pair.phi1, pair.phi2);
    if (!ScalarTraits<S>::is_zero(S(lhs - rhs), engine.arena().tolerance)) row.mixed_closed_form = false;
  }
  row.verdict = relation_verdict(row, engine.arena().tolerance);
  return row;
}

template <class S>
struct RelationReport {
  std::vector<RelationRow<S>> rows;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;

  bool identity_ok() const {
    for (const auto& r : rows)
      if (r.identity_failure()) return false;
    return true;
  }
  bool budget_ok() const {
    for (const auto& r : rows)
      if (r.budget_failure()) return false;
    return true;
  }
  bool all_exact() const {
    for (const auto& r : rows)
      if (r.verdict != "exact") return false;
    return true;
  }
};

/// Sweep over (m, n) with |m|, |n|, |m + n| <= mode_range (lorentz: range 1)
/// and sampled interior pairs.
template <class S>
RelationReport<S> verify_relations(Family family, const SweepParams<S>& p) {
  const int range = family == Family::lorentz ? 1 : p.mode_range;
  WeakFormEngine<S> engine(p.alpha, p.arena, p.buffer);
  std::mt19937_64 rng(p.seed);
  RelationReport<S> report;
  if (engine.max_interior_level() < 0) report.warnings.push_back("vacuous interior: L < buffer");
  for (int m = -range; m <= range; ++m)
    for (int n = -range; n <= range; ++n) {
      if (std::abs(m + n) > range && m != n) continue;
      for (const auto& pair : sample_pairs(engine, m + n, p.samples, rng))
        report.rows.push_back(relation_row(engine, family, m, n, p.lambda, p.alpha, pair));
    }
  return report;
}

template <class S>
RelationReport<S> verify_lorentz(const SweepParams<S>& p) {
  return verify_relations(Family::lorentz, p);
}

/// c = 0 Virasoro sweep plus the explicit central-term check at (2, -2).
template <class S>
RelationReport<S> verify_virasoro_c0(const SweepParams<S>& p) {
  auto report = verify_relations(Family::virasoro_c0, p);
  if (!ScalarTraits<S>::is_structural_zero(ScalarTraits<S>::from_real(p.lambda)) || p.mode_range < 2) return report;
  // chiral central contributions on the vacuum: [L_2, L_{-2}] - 4 L_0 on each factor
  Arena<S> chiral_arena = p.arena.with_cutoff(std::max(p.arena.cutoff(), 2));
  auto omega = sector_vacuum<S>(0);
  auto l = [&](int k, const SectorState<S>& v) { return apply_L(k, v, chiral_arena); };
  const S left = inner_product(omega, l(2, l(-2, omega)) - l(-2, l(2, omega)) - l(0, omega) * S(4));
  // right factor: [1 (x) L_{-2}, 1 (x) L_2] enters with (-1)^2 and reversed order
  const S right = inner_product(omega, l(-2, l(2, omega)) - l(2, l(-2, omega)) + l(0, omega) * S(4));
  WeakFormEngine<S> engine(p.alpha, p.arena, p.buffer);
  S total(0);
  if (engine.sector_interior(0) && engine.max_interior_level() >= 0) {
    TestPair<S> vac{tensor_vacuum<S>(0), tensor_vacuum<S>(0), "vacuum"};
    total = relation_row(engine, Family::virasoro_c0, 2, -2, p.lambda, p.alpha, vac).residual;
  }
  report.extra["central_term"] = {{"m", 2},
                                  {"n", -2},
                                  {"left_chiral_re", ScalarTraits<S>::re_string(left)},
                                  {"right_chiral_re", ScalarTraits<S>::re_string(right)},
                                  {"chiral_sum_re", ScalarTraits<S>::re_string(S(left + right))},
                                  {"residual_re", ScalarTraits<S>::re_string(total)},
                                  {"residual_im", ScalarTraits<S>::im_string(total)},
                                  {"absent", ScalarTraits<S>::is_zero(total, p.arena.tolerance)}};
  return report;
}

// ---------------------------------------------------------------------------
// Symbolic coefficients, linear in d

struct LinearInD {
  mpq_class c0 = 0;
  mpq_class c1 = 0;

  mpq_class at(const mpq_class& d) const { return c0 + c1 * d; }
  double at(double d) const { return c0.get_d() + c1.get_d() * d; }
  bool operator==(const LinearInD& o) const { return c0 == o.c0 && c1 == o.c1; }
  LinearInD operator-(const LinearInD& o) const { return {c0 - o.c0, c1 - o.c1}; }
  LinearInD operator*(long k) const { return {c0 * k, c1 * k}; }
  std::string to_string() const { return rational_string(c0) + " + " + rational_string(c1) + " d"; }
};

/// (2d - 1) m - n, the weight of [L_m (x) 1 - 1 (x) L_{-m}, Psi_n].
inline LinearInD chiral_difference_coefficient(int m, int n) { return {mpq_class(-m - n), mpq_class(2 * m)}; }

/// n ((2d-1)m - n) - m ((2d-1)n - m); equals (m - n)(m + n) identically.
inline LinearInD virasoro_c0_mixed(int m, int n) {
  return chiral_difference_coefficient(m, n) * n - chiral_difference_coefficient(n, m) * m;
}

/// ((2d-1)m - n) - ((2d-1)n - m) = 2d (m - n).
inline LinearInD d_half_mixed(int m, int n) {
  return chiral_difference_coefficient(m, n) - chiral_difference_coefficient(n, m);
}

struct CoefficientRow {
  int m = 0;
  int n = 0;
  LinearInD coefficient;
  bool matches_2d_form = false;   // coefficient == 2d (m - n) as polynomials
  bool closes_at_half = false;    // equals m - n at d = 1/2
  bool closes_at_eighth = false;  // equals m - n at d = 1/8
};

inline std::vector<CoefficientRow> d_half_coefficient_table(int range) {
  std::vector<CoefficientRow> rows;
  for (int m = -range; m <= range; ++m)
    for (int n = -range; n <= range; ++n) {
      CoefficientRow r{m, n, d_half_mixed(m, n)};
      r.matches_2d_form = r.coefficient == LinearInD{0, mpq_class(2 * (m - n))};
      r.closes_at_half = r.coefficient.at(mpq_class(1, 2)) == m - n;
      r.closes_at_eighth = r.coefficient.at(mpq_class(1, 8)) == m - n;
      rows.push_back(r);
    }
  return rows;
}

/// Diagnostic report for the d = 1/2 family: symbolic closure table, weak
/// rows on sampled pairs and the vacuum band-norm behaviour.
template <class S>
nlohmann::ordered_json explore_d_half(const SweepParams<S>& p, int band_count = 256) {
  using R = Real<S>;
  nlohmann::ordered_json out;
  const R d = p.alpha * p.alpha / R(2);
  out["d"] = detail::real_string(d);
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  bool form_ok = true, half_ok = true, eighth_fails = true;
  for (const auto& r : d_half_coefficient_table(3)) {
    form_ok = form_ok && r.matches_2d_form;
    half_ok = half_ok && r.closes_at_half;
    if (r.m != r.n) eighth_fails = eighth_fails && !r.closes_at_eighth;
    const R value = real_from_rational<R>(r.coefficient.c0) + real_from_rational<R>(r.coefficient.c1) * d;
    table.push_back({{"m", r.m},
                     {"n", r.n},
                     {"coefficient", r.coefficient.to_string()},
                     {"value_at_d", detail::real_string(value)},
                     {"closure", r.m - r.n},
                     {"closes", value == R(r.m - r.n)}});
  }
  out["coefficient_form_2d"] = form_ok;
  out["closes_at_d_half"] = half_ok;
  out["fails_at_d_eighth"] = eighth_fails;
  out["coefficients"] = table;
  // vacuum band norms of Psi_0, closed form
  auto bands = vacuum_band_norms(to_double(p.alpha), 0, band_count);
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 1; i < bands.size(); ++i) pts.emplace_back(static_cast<double>(i), bands[i]);
  const double slope = loglog_slope(pts, band_count / 8.0, band_count);
  out["band_slope"] = shortest_decimal(slope);
  out["bands_summable"] = slope < -1.0;
  auto report = verify_relations(Family::d_half, p);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) rows.push_back(r.to_json());
  out["rows"] = rows;
  return out;
}

// ---------------------------------------------------------------------------
// Weak commutativity of the symmetrized time-zero modes

struct CommutativitySummary {
  bool vacuum_exact = true;      // every vacuum commutator is exactly zero
  double vacuum_max_abs = 0;
  bool excited_decreasing = true;
  bool within_budget = true;
};

template <class S>
nlohmann::ordered_json verify_commutativity(const Real<S>& alpha, const Arena<S>& base, const std::vector<int>& cutoffs,
                                            int mode_range, int buffer, int samples, std::uint64_t seed,
                                            CommutativitySummary* summary = nullptr) {
  if (cutoffs.empty()) throw std::invalid_argument("verify_commutativity: no cutoffs");
  CommutativitySummary sum;
  nlohmann::ordered_json out;
  out["alpha"] = detail::real_string(alpha);
  out["buffer"] = buffer;
  nlohmann::ordered_json vacuum = nlohmann::ordered_json::array();
  nlohmann::ordered_json excited = nlohmann::ordered_json::array();
  const int L_small = *std::min_element(cutoffs.begin(), cutoffs.end());
  const int L_big = *std::max_element(cutoffs.begin(), cutoffs.end());
  std::map<int, WeakFormEngine<S>> engines;
  for (int L : cutoffs) engines.try_emplace(L, alpha, base.with_cutoff(L), buffer);
  WeakFormEngine<S>& big = engines.at(L_big);
  WeakFormEngine<S>& small = engines.at(L_small);
  const double tol = base.tolerance;
  auto omega = tensor_vacuum<S>(0);
  std::mt19937_64 rng(seed);
  for (int m = -mode_range; m <= mode_range; ++m)
    for (int n = -mode_range; n <= mode_range; ++n) {
      auto wc = big.weak_commutator(psi_only<S>(m), psi_only<S>(n), omega, omega).total();
      const bool exact = ScalarTraits<S>::is_zero(wc, tol);
      sum.vacuum_exact = sum.vacuum_exact && exact;
      sum.vacuum_max_abs = std::max(sum.vacuum_max_abs, magnitude(wc));
      vacuum.push_back({{"m", m},
                        {"n", n},
                        {"L", L_big},
                        {"residual_re", ScalarTraits<S>::re_string(wc)},
                        {"residual_im", ScalarTraits<S>::im_string(wc)},
                        {"exact_zero", exact}});
      for (const auto& pair : sample_pairs(small, m + n, samples, rng, false)) {
        nlohmann::ordered_json row{{"m", m}, {"n", n}, {"pair", pair.label}};
        double first = 0, last = 0;
        bool first_set = false;
        nlohmann::ordered_json series = nlohmann::ordered_json::array();
        for (int L : cutoffs) {
          auto p = engines.at(L).weak_commutator(psi_only<S>(m), psi_only<S>(n), pair.phi1, pair.phi2);
          const S r = p.total();
          const bool ok = ScalarTraits<S>::is_zero(r, tol) || (!p.unbounded && magnitude(r) <= p.budget + tol);
          sum.within_budget = sum.within_budget && ok;
          if (!first_set) {
            first = magnitude(r);
            first_set = true;
          }
          last = magnitude(r);
          series.push_back({{"L", L},
                            {"residual_re", ScalarTraits<S>::re_string(r)},
                            {"residual_im", ScalarTraits<S>::im_string(r)},
                            {"tail_budget", detail::budget_string(p.unbounded ? INFINITY : p.budget)},
                            {"within_budget", ok}});
        }
        const bool decreasing = last < first || (last == 0 && first == 0);
        sum.excited_decreasing = sum.excited_decreasing && decreasing;
        row["series"] = series;
        row["decreasing"] = decreasing;
        excited.push_back(row);
      }
    }
  out["vacuum"] = vacuum;
  out["vacuum_exact_at_finite_cutoff"] = sum.vacuum_exact;
  out["vacuum_max_abs"] = shortest_decimal(sum.vacuum_max_abs);
  out["excited"] = excited;
  out["excited_decreasing"] = sum.excited_decreasing;
  out["excited_within_budget"] = sum.within_budget;
  if (summary) *summary = sum;
  return out;
}

}  // namespace u1fock

#endif  // U1FOCK_DESITTER_HPP
