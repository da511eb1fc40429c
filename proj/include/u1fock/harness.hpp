#ifndef U1FOCK_HARNESS_HPP
#define U1FOCK_HARNESS_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "u1fock/vertex.hpp"
#include "u1fock/virasoro.hpp"

namespace u1fock {

/// First failing check of a suite: the mode pair, the basis vector it was
/// applied to and the first nonzero residual component.
struct CheckFailure {
  int m = 0;
  int n = 0;
  std::string basis;
  std::string component;
  std::string residual_re;
  std::string residual_im;
};

struct SuiteResult {
  std::string name;
  long checked = 0;
  long failed = 0;
  int cells = 0;
  int vacuous_cells = 0;
  std::optional<CheckFailure> first_failure;

  bool ok() const { return failed == 0; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["checked"] = checked;
    j["failed"] = failed;
    j["cells"] = cells;
    j["vacuous_cells"] = vacuous_cells;
    if (first_failure) {
      j["first_failure"] = {{"m", first_failure->m},
                            {"n", first_failure->n},
                            {"basis", first_failure->basis},
                            {"component", first_failure->component},
                            {"residual_re", first_failure->residual_re},
                            {"residual_im", first_failure->residual_im}};
    } else {
      j["first_failure"] = nullptr;
    }
    return j;
  }
};

/// Ranges for the algebra suites. Levels are limited per check by the
/// interior budget, optionally capped by max_level.
template <class S>
struct AlgebraOptions {
  using R = Real<S>;
  R alpha = rational<R>(1, 2);
  int sector_range = 2;  // sectors |j| <= sector_range inside the window
  int current_range = 6;
  int virasoro_range = 4;
  int primary_range = 3;
  int delta_range = 3;
  int oracle_delta_range = 8;
  int max_level = -1;  // -1: no cap beyond the interior budget
  bool only_sectors_0_1_for_oracle = true;
  R sugawara_prefactor = rational<R>(1, 2);  // anything but 1/2 is a fault
};

struct AlgebraReport {
  std::vector<SuiteResult> suites;
  std::vector<std::string> warnings;

  bool ok() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
  }

  const CheckFailure* first_failure() const {
    for (const auto& s : suites)
      if (s.first_failure) return &*s.first_failure;
    return nullptr;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["pass"] = ok();
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : suites) arr.push_back(s.to_json());
    j["suites"] = arr;
    j["warnings"] = warnings;
    for (const auto& s : suites)
      if (s.first_failure) {
        j["first_failure"] = s.to_json()["first_failure"];
        j["first_failure"]["suite"] = s.name;
        break;
      }
    return j;
  }
};

inline int neg_part(int k) { return k < 0 ? -k : 0; }
inline int pos_part(int k) { return k > 0 ? k : 0; }

namespace detail {

inline std::string sector_label(const SectorKey& k) { return "j=" + std::to_string(k.j) + " " + k.p.to_string(); }

template <class S>
class SuiteRunner {
 public:
  SuiteRunner(std::string name, const Arena<S>& arena, int max_level) : arena_(arena), cap_(max_level) {
    result_.name = std::move(name);
  }

  /// Basis vectors of sectors in `sectors` with level <= L - budget.
  std::vector<SectorKey> interior(const std::vector<int>& sectors, int budget) {
    ++result_.cells;
    std::vector<SectorKey> out;
    int top = arena_.cutoff() - budget;
    if (cap_ >= 0) top = std::min(top, cap_);
    for (int j : sectors)
      for (int l = 0; l <= top; ++l)
        for (auto& p : partitions_of(l)) out.push_back({j, p});
    if (out.empty()) ++result_.vacuous_cells;
    return out;
  }

  void record(int m, int n, const SectorKey& basis, const SectorState<S>& residual) {
    ++result_.checked;
    const double tol = arena_.tolerance;
    if (residual.overflow()) {
      // the interior budget was wrong; never let a drop pass silently
      ++result_.failed;
      if (!result_.first_failure) result_.first_failure = CheckFailure{m, n, sector_label(basis), "overflow", "", ""};
      return;
    }
    for (const auto& [k, c] : residual.entries()) {
      if (ScalarTraits<S>::is_zero(c, tol)) continue;
      ++result_.failed;
      if (!result_.first_failure)
        result_.first_failure = CheckFailure{m, n, sector_label(basis), sector_label(k), ScalarTraits<S>::re_string(c),
                                             ScalarTraits<S>::im_string(c)};
      return;
    }
  }

  SuiteResult finish(std::vector<std::string>& warnings) {
    if (result_.checked == 0)
      warnings.push_back("vacuous interior: " + result_.name + " checked no basis vector");
    else if (result_.vacuous_cells > 0)
      warnings.push_back("vacuous interior: " + result_.name + " has " + std::to_string(result_.vacuous_cells) +
                         " of " + std::to_string(result_.cells) + " cells with empty interior");
    return result_;
  }

 private:
  Arena<S> arena_;
  int cap_;
  SuiteResult result_;
};

template <class S>
std::vector<int> sectors_within(const Arena<S>& arena, int range) {
  std::vector<int> out;
  for (int j = -range; j <= range; ++j)
    if (arena.trunc.window.contains(j)) out.push_back(j);
  return out;
}

}  // namespace detail

/// [J_m, J_n] v = m delta_{m,-n} v on levels <= L - neg(m) - neg(n).
template <class S>
SuiteResult check_current_relations(const Arena<S>& arena, const AlgebraOptions<S>& o,
                                    std::vector<std::string>& warnings) {
  detail::SuiteRunner<S> run("current_relations", arena, o.max_level);
  const auto sectors = detail::sectors_within(arena, o.sector_range);
  for (int m = -o.current_range; m <= o.current_range; ++m)
    for (int n = -o.current_range; n <= o.current_range; ++n)
      for (const auto& key : run.interior(sectors, neg_part(m) + neg_part(n))) {
        SectorState<S> v(key, S(1));
        auto r = apply_J(m, apply_J(n, v, arena), arena) - apply_J(n, apply_J(m, v, arena), arena);
        if (m == -n) r -= v * S(m);
        run.record(m, n, key, r);
      }
  return run.finish(warnings);
}

/// <J_{-m} v, w> = <v, J_m w> for m > 0 on basis pairs.
template <class S>
SuiteResult check_current_adjoint(const Arena<S>& arena, const AlgebraOptions<S>& o,
                                  std::vector<std::string>& warnings) {
  detail::SuiteRunner<S> run("current_adjoint", arena, o.max_level);
  const auto sectors = detail::sectors_within(arena, o.sector_range);
  for (int m = 1; m <= o.current_range; ++m)
    for (const auto& key : run.interior(sectors, m)) {
      SectorState<S> v(key, S(1));
      auto up = apply_J(-m, v, arena);
      SectorState<S> r;
      for (const auto& [wk, wc] : up.entries()) {
        SectorState<S> w(wk, S(1));
        const S diff = inner_product(up, w) - inner_product(v, apply_J(m, w, arena));
        r.add(wk, diff);
      }
      run.record(m, -m, key, r);
    }
  return run.finish(warnings);
}

/// [L_m, L_n] v = (m - n) L_{m+n} v + (1/12) m (m^2 - 1) delta_{m,-n} v.
template <class S>
SuiteResult check_virasoro_relations(const Arena<S>& arena, const AlgebraOptions<S>& o,
                                     std::vector<std::string>& warnings) {
  detail::SuiteRunner<S> run("virasoro_relations", arena, o.max_level);
  const auto sectors = detail::sectors_within(arena, o.sector_range);
  const auto& pre = o.sugawara_prefactor;
  auto L = [&](int k, const SectorState<S>& v) { return apply_L(k, v, arena, pre); };
  for (int m = -o.virasoro_range; m <= o.virasoro_range; ++m)
    for (int n = -o.virasoro_range; n <= o.virasoro_range; ++n)
      for (const auto& key : run.interior(sectors, neg_part(m) + neg_part(n))) {
        SectorState<S> v(key, S(1));
        auto r = L(m, L(n, v)) - L(n, L(m, v)) - L(m + n, v) * S(m - n);
        if (m == -n) r -= v * ScalarTraits<S>::from_real(Real<S>(rational<Real<S>>(m * (m * m - 1), 12)));
        run.record(m, n, key, r);
      }
  return run.finish(warnings);
}

/// [L_m, J_n] v = -n J_{m+n} v.
template <class S>
SuiteResult check_virasoro_current(const Arena<S>& arena, const AlgebraOptions<S>& o,
                                   std::vector<std::string>& warnings) {
  detail::SuiteRunner<S> run("virasoro_current", arena, o.max_level);
  const auto sectors = detail::sectors_within(arena, o.sector_range);
  const auto& pre = o.sugawara_prefactor;
  for (int m = -o.virasoro_range; m <= o.virasoro_range; ++m)
    for (int n = -o.virasoro_range; n <= o.virasoro_range; ++n)
      for (const auto& key : run.interior(sectors, neg_part(m) + neg_part(n))) {
        SectorState<S> v(key, S(1));
        auto r = apply_L(m, apply_J(n, v, arena), arena, pre) - apply_J(n, apply_L(m, v, arena, pre), arena) +
                 apply_J(m + n, v, arena) * S(n);
        run.record(m, n, key, r);
      }
  return run.finish(warnings);
}

/// [L_m, Y(delta)] v = ((d - 1) m - s) Y(delta - m) v with s the mode index
/// of Y(delta) on the sector of v. The pair reported is (m, delta).
template <class S>
SuiteResult check_primary_covariance(const Arena<S>& arena, const AlgebraOptions<S>& o,
                                     std::vector<std::string>& warnings) {
  using R = Real<S>;
  detail::SuiteRunner<S> run("primary_covariance", arena, o.max_level);
  ChargedField<S> field(o.alpha, arena);
  std::vector<int> sectors;
  for (int j : detail::sectors_within(arena, o.sector_range))
    if (arena.trunc.window.contains(j + field.charge_steps())) sectors.push_back(j);
  const R d = field.weight();
  const auto& pre = o.sugawara_prefactor;
  for (int m = -o.primary_range; m <= o.primary_range; ++m)
    for (int delta = -o.delta_range; delta <= o.delta_range; ++delta)
      for (const auto& key : run.interior(sectors, pos_part(delta) + neg_part(m))) {
        SectorState<S> v(key, S(1));
        const R s = field.mode_index(delta, key.j);
        const S coeff = ScalarTraits<S>::from_real(R((d - R(1)) * R(m) - s));
        auto r = apply_L(m, field.apply(delta, v), arena, pre) - field.apply(delta, apply_L(m, v, arena, pre)) -
                 field.apply(delta - m, v) * coeff;
        run.record(m, delta, key, r);
      }
  return run.finish(warnings);
}

/// [J_m, Y(delta)] v = alpha Y(delta - m) v. The pair reported is (m, delta).
template <class S>
SuiteResult check_current_covariance(const Arena<S>& arena, const AlgebraOptions<S>& o,
                                     std::vector<std::string>& warnings) {
  detail::SuiteRunner<S> run("current_covariance", arena, o.max_level);
  ChargedField<S> field(o.alpha, arena);
  std::vector<int> sectors;
  for (int j : detail::sectors_within(arena, o.sector_range))
    if (arena.trunc.window.contains(j + field.charge_steps())) sectors.push_back(j);
  const S a = ScalarTraits<S>::from_real(o.alpha);
  for (int m = -o.current_range; m <= o.current_range; ++m)
    for (int delta = -o.delta_range; delta <= o.delta_range; ++delta)
      for (const auto& key : run.interior(sectors, pos_part(delta) + neg_part(m))) {
        SectorState<S> v(key, S(1));
        auto r = apply_J(m, field.apply(delta, v), arena) - field.apply(delta, apply_J(m, v, arena)) -
                 field.apply(delta - m, v) * a;
        run.record(m, delta, key, r);
      }
  return run.finish(warnings);
}

/// Expansion against recursion, sectors 0 and 1 (or the whole range), all
/// delta with source and target inside the cutoff. The pair reported is (delta, 0).
template <class S>
SuiteResult check_oracle_equivalence(const Arena<S>& arena, const AlgebraOptions<S>& o,
                                     std::vector<std::string>& warnings) {
  detail::SuiteRunner<S> run("oracle_equivalence", arena, o.max_level);
  ChargedField<S> field(o.alpha, arena);
  std::vector<int> sectors;
  for (int j : detail::sectors_within(arena, o.sector_range)) {
    if (o.only_sectors_0_1_for_oracle && j != 0 && j != 1) continue;
    if (arena.trunc.window.contains(j + field.charge_steps())) sectors.push_back(j);
  }
  for (int delta = -o.oracle_delta_range; delta <= o.oracle_delta_range; ++delta)
    for (const auto& key : run.interior(sectors, pos_part(delta))) {
      SectorState<S> v(key, S(1));
      auto r = field.apply(delta, v) - apply_Y_mode_recursive(o.alpha, delta, v, arena);
      run.record(delta, 0, key, r);
    }
  return run.finish(warnings);
}

/// ||Y(n) Omega||^2 against the closed form for n <= min(L, 30).
template <class S>
SuiteResult check_vacuum_norms(const Arena<S>& arena, const AlgebraOptions<S>& o,
                               std::vector<std::string>& warnings) {
  detail::SuiteRunner<S> run("vacuum_norms", arena, o.max_level);
  ChargedField<S> field(o.alpha, arena);
  const int top = std::min(arena.cutoff(), 30);
  const SectorKey vac{0, Partition{}};
  if (arena.trunc.window.contains(0) && arena.trunc.window.contains(field.charge_steps())) {
    for (int n = 0; n <= top; ++n) {
      auto img = field.apply(n, SectorState<S>(vac, S(1)));
      const S diff = ScalarTraits<S>::from_real(Real<S>(norm_sq(img) - vacuum_mode_norm_sq(o.alpha, n)));
      SectorState<S> r;
      r.add(vac, diff);
      run.record(n, 0, vac, r);
    }
  }
  return run.finish(warnings);
}

/// Every exact identity suite of the chiral theory at one truncation.
template <class S>
AlgebraReport verify_algebra(const Arena<S>& arena, const AlgebraOptions<S>& o = {}) {
  AlgebraReport rep;
  rep.suites.push_back(check_current_relations(arena, o, rep.warnings));
  rep.suites.push_back(check_current_adjoint(arena, o, rep.warnings));
  rep.suites.push_back(check_virasoro_relations(arena, o, rep.warnings));
  rep.suites.push_back(check_virasoro_current(arena, o, rep.warnings));
  rep.suites.push_back(check_primary_covariance(arena, o, rep.warnings));
  rep.suites.push_back(check_current_covariance(arena, o, rep.warnings));
  rep.suites.push_back(check_oracle_equivalence(arena, o, rep.warnings));
  rep.suites.push_back(check_vacuum_norms(arena, o, rep.warnings));
  return rep;
}

}  // namespace u1fock

#endif  // U1FOCK_HARNESS_HPP
