// u1fock: verification runs for the truncated charged Fock space.
//
//   u1fock <subcommand> [--config FILE] [--key value ...]
//
// Exit codes: 0 pass, 1 usage, 2 identity failure, 3 budget exceeded.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "u1fock/u1fock.hpp"

namespace {

using namespace u1fock;
using json = nlohmann::ordered_json;

enum Exit { kPass = 0, kUsage = 1, kIdentity = 2, kBudget = 3 };

struct RunConfig {
  std::string alpha0 = "1/2";
  int alpha_multiplier = 1;
  int level_cutoff = 10;
  std::vector<int> charge_window{-4, 4};
  std::string lambda = "0";
  std::string arithmetic = "exact-rational";
  std::string tolerance;  // empty: 0 in exact modes, 1e-10 in float
  std::uint64_t seed = 1;
  std::string output;
  // sweep knobs shared by several subcommands
  int buffer = 6;
  int mode_range = -1;  // -1: the subcommand's default
  int samples = 2;
};

struct CommandArgs {
  int n_max = 512;
  std::string m_list = "0";
  int bands = 256;
  std::string cutoffs;
  int delta = 0;
  std::string fault_prefactor;
  int max_level = -1;
  std::string state = "vacuum";
  int mode = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void log(const std::string& msg) { std::cerr << "u1fock: " << msg << "\n"; }

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not an integer list: '" + s + "'");
    }
  }
  return out;
}

struct Resolved {
  RunConfig cfg;
  Arithmetic arithmetic = Arithmetic::exact_rational;
  double tolerance = 0.0;
  Parameter alpha0;
  Parameter alpha;
  Parameter lambda;
};

Resolved resolve(const RunConfig& cfg) {
  Resolved r;
  r.cfg = cfg;
  try {
    r.arithmetic = parse_arithmetic(cfg.arithmetic);
    r.alpha0 = Parameter::parse(cfg.alpha0);
    r.lambda = Parameter::parse(cfg.lambda);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.alpha_multiplier == 0) throw UsageError("alpha_multiplier must be nonzero");
  r.alpha = r.alpha0 * cfg.alpha_multiplier;
  if (cfg.level_cutoff < 0) throw UsageError("level_cutoff must be nonnegative");
  if (cfg.charge_window.size() != 2 || cfg.charge_window[0] > cfg.charge_window[1])
    throw UsageError("charge_window must be two integers lo,hi with lo <= hi");
  if (cfg.tolerance.empty()) {
    r.tolerance = r.arithmetic == Arithmetic::floating ? 1e-10 : 0.0;
  } else {
    try {
      r.tolerance = std::stod(cfg.tolerance);
    } catch (const std::exception&) {
      throw UsageError("tolerance must be a decimal");
    }
  }
  try {
    scalar_mode_select(r.arithmetic, r.tolerance, {r.alpha0, r.lambda});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return r;
}

json config_json(const Resolved& r) {
  json j;
  j["alpha0"] = r.alpha0.to_string();
  j["alpha_multiplier"] = r.cfg.alpha_multiplier;
  j["alpha"] = r.alpha.to_string();
  j["level_cutoff"] = r.cfg.level_cutoff;
  j["charge_window"] = r.cfg.charge_window;
  j["lambda"] = r.lambda.to_string();
  j["arithmetic"] = arithmetic_name(r.arithmetic);
  j["tolerance"] = shortest_decimal(r.tolerance);
  j["seed"] = r.cfg.seed;
  return j;
}

/// |alpha| < 1/sqrt(2), decided exactly when alpha is rational.
bool below_threshold(const Parameter& alpha) {
  if (alpha.is_exact()) return alpha.exact() * alpha.exact() * 2 < 1;
  return alpha.approx() * alpha.approx() * 2.0 < 1.0;
}

void require_convergent(const Resolved& r, const std::string& command) {
  if (!below_threshold(r.alpha))
    throw UsageError(command + " needs |alpha| < 1/sqrt(2); alpha = " + r.alpha.to_string() +
                     " (only diverge-demo runs at or above the threshold)");
}

template <class S>
Arena<S> make_arena(const Resolved& r) {
  using R = Real<S>;
  return Arena<S>{Truncation{r.cfg.level_cutoff, {r.cfg.charge_window[0], r.cfg.charge_window[1]}},
                  r.alpha0.as<R>(), r.tolerance};
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(const Resolved& r, const json& j) {
  Output out(r.cfg.output);
  out.os() << j.dump(2) << "\n";
}

json base_report(const Resolved& r, const std::string& command) {
  json j;
  j["command"] = command;
  j["config"] = config_json(r);
  return j;
}

// ---------------------------------------------------------------------------

template <class S>
int verify_algebra_cmd(const Resolved& r, const CommandArgs& a) {
  using R = Real<S>;
  AlgebraOptions<S> o;
  o.alpha = r.alpha.as<R>();
  o.max_level = a.max_level;
  if (!a.fault_prefactor.empty()) {
    o.sugawara_prefactor = Parameter::parse(a.fault_prefactor).as<R>();
    log("fault injection: Sugawara prefactor " + a.fault_prefactor);
  }
  auto rep = verify_algebra(make_arena<S>(r), o);
  for (const auto& w : rep.warnings) log("warning: " + w);
  json j = base_report(r, "verify-algebra");
  if (!a.fault_prefactor.empty()) j["fault_prefactor"] = a.fault_prefactor;
  j["report"] = rep.to_json();
  emit_json(r, j);
  return rep.ok() ? kPass : kIdentity;
}

template <class S>
int verify_decay_cmd(const Resolved& r, const CommandArgs& a) {
  using R = Real<S>;
  const R alpha = r.alpha.as<R>();
  auto arena = make_arena<S>(r);
  ChargedField<S> field(alpha, arena);
  if (!arena.trunc.window.contains(0) || !arena.trunc.window.contains(field.charge_steps()))
    throw UsageError("charge window must contain sectors 0 and alpha/alpha0");
  json table = json::array();
  bool exact_ok = true;
  const int top = std::min(r.cfg.level_cutoff, 30);
  for (int n = 0; n <= top; ++n) {
    const R computed = norm_sq(field.apply(n, sector_vacuum<S>(0)));
    const R closed = vacuum_mode_norm_sq(alpha, n);
    const bool eq = ScalarTraits<S>::is_zero(ScalarTraits<S>::from_real(R(computed - closed)), r.tolerance);
    exact_ok = exact_ok && eq;
    table.push_back(
        {{"n", n}, {"computed", detail::real_string(computed)}, {"closed_form", detail::real_string(closed)}, {"equal", eq}});
  }
  if (a.n_max < 24) throw UsageError("n_max must be at least 24");
  const double ad = r.alpha.approx();
  const double d = ad * ad / 2.0;
  auto values = vacuum_mode_norm_table(ad, a.n_max);
  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= a.n_max; ++n) pts.emplace_back(n, values[static_cast<size_t>(n)]);
  const double lo = a.n_max / 8.0;
  const double slope = loglog_slope(pts, lo, a.n_max);
  const double expected = 2.0 * d - 1.0;
  json j = base_report(r, "verify-decay");
  j["d"] = r.alpha.is_exact() ? rational_string(mpq_class(r.alpha.exact() * r.alpha.exact() / 2)) : shortest_decimal(d);
  j["table"] = table;
  j["table_exact"] = exact_ok;
  j["slope_window"] = {shortest_decimal(lo), a.n_max};
  j["slope"] = shortest_decimal(slope);
  j["expected_slope"] = shortest_decimal(expected);
  j["slope_within_0.05"] = std::abs(slope - expected) <= 0.05;
  emit_json(r, j);
  if (!exact_ok) return kIdentity;
  return std::abs(slope - expected) <= 0.05 ? kPass : kBudget;
}

int converge_cmd(const Resolved& r, const CommandArgs& a) {
  require_convergent(r, "converge");
  const auto ms = parse_int_list(a.m_list);
  if (ms.empty()) throw UsageError("m_list is empty");
  if (a.bands < 1) throw UsageError("bands must be positive");
  Output out(r.cfg.output);
  for (int m : ms) {
    if (ms.size() > 1) out.os() << "# m=" << m << "\n";
    if (r.alpha.is_exact()) {
      write_convergence_csv(out.os(), vacuum_band_norms(r.alpha.exact(), m, a.bands));
    } else {
      write_convergence_csv(out.os(), vacuum_band_norms(r.alpha.approx(), m, a.bands));
    }
    auto bands = vacuum_band_norms(r.alpha.approx(), m, a.bands);
    std::vector<std::pair<double, double>> pts;
    for (size_t n = 1; n < bands.size(); ++n)
      if (bands[n] > 0) pts.emplace_back(static_cast<double>(n), bands[n]);
    if (pts.size() >= 3) log("m=" + std::to_string(m) + " band slope " + shortest_decimal(loglog_slope(pts)));
  }
  return kPass;
}

int diverge_demo_cmd(const Resolved& r, const CommandArgs& a) {
  log("diverge-demo runs in float mode at alpha = 1/sqrt(2)");
  const double alpha = 1.0 / std::sqrt(2.0);
  const int n_max = std::max(a.n_max, 8);
  auto s = partial_sum_norm_series(alpha, 0, 2 * n_max);
  const double limit = std::log(2.0) / M_PI;
  Output out(r.cfg.output);
  out.os() << "N,partial_sum,partial_sum_2N,difference,difference_over_log2_over_pi\n";
  for (int N = 4; N <= n_max; N *= 2) {
    const double sn = s[static_cast<size_t>(N - 1)];
    const double s2n = s[static_cast<size_t>(2 * N - 1)];
    out.os() << N << "," << shortest_decimal(sn) << "," << shortest_decimal(s2n) << "," << shortest_decimal(s2n - sn)
             << "," << shortest_decimal((s2n - sn) / limit) << "\n";
  }
  return kPass;
}

template <class S>
int verify_commutativity_cmd(const Resolved& r, const CommandArgs& a) {
  using R = Real<S>;
  require_convergent(r, "verify-commutativity");
  std::vector<int> cutoffs;
  if (a.cutoffs.empty()) {
    for (int L : {r.cfg.level_cutoff - 4, r.cfg.level_cutoff - 2, r.cfg.level_cutoff})
      if (L >= 0 && (cutoffs.empty() || cutoffs.back() != L)) cutoffs.push_back(L);
  } else {
    cutoffs = parse_int_list(a.cutoffs);
  }
  if (cutoffs.empty()) throw UsageError("no cutoffs");
  const int range = r.cfg.mode_range < 0 ? 2 : r.cfg.mode_range;
  CommutativitySummary sum;
  auto rep = verify_commutativity<S>(r.alpha.as<R>(), make_arena<S>(r), cutoffs, range, r.cfg.buffer, r.cfg.samples,
                                     r.cfg.seed, &sum);
  json j = base_report(r, "verify-commutativity");
  j["cutoffs"] = cutoffs;
  j["mode_range"] = range;
  j["report"] = rep;
  emit_json(r, j);
  if (!sum.vacuum_exact) return kIdentity;
  return sum.within_budget ? kPass : kBudget;
}

template <class S>
int relations_cmd(const Resolved& r, Family family, const std::string& command) {
  using R = Real<S>;
  if (family != Family::d_half) require_convergent(r, command);
  SweepParams<S> p{r.lambda.as<R>(), r.alpha.as<R>(), make_arena<S>(r), r.cfg.buffer,
                   r.cfg.mode_range < 0 ? (family == Family::lorentz ? 1 : 2) : r.cfg.mode_range, r.cfg.samples,
                   r.cfg.seed};
  json j = base_report(r, command);
  int code = kPass;
  if (family == Family::d_half) {
    auto out = explore_d_half(p);
    for (const auto& row : out["rows"])
      if (row["verdict"] == "identity_failure") code = kIdentity;
    j["report"] = out;
  } else {
    auto rep = family == Family::lorentz ? verify_lorentz(p) : verify_virasoro_c0(p);
    for (const auto& w : rep.warnings) log("warning: " + w);
    json rows = json::array();
    for (const auto& row : rep.rows) rows.push_back(row.to_json());
    j["buffer"] = p.buffer;
    j["mode_range"] = family == Family::lorentz ? 1 : p.mode_range;
    j["samples"] = p.samples;
    j["rows"] = rows;
    if (!rep.extra.empty()) j["extra"] = rep.extra;
    j["warnings"] = rep.warnings;
    j["identity_ok"] = rep.identity_ok();
    j["budget_ok"] = rep.budget_ok();
    j["all_exact"] = rep.all_exact();
    if (!rep.identity_ok())
      code = kIdentity;
    else if (!rep.budget_ok())
      code = kBudget;
  }
  emit_json(r, j);
  return code;
}

template <class S>
int export_block_cmd(const Resolved& r, const CommandArgs& a) {
  using R = Real<S>;
  auto arena = make_arena<S>(r);
  ChargedField<S> field(r.alpha.as<R>(), arena);
  Output out(r.cfg.output);
  write_mode_block_csv(out.os(), field, a.delta, r.cfg.level_cutoff);
  return kPass;
}

template <class S>
int dump_state_cmd(const Resolved& r, const CommandArgs& a) {
  using R = Real<S>;
  auto arena = make_arena<S>(r);
  Output out(r.cfg.output);
  if (a.state == "vacuum") {
    dump_state(out.os(), tensor_vacuum<S>(0));
  } else if (a.state == "y") {
    ChargedField<S> field(r.alpha.as<R>(), arena);
    dump_state(out.os(), field.apply(a.mode, sector_vacuum<S>(0)));
  } else if (a.state == "psi") {
    TimeZeroField<S> field(r.alpha.as<R>(), arena);
    dump_state(out.os(), field.apply(a.mode, 0, tensor_vacuum<S>(0)).state);
  } else {
    throw UsageError("state must be vacuum, y or psi");
  }
  return kPass;
}

template <class S>
int dispatch(const std::string& cmd, const Resolved& r, const CommandArgs& a) {
  if (cmd == "verify-algebra") return verify_algebra_cmd<S>(r, a);
  if (cmd == "verify-decay") return verify_decay_cmd<S>(r, a);
  if (cmd == "verify-commutativity") return verify_commutativity_cmd<S>(r, a);
  if (cmd == "verify-lorentz") return relations_cmd<S>(r, Family::lorentz, cmd);
  if (cmd == "verify-virasoro-c0") return relations_cmd<S>(r, Family::virasoro_c0, cmd);
  if (cmd == "explore-d-half") return relations_cmd<S>(r, Family::d_half, cmd);
  if (cmd == "export-block") return export_block_cmd<S>(r, a);
  if (cmd == "dump-state") return dump_state_cmd<S>(r, a);
  throw UsageError("unknown subcommand " + cmd);
}

int run(const std::string& cmd, RunConfig cfg, const CommandArgs& a) {
  if (cmd == "verify-virasoro-c0" && cfg.arithmetic == "exact-rational") {
    log("verify-virasoro-c0 has imaginary coefficients; using exact-gaussian");
    cfg.arithmetic = "exact-gaussian";
  }
  if (cmd == "diverge-demo") {
    cfg.arithmetic = "float";
    Resolved r;
    r.cfg = cfg;
    return diverge_demo_cmd(r, a);
  }
  const Resolved r = resolve(cfg);
  if (cmd == "converge") return converge_cmd(r, a);
  switch (r.arithmetic) {
    case Arithmetic::exact_rational: return dispatch<mpq_class>(cmd, r, a);
    case Arithmetic::exact_gaussian: return dispatch<GaussianRational>(cmd, r, a);
    case Arithmetic::floating: return dispatch<FloatComplex>(cmd, r, a);
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification runs on truncated charged Fock spaces"};
  app.set_config("--config", "", "flat key=value file; flags of the same name override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1, 1);

  RunConfig cfg;
  app.add_option("--alpha0", cfg.alpha0, "charge quantum, p/q or decimal")->capture_default_str();
  app.add_option("--alpha_multiplier", cfg.alpha_multiplier, "alpha = multiplier * alpha0")->capture_default_str();
  app.add_option("--level_cutoff", cfg.level_cutoff, "chiral level cutoff L")->capture_default_str();
  app.add_option("--charge_window", cfg.charge_window, "sector window lo,hi")
      ->expected(2)
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "perturbation strength")->capture_default_str();
  app.add_option("--arithmetic", cfg.arithmetic, "exact-rational, exact-gaussian or float")->capture_default_str();
  app.add_option("--tolerance", cfg.tolerance, "comparison tolerance (default 0 exact, 1e-10 float)");
  app.add_option("--seed", cfg.seed, "seed for sampled test pairs")->capture_default_str();
  app.add_option("--output", cfg.output, "report path (default stdout)");
  app.add_option("--buffer", cfg.buffer, "interior buffer for test vectors")->capture_default_str();
  app.add_option("--mode_range", cfg.mode_range, "largest |m| swept");
  app.add_option("--samples", cfg.samples, "sampled pairs per mode cell")->capture_default_str();

  CommandArgs a;
  auto* alg = app.add_subcommand("verify-algebra", "current, Virasoro, covariance and oracle suites");
  alg->add_option("--fault_prefactor", a.fault_prefactor, "replace the Sugawara 1/2 (harness self-test)");
  alg->add_option("--max_level", a.max_level, "cap on test-vector levels");
  auto* dec = app.add_subcommand("verify-decay", "vacuum mode norms against the closed form");
  dec->add_option("--n_max", a.n_max, "last n of the slope fit")->capture_default_str();
  auto* conv = app.add_subcommand("converge", "band norms and partial sums of the time-zero modes (CSV)");
  conv->add_option("--m_list", a.m_list, "comma separated modes")->capture_default_str();
  conv->add_option("--bands", a.bands, "number of bands")->capture_default_str();
  auto* div = app.add_subcommand("diverge-demo", "partial sums at alpha = 1/sqrt(2) in float mode (CSV)");
  div->add_option("--n_max", a.n_max, "largest N")->capture_default_str();
  auto* com = app.add_subcommand("verify-commutativity", "weak commutators of the symmetrized modes");
  com->add_option("--cutoffs", a.cutoffs, "comma separated cutoffs (default L-4,L-2,L)");
  app.add_subcommand("verify-lorentz", "weak Lorentz relations of the perturbed generators");
  app.add_subcommand("verify-virasoro-c0", "weak c = 0 Virasoro relations");
  app.add_subcommand("explore-d-half", "coefficient table and rows for the d = 1/2 family");
  auto* blk = app.add_subcommand("export-block", "truncated mode block as CSV");
  blk->add_option("--delta", a.delta, "level shift")->capture_default_str();
  auto* dump = app.add_subcommand("dump-state", "JSON lines of a state");
  dump->add_option("--state", a.state, "vacuum, y or psi")->capture_default_str();
  dump->add_option("--mode", a.mode, "mode of y or psi")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    const int code = run(cmd, cfg, a);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    log(cmd + " finished in " + std::to_string(ms.count()) + " ms, exit " + std::to_string(code));
    return code;
  } catch (const UsageError& e) {
    log(std::string("usage: ") + e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    log(std::string("usage: ") + e.what());
    return kUsage;
  } catch (const std::domain_error& e) {
    log(std::string("usage: ") + e.what());
    return kUsage;
  }
}
