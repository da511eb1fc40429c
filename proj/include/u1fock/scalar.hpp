#ifndef U1FOCK_SCALAR_HPP
#define U1FOCK_SCALAR_HPP

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace u1fock {

/// Exact complex number a + b i with rational a, b.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(mpq_class re) : re_(std::move(re)) {}  // NOLINT(implicit)
  GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}
  GaussianRational(long n) : re_(n) {}  // NOLINT(implicit)

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  static GaussianRational i() { return {mpq_class(0), mpq_class(1)}; }

  GaussianRational conj() const { return {re_, -im_}; }
  mpq_class norm_sq() const { return re_ * re_ + im_ * im_; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    mpq_class den = o.norm_sq();
    if (sgn(den) == 0) throw std::domain_error("GaussianRational: division by zero");
    *this *= o.conj();
    re_ /= den;
    im_ /= den;
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
    return os << z.re_ << (sgn(z.im_) < 0 ? "-" : "+") << abs(z.im_) << "i";
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

using FloatComplex = std::complex<double>;

/// Canonical "p/q" rendering; the denominator is always written.
inline std::string rational_string(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Shortest decimal that round-trips to the same double.
inline std::string shortest_decimal(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Decimal rendering of an exact rational with `digits` significant digits.
inline std::string decimal_string(const mpq_class& q, int digits = 30) {
  mpf_class f(q, 4 * static_cast<mp_bitcnt_t>(digits) + 64);
  mp_exp_t exp = 0;
  std::string mant = f.get_str(exp, 10, static_cast<size_t>(digits));
  if (mant.empty()) return "0";
  bool neg = mant[0] == '-';
  if (neg) mant.erase(0, 1);
  if (mant.size() < static_cast<size_t>(digits)) mant.append(static_cast<size_t>(digits) - mant.size(), '0');
  std::string out = neg ? "-" : "";
  out += mant.substr(0, 1) + ".";
  out += mant.size() > 1 ? mant.substr(1) : "0";
  out += "e" + std::to_string(exp - 1);
  return out;
}

/// Per-type arithmetic vocabulary used by every algorithm in the library.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<mpq_class> {
  using real_type = mpq_class;
  static constexpr bool exact = true;
  static constexpr bool has_imaginary_unit = false;
  static constexpr const char* name = "exact-rational";

  static mpq_class from_real(const real_type& r) { return r; }
  static mpq_class imaginary_unit() {
    throw std::domain_error("exact-rational arithmetic has no imaginary unit; use exact-gaussian");
  }
  static mpq_class conj(const mpq_class& x) { return x; }
  static real_type abs_sq(const mpq_class& x) { return x * x; }
  static bool is_zero(const mpq_class& x, double /*tol*/) { return sgn(x) == 0; }
  static bool is_structural_zero(const mpq_class& x) { return sgn(x) == 0; }
  static double re_double(const mpq_class& x) { return x.get_d(); }
  static double im_double(const mpq_class&) { return 0.0; }
  static std::string re_string(const mpq_class& x) { return rational_string(x); }
  static std::string im_string(const mpq_class&) { return "0/1"; }
};

template <>
struct ScalarTraits<GaussianRational> {
  using real_type = mpq_class;
  static constexpr bool exact = true;
  static constexpr bool has_imaginary_unit = true;
  static constexpr const char* name = "exact-gaussian";

  static GaussianRational from_real(const real_type& r) { return GaussianRational(r); }
  static GaussianRational imaginary_unit() { return GaussianRational::i(); }
  static GaussianRational conj(const GaussianRational& x) { return x.conj(); }
  static real_type abs_sq(const GaussianRational& x) { return x.norm_sq(); }
  static bool is_zero(const GaussianRational& x, double /*tol*/) {
    return sgn(x.re()) == 0 && sgn(x.im()) == 0;
  }
  static bool is_structural_zero(const GaussianRational& x) { return is_zero(x, 0.0); }
  static double re_double(const GaussianRational& x) { return x.re().get_d(); }
  static double im_double(const GaussianRational& x) { return x.im().get_d(); }
  static std::string re_string(const GaussianRational& x) { return rational_string(x.re()); }
  static std::string im_string(const GaussianRational& x) { return rational_string(x.im()); }
};

template <>
struct ScalarTraits<FloatComplex> {
  using real_type = double;
  static constexpr bool exact = false;
  static constexpr bool has_imaginary_unit = true;
  static constexpr const char* name = "float";

  static FloatComplex from_real(double r) { return {r, 0.0}; }
  static FloatComplex imaginary_unit() { return {0.0, 1.0}; }
  static FloatComplex conj(const FloatComplex& x) { return std::conj(x); }
  static double abs_sq(const FloatComplex& x) { return std::norm(x); }
  static bool is_zero(const FloatComplex& x, double tol) { return std::abs(x) <= tol; }
  static bool is_structural_zero(const FloatComplex& x) { return x == FloatComplex{}; }
  static double re_double(const FloatComplex& x) { return x.real(); }
  static double im_double(const FloatComplex& x) { return x.imag(); }
  static std::string re_string(const FloatComplex& x) { return shortest_decimal(x.real()); }
  static std::string im_string(const FloatComplex& x) { return shortest_decimal(x.imag()); }
};

template <class S>
using Real = typename ScalarTraits<S>::real_type;

inline double to_double(const mpq_class& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// Conversions of an exact rational parameter into a real_type.
template <class R>
R real_from_rational(const mpq_class& q);
template <>
inline mpq_class real_from_rational<mpq_class>(const mpq_class& q) { return q; }
template <>
inline double real_from_rational<double>(const mpq_class& q) { return q.get_d(); }

/// p/q as a real_type.
template <class R>
R rational(long p, long q = 1) {
  mpq_class v(p, q);
  v.canonicalize();
  return real_from_rational<R>(v);
}

/// Integer power of a real; exponent must be nonnegative.
template <class R>
R real_pow(const R& base, unsigned exponent) {
  R out(1);
  for (unsigned i = 0; i < exponent; ++i) out *= base;
  return out;
}

enum class Arithmetic { exact_rational, exact_gaussian, floating };

inline std::string_view arithmetic_name(Arithmetic a) {
  switch (a) {
    case Arithmetic::exact_rational: return "exact-rational";
    case Arithmetic::exact_gaussian: return "exact-gaussian";
    case Arithmetic::floating: return "float";
  }
  return "?";
}

inline Arithmetic parse_arithmetic(std::string_view s) {
  if (s == "exact-rational") return Arithmetic::exact_rational;
  if (s == "exact-gaussian") return Arithmetic::exact_gaussian;
  if (s == "float") return Arithmetic::floating;
  throw std::invalid_argument("unknown arithmetic mode '" + std::string(s) + "'");
}

/// A user-supplied real parameter. Exact when written as "p/q" or a finite
/// decimal; irrational forms such as "1/sqrt(2)" only carry a double.
class Parameter {
 public:
  Parameter() : value_(mpq_class(0)) {}
  explicit Parameter(mpq_class q) : value_(std::move(q)) { value_ = canonical(std::get<mpq_class>(value_)); }
  explicit Parameter(double x) : value_(x) {}

  static Parameter parse(std::string_view text);

  bool is_exact() const { return std::holds_alternative<mpq_class>(value_); }
  const mpq_class& exact() const {
    if (!is_exact()) throw std::domain_error("parameter is irrational and has no exact value");
    return std::get<mpq_class>(value_);
  }
  double approx() const {
    return is_exact() ? std::get<mpq_class>(value_).get_d() : std::get<double>(value_);
  }

  template <class R>
  R as() const {
    if constexpr (std::is_same_v<R, double>) {
      return approx();
    } else {
      return exact();
    }
  }

  Parameter operator*(long k) const {
    if (is_exact()) return Parameter(mpq_class(exact() * k));
    return Parameter(approx() * static_cast<double>(k));
  }

  std::string to_string() const {
    return is_exact() ? rational_string(exact()) : shortest_decimal(approx());
  }

 private:
  static mpq_class canonical(mpq_class q) {
    q.canonicalize();
    return q;
  }
  std::variant<mpq_class, double> value_;
};

namespace detail {

inline std::optional<mpq_class> parse_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool neg = false;
  size_t pos = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    pos = 1;
  }
  std::string digits;
  long exponent = 0;
  bool seen_dot = false;
  bool any = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits += c;
      any = true;
      if (seen_dot) --exponent;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && any) {
      long e = 0;
      auto tail = s.substr(pos + 1);
      if (tail.starts_with('+')) tail.remove_prefix(1);
      auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), e);
      if (ec != std::errc{} || p != tail.data() + tail.size()) return std::nullopt;
      exponent += e;
      pos = s.size();
      break;
    } else {
      return std::nullopt;
    }
  }
  if (!any) return std::nullopt;
  mpz_class num(digits, 10);
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  mpq_class q = exponent < 0 ? mpq_class(num, ten_pow) : mpq_class(num * ten_pow);
  q.canonicalize();
  return neg ? mpq_class(-q) : q;
}

inline std::optional<mpq_class> parse_exact(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s);
  auto num = parse_decimal(s.substr(0, slash));
  auto den = parse_decimal(s.substr(slash + 1));
  if (!num || !den || sgn(*den) == 0) return std::nullopt;
  mpq_class q = *num / *den;
  q.canonicalize();
  return q;
}

// sqrt(x) with x exact; returns the double value.
inline std::optional<double> parse_sqrt(std::string_view s) {
  if (!s.starts_with("sqrt(") || !s.ends_with(")")) return std::nullopt;
  auto inner = parse_exact(s.substr(5, s.size() - 6));
  if (!inner || sgn(*inner) < 0) return std::nullopt;
  return std::sqrt(inner->get_d());
}

}  // namespace detail

inline Parameter Parameter::parse(std::string_view text) {
  if (auto q = detail::parse_exact(text)) return Parameter(*q);
  if (auto r = detail::parse_sqrt(text)) return Parameter(*r);
  // p/sqrt(q)
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = detail::parse_exact(text.substr(0, slash));
    auto den = detail::parse_sqrt(text.substr(slash + 1));
    if (num && den && *den != 0.0) return Parameter(num->get_d() / *den);
  }
  throw std::invalid_argument("cannot parse real parameter '" + std::string(text) + "'");
}

/// Run-wide arithmetic selection.
struct ArithmeticContext {
  Arithmetic mode = Arithmetic::exact_rational;
  double tolerance = 0.0;
};

/// Validates a mode choice against the run's parameters. Exact modes demand
/// zero tolerance and exact parameters; float mode demands a positive one.
inline ArithmeticContext scalar_mode_select(Arithmetic mode, double tolerance,
                                            std::initializer_list<Parameter> params = {}) {
  if (tolerance < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
  if (mode == Arithmetic::floating) {
    if (tolerance == 0.0) throw std::invalid_argument("float mode requires a positive tolerance");
    return {mode, tolerance};
  }
  if (tolerance != 0.0) throw std::invalid_argument("exact modes take tolerance 0");
  for (const auto& p : params) {
    if (!p.is_exact()) {
      throw std::invalid_argument("parameter " + p.to_string() +
                                  " is irrational; exact arithmetic is unavailable, use float mode");
    }
  }
  return {mode, 0.0};
}

}  // namespace u1fock

#endif  // U1FOCK_SCALAR_HPP
