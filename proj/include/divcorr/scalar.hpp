#pragma once

// Scalar types shared by every table and sum: complex doubles for float mode,
// GMP rationals for exact mode. Mode is a property of the type, so a table or
// accumulator never mixes the two.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <regex>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "divcorr/error.hpp"

namespace divcorr {

using Complex = std::complex<double>;
using Rational = mpq_class;

enum class Mode { Float, Exact };

template <class S>
concept Scalar = std::is_same_v<S, Complex> || std::is_same_v<S, Rational>;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

template <Scalar S>
constexpr Mode mode_of() {
  return is_exact_v<S> ? Mode::Exact : Mode::Float;
}

inline std::string mode_name(Mode m) { return m == Mode::Exact ? "exact" : "float"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::Exact;
  if (s == "float") return Mode::Float;
  throw DomainError("unknown mode '" + s + "' (expected float or exact)");
}

template <Scalar S>
S from_int(std::int64_t v) {
  if constexpr (is_exact_v<S>) {
    Rational r;
    mpz_set_si(r.get_num_mpz_t(), static_cast<long>(v));
    return r;
  } else {
    return Complex(static_cast<double>(v), 0.0);
  }
}

template <Scalar S>
S from_rational(const Rational& q) {
  if constexpr (is_exact_v<S>) {
    return q;
  } else {
    return Complex(q.get_d(), 0.0);
  }
}

inline Complex to_complex(const Complex& c) { return c; }
inline Complex to_complex(const Rational& q) { return {q.get_d(), 0.0}; }

inline double magnitude(const Complex& c) { return std::abs(c); }
inline double magnitude(const Rational& q) { return Rational(abs(q)).get_d(); }

inline bool is_zero(const Complex& c) { return c.real() == 0.0 && c.imag() == 0.0; }
inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

inline std::string to_string(const Rational& q) { return q.get_str(); }

// acc += a * b. The scratch argument lets GMP reuse limb storage in hot loops.
inline void multiply_add(Complex& acc, const Complex& a, const Complex& b, Complex&) {
  acc += a * b;
}
inline void multiply_add(Rational& acc, const Rational& a, const Rational& b, Rational& scratch) {
  mpq_mul(scratch.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
  mpq_add(acc.get_mpq_t(), acc.get_mpq_t(), scratch.get_mpq_t());
}

// Neumaier summation on each component; plain addition for rationals.
template <Scalar S>
class CompensatedSum {
 public:
  void add(const S& v) {
    if constexpr (is_exact_v<S>) {
      sum_ += v;
    } else {
      add_component(re_, re_c_, v.real());
      add_component(im_, im_c_, v.imag());
    }
  }

  S value() const {
    if constexpr (is_exact_v<S>) {
      return sum_;
    } else {
      return Complex(re_ + re_c_, im_ + im_c_);
    }
  }

 private:
  static void add_component(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  S sum_{};
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

// Order parameter z of tau_z: either an exact rational or a finite complex number.
class ZParam {
 public:
  ZParam() : value_(Rational(1)) {}

  static ZParam rational(Rational q) {
    q.canonicalize();
    return ZParam(std::move(q));
  }
  static ZParam rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw DomainError("ZParam: zero denominator");
    Rational q = from_int<Rational>(num) / from_int<Rational>(den);
    return rational(std::move(q));
  }
  static ZParam complex(double re, double im = 0.0) {
    if (!std::isfinite(re) || !std::isfinite(im)) throw DomainError("ZParam: non-finite complex value");
    return ZParam(Complex(re, im));
  }

  // Grammar: integer "k", rational "u/v" or "-u/v", decimal "a", complex "a+bi" / "a-bi" / "bi".
  static ZParam parse(const std::string& text) {
    static const std::regex rational_re(R"(^\s*([+-]?\d+)(?:/(\d+))?\s*$)");
    static const std::regex real_re(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*$)");
    static const std::regex complex_re(
        R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*i\s*$)");
    static const std::regex imag_re(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*i\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, rational_re)) {
      Rational q;
      q.get_num() = mpz_class(m[1].str());
      q.get_den() = m[2].matched ? mpz_class(m[2].str()) : mpz_class(1);
      if (q.get_den() == 0) throw DomainError("malformed z '" + text + "': zero denominator");
      return rational(std::move(q));
    }
    if (std::regex_match(text, m, real_re)) return complex(std::stod(m[1].str()), 0.0);
    if (std::regex_match(text, m, complex_re)) {
      const double re = std::stod(m[1].str());
      double im = m[3].matched ? std::stod(m[3].str()) : 1.0;
      if (m[2].str() == "-") im = -im;
      return complex(re, im);
    }
    if (std::regex_match(text, m, imag_re)) {
      const std::string s = m[1].matched ? m[1].str() : "1";
      const double im = (s == "+" || s == "-") ? (s == "-" ? -1.0 : 1.0) : std::stod(s);
      return complex(0.0, im);
    }
    throw DomainError("malformed z '" + text + "' (expected u/v or a+bi)");
  }

  bool is_rational() const { return std::holds_alternative<Rational>(value_); }
  const Rational& as_rational() const {
    if (!is_rational()) throw ModeError("ZParam " + str() + " has no exact rational value");
    return std::get<Rational>(value_);
  }
  Complex as_complex() const {
    if (is_rational()) return to_complex(std::get<Rational>(value_));
    return std::get<Complex>(value_);
  }

  template <Scalar S>
  S as() const {
    if constexpr (is_exact_v<S>) {
      return as_rational();
    } else {
      return as_complex();
    }
  }

  std::string str() const {
    if (is_rational()) return std::get<Rational>(value_).get_str();
    const Complex c = std::get<Complex>(value_);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", c.real(), c.imag());
    return buf;
  }

  friend bool operator==(const ZParam& a, const ZParam& b) { return a.value_ == b.value_; }

 private:
  explicit ZParam(std::variant<Complex, Rational> v) : value_(std::move(v)) {}
  std::variant<Complex, Rational> value_;
};

// z (z-1) ... (z-ell+1) / ell!
template <Scalar S>
S binomial_z(const S& z, unsigned ell) {
  S result = from_int<S>(1);
  for (unsigned k = 0; k < ell; ++k) {
    result *= (z - from_int<S>(k));
    result /= from_int<S>(k + 1);
  }
  return result;
}

// tau_z(p^ell) = binom(z + ell - 1, ell) for ell = 0..nu_max, via the ratio (z + ell - 1) / ell.
template <Scalar S>
std::vector<S> tau_z_prime_power_series(const S& z, unsigned nu_max) {
  std::vector<S> out(nu_max + 1);
  out[0] = from_int<S>(1);
  for (unsigned ell = 1; ell <= nu_max; ++ell) {
    out[ell] = out[ell - 1] * (z + from_int<S>(static_cast<std::int64_t>(ell) - 1));
    out[ell] /= from_int<S>(ell);
  }
  return out;
}

template <Scalar S>
S tau_z_prime_power(const S& z, unsigned ell) {
  return tau_z_prime_power_series(z, ell)[ell];
}

template <Scalar S>
S tau_z_prime_power(const ZParam& z, unsigned ell) {
  return tau_z_prime_power(z.as<S>(), ell);
}

}  // namespace divcorr
