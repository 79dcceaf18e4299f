#pragma once

// Flat binary and CSV forms of value tables.
//
// Binary layout (little-endian host order):
//   "DVCT" | u32 version | u64 digest | u64 limit | u8 mode | payload
// Float payload is (re, im) doubles for n = 1..limit. Exact payload is, per n,
// a u32 length and the base-62 text of the numerator, then the same for the
// denominator. The digest is FNV-1a over describe() of the spec.

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "divcorr/error.hpp"
#include "divcorr/multiplicative.hpp"
#include "divcorr/scalar.hpp"

namespace divcorr {

inline constexpr std::uint32_t table_format_version = 1;

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t spec_digest(const FunctionSpec& f) { return fnv1a(f.describe()); }

namespace detail {

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw DomainError("table file truncated");
  return v;
}

inline void put_mpz(std::ostream& os, const mpz_class& z) {
  const std::string s = z.get_str(62);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline mpz_class get_mpz(std::istream& is) {
  const auto len = get<std::uint32_t>(is);
  if (len == 0 || len > (1u << 24)) throw DomainError("table file: bad integer length");
  std::string s(len, '\0');
  if (!is.read(s.data(), len)) throw DomainError("table file truncated");
  mpz_class z;
  if (z.set_str(s, 62) != 0) throw DomainError("table file: bad integer");
  return z;
}

}  // namespace detail

template <Scalar S>
void write_table_binary(std::ostream& os, const ValueTable<S>& t) {
  os.write("DVCT", 4);
  detail::put<std::uint32_t>(os, table_format_version);
  detail::put<std::uint64_t>(os, spec_digest(t.spec));
  detail::put<std::uint64_t>(os, t.limit);
  detail::put<std::uint8_t>(os, t.mode == Mode::Exact ? 1 : 0);
  for (std::uint64_t n = 1; n <= t.limit; ++n) {
    if constexpr (is_exact_v<S>) {
      detail::put_mpz(os, t.values[n].get_num());
      detail::put_mpz(os, t.values[n].get_den());
    } else {
      detail::put<double>(os, t.values[n].real());
      detail::put<double>(os, t.values[n].imag());
    }
  }
  if (!os) throw ResourceError("table write failed", t.limit);
}

// Reads a table written for spec f; the digest and mode must match.
template <Scalar S>
ValueTable<S> read_table_binary(std::istream& is, const FunctionSpec& f) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "DVCT", 4) != 0) throw DomainError("not a divcorr table");
  if (detail::get<std::uint32_t>(is) != table_format_version) throw DomainError("unsupported table version");
  if (detail::get<std::uint64_t>(is) != spec_digest(f)) {
    throw DomainError("table digest does not match " + f.describe());
  }
  const auto limit = detail::get<std::uint64_t>(is);
  const auto mode = detail::get<std::uint8_t>(is);
  if (mode != (is_exact_v<S> ? 1 : 0)) throw ModeError("table mode does not match the requested scalar type");
  ValueTable<S> t{f, limit, detail::allocate_values<S>(limit)};
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if constexpr (is_exact_v<S>) {
      mpz_class num = detail::get_mpz(is);
      mpz_class den = detail::get_mpz(is);
      if (den <= 0) throw DomainError("table file: nonpositive denominator");
      t.values[n] = Rational(num, den);
      t.values[n].canonicalize();
    } else {
      const double re = detail::get<double>(is);
      const double im = detail::get<double>(is);
      t.values[n] = Complex(re, im);
    }
  }
  return t;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV rows "n,re,im" (float) or "n,num,den" (exact).
template <Scalar S>
void write_table_csv(std::ostream& os, const ValueTable<S>& t) {
  os << (is_exact_v<S> ? "n,num,den\n" : "n,re,im\n");
  for (std::uint64_t n = 1; n <= t.limit; ++n) {
    if constexpr (is_exact_v<S>) {
      os << n << ',' << t.values[n].get_num().get_str() << ',' << t.values[n].get_den().get_str() << '\n';
    } else {
      os << n << ',' << format_double(t.values[n].real()) << ',' << format_double(t.values[n].imag()) << '\n';
    }
  }
}

}  // namespace divcorr
