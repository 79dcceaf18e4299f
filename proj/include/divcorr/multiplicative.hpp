#pragma once

// Declarative multiplicative functions, their prime-power values, and sieving
// into value tables. The z-fold convolution f^(*z) is defined at prime powers
// by a binomial composition sum and evaluated by dynamic programming.

#include <cstdint>
#include <memory>
#include <new>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "divcorr/arith.hpp"
#include "divcorr/characters.hpp"
#include "divcorr/error.hpp"
#include "divcorr/parallel.hpp"
#include "divcorr/scalar.hpp"

namespace divcorr {

struct FunctionSpec;

namespace spec {

// Coefficients of zeta(s)^z.
struct TauZ {
  ZParam z;
};
// Coefficients of L(s, chi)^z.
struct TauZTwisted {
  ZParam z;
  DirichletCharacter chi;
};
// prod over reduced classes r mod D of prod_{p = r} (1 + z_r / (p^s - 1)).
struct ClassOmega {
  std::uint64_t modulus;
  std::vector<ZParam> zvec;  // one entry per reduced residue, increasing order
};
// n -> z^omega(n).
struct ZPowOmega {
  ZParam z;
};
// Indicator of sums of two squares.
struct TwoSquaresIndicator {};
struct Convolve {
  std::vector<FunctionSpec> parts;
};
struct PointwiseCharTwist {
  std::shared_ptr<const FunctionSpec> inner;
  DirichletCharacter chi;
};

}  // namespace spec

struct FunctionSpec {
  using Node = std::variant<spec::TauZ, spec::TauZTwisted, spec::ClassOmega, spec::ZPowOmega,
                            spec::TwoSquaresIndicator, spec::Convolve, spec::PointwiseCharTwist>;
  Node node;

  static FunctionSpec tau_z(ZParam z) { return {spec::TauZ{std::move(z)}}; }
  static FunctionSpec tau_z_twisted(ZParam z, DirichletCharacter chi) {
    return {spec::TauZTwisted{std::move(z), std::move(chi)}};
  }
  static FunctionSpec class_omega(std::uint64_t D, std::vector<ZParam> zvec) {
    if (D == 0) throw DomainError("ClassOmega: modulus must be positive");
    if (zvec.size() != euler_phi(D)) {
      throw DomainError("ClassOmega: expected phi(D) = " + std::to_string(euler_phi(D)) + " class values");
    }
    return {spec::ClassOmega{D, std::move(zvec)}};
  }
  static FunctionSpec zpow_omega(ZParam z) { return {spec::ZPowOmega{std::move(z)}}; }
  static FunctionSpec two_squares() { return {spec::TwoSquaresIndicator{}}; }
  static FunctionSpec convolve(std::vector<FunctionSpec> parts) {
    if (parts.empty()) throw DomainError("Convolve: list must be nonempty");
    return {spec::Convolve{std::move(parts)}};
  }
  static FunctionSpec twist(FunctionSpec inner, DirichletCharacter chi) {
    return {spec::PointwiseCharTwist{std::make_shared<const FunctionSpec>(std::move(inner)), std::move(chi)}};
  }

  std::string describe() const;
  bool all_rational() const;
  // Prime-power values depend on p only through p mod class_modulus().
  std::uint64_t class_modulus() const;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string FunctionSpec::describe() const {
  return std::visit(
      overloaded{
          [](const spec::TauZ& s) { return "tau_z(" + s.z.str() + ")"; },
          [](const spec::TauZTwisted& s) { return "tau_z_chi(" + s.z.str() + ";" + s.chi.label() + ")"; },
          [](const spec::ClassOmega& s) {
            std::string out = "class_omega(" + std::to_string(s.modulus) + ";[";
            for (std::size_t i = 0; i < s.zvec.size(); ++i) out += (i ? "," : "") + s.zvec[i].str();
            return out + "])";
          },
          [](const spec::ZPowOmega& s) { return "zpow_omega(" + s.z.str() + ")"; },
          [](const spec::TwoSquaresIndicator&) { return std::string("two_squares"); },
          [](const spec::Convolve& s) {
            std::string out = "convolve(";
            for (std::size_t i = 0; i < s.parts.size(); ++i) out += (i ? "," : "") + s.parts[i].describe();
            return out + ")";
          },
          [](const spec::PointwiseCharTwist& s) {
            return "twist(" + s.inner->describe() + ";" + s.chi.label() + ")";
          },
      },
      node);
}

inline bool FunctionSpec::all_rational() const {
  return std::visit(overloaded{
                        [](const spec::TauZ& s) { return s.z.is_rational(); },
                        [](const spec::TauZTwisted& s) { return s.z.is_rational(); },
                        [](const spec::ClassOmega& s) {
                          for (const auto& z : s.zvec) {
                            if (!z.is_rational()) return false;
                          }
                          return true;
                        },
                        [](const spec::ZPowOmega& s) { return s.z.is_rational(); },
                        [](const spec::TwoSquaresIndicator&) { return true; },
                        [](const spec::Convolve& s) {
                          for (const auto& p : s.parts) {
                            if (!p.all_rational()) return false;
                          }
                          return true;
                        },
                        [](const spec::PointwiseCharTwist& s) { return s.inner->all_rational(); },
                    },
                    node);
}

inline std::uint64_t FunctionSpec::class_modulus() const {
  return std::visit(overloaded{
                        [](const spec::TauZ&) -> std::uint64_t { return 1; },
                        [](const spec::TauZTwisted& s) { return s.chi.modulus(); },
                        [](const spec::ClassOmega& s) { return s.modulus; },
                        [](const spec::ZPowOmega&) -> std::uint64_t { return 1; },
                        [](const spec::TwoSquaresIndicator&) -> std::uint64_t { return 4; },
                        [](const spec::Convolve& s) {
                          std::uint64_t m = 1;
                          for (const auto& p : s.parts) m = std::lcm(m, p.class_modulus());
                          return m;
                        },
                        [](const spec::PointwiseCharTwist& s) {
                          return std::lcm(s.inner->class_modulus(), s.chi.modulus());
                        },
                    },
                    node);
}

namespace detail {

template <Scalar S>
std::vector<S> char_power_series(const DirichletCharacter& chi, std::uint64_t p, unsigned nu_max) {
  std::vector<S> out(nu_max + 1);
  const S c = char_value<S>(chi, static_cast<std::int64_t>(p));
  out[0] = from_int<S>(1);
  for (unsigned k = 1; k <= nu_max; ++k) out[k] = out[k - 1] * c;
  return out;
}

inline std::size_t reduced_residue_position(std::uint64_t r, std::uint64_t D) {
  std::size_t pos = 0;
  for (std::uint64_t a = 0; a < r; ++a) pos += std::gcd(a, D) == 1 ? 1 : 0;
  return pos;
}

}  // namespace detail

// f(p^k) for k = 0..nu_max.
template <Scalar S>
std::vector<S> prime_power_values(const FunctionSpec& f, std::uint64_t p, unsigned nu_max) {
  return std::visit(
      overloaded{
          [&](const spec::TauZ& s) { return tau_z_prime_power_series(s.z.as<S>(), nu_max); },
          [&](const spec::TauZTwisted& s) {
            auto out = tau_z_prime_power_series(s.z.as<S>(), nu_max);
            const auto chi = detail::char_power_series<S>(s.chi, p, nu_max);
            for (unsigned k = 1; k <= nu_max; ++k) out[k] *= chi[k];
            return out;
          },
          [&](const spec::ClassOmega& s) {
            std::vector<S> out(nu_max + 1, from_int<S>(0));
            out[0] = from_int<S>(1);
            if (std::gcd(p, s.modulus) != 1) return out;
            const S z = s.zvec[detail::reduced_residue_position(p % s.modulus, s.modulus)].as<S>();
            for (unsigned k = 1; k <= nu_max; ++k) out[k] = z;
            return out;
          },
          [&](const spec::ZPowOmega& s) {
            std::vector<S> out(nu_max + 1, s.z.as<S>());
            out[0] = from_int<S>(1);
            return out;
          },
          [&](const spec::TwoSquaresIndicator&) {
            std::vector<S> out(nu_max + 1, from_int<S>(1));
            if (p % 4 == 3) {
              for (unsigned k = 1; k <= nu_max; k += 2) out[k] = from_int<S>(0);
            }
            return out;
          },
          [&](const spec::Convolve& s) {
            std::vector<S> acc(nu_max + 1, from_int<S>(0));
            acc[0] = from_int<S>(1);
            S scratch;
            for (const auto& part : s.parts) {
              const auto b = prime_power_values<S>(part, p, nu_max);
              std::vector<S> next(nu_max + 1, from_int<S>(0));
              for (unsigned i = 0; i <= nu_max; ++i) {
                for (unsigned j = 0; i + j <= nu_max; ++j) multiply_add(next[i + j], acc[i], b[j], scratch);
              }
              acc = std::move(next);
            }
            return acc;
          },
          [&](const spec::PointwiseCharTwist& s) {
            auto out = prime_power_values<S>(*s.inner, p, nu_max);
            const auto chi = detail::char_power_series<S>(s.chi, p, nu_max);
            for (unsigned k = 1; k <= nu_max; ++k) out[k] *= chi[k];
            return out;
          },
      },
      f.node);
}

// f^(*z)(p^nu) for nu = 0..nu_max, given f(p^k) for k = 0..nu_max. Computes
// sum_{1 <= r <= nu} binom(z, r) * (sum over compositions of nu into r parts of
// prod f(p^lambda_i)), where the inner composition sums come from the DP
// W_r[s] = sum_lambda f(p^lambda) W_{r-1}[s - lambda].
template <Scalar S>
std::vector<S> z_fold_series(const std::vector<S>& f, const S& z, unsigned nu_max) {
  if (f.size() < nu_max + 1) throw DomainError("z_fold_series: not enough prime-power values");
  std::vector<S> out(nu_max + 1, from_int<S>(0));
  out[0] = from_int<S>(1);
  std::vector<S> w(nu_max + 1, from_int<S>(0));
  w[0] = from_int<S>(1);
  S binom = from_int<S>(1), scratch;
  for (unsigned r = 1; r <= nu_max; ++r) {
    std::vector<S> next(nu_max + 1, from_int<S>(0));
    for (unsigned s = r; s <= nu_max; ++s) {
      for (unsigned lambda = 1; lambda + (r - 1) <= s; ++lambda) multiply_add(next[s], f[lambda], w[s - lambda], scratch);
    }
    w = std::move(next);
    binom *= (z - from_int<S>(r - 1));
    binom /= from_int<S>(r);
    if (is_zero(binom)) continue;
    for (unsigned s = r; s <= nu_max; ++s) multiply_add(out[s], binom, w[s], scratch);
  }
  return out;
}

template <Scalar S>
S z_fold_convolution_prime_power(const FunctionSpec& f, const S& z, std::uint64_t p, unsigned nu) {
  if (nu == 0) throw DomainError("z_fold_convolution_prime_power: nu must be positive");
  return z_fold_series(prime_power_values<S>(f, p, nu), z, nu)[nu];
}

// Closed form of f^(*z) for the families where it is again a family member.
inline std::optional<FunctionSpec> z_fold_closed_form(const FunctionSpec& f, const ZParam& z) {
  auto times = [](const ZParam& a, const ZParam& b) {
    if (a.is_rational() && b.is_rational()) return ZParam::rational(a.as_rational() * b.as_rational());
    const Complex c = a.as_complex() * b.as_complex();
    return ZParam::complex(c.real(), c.imag());
  };
  if (const auto* s = std::get_if<spec::TauZ>(&f.node)) return FunctionSpec::tau_z(times(s->z, z));
  if (const auto* s = std::get_if<spec::TauZTwisted>(&f.node)) {
    return FunctionSpec::tau_z_twisted(times(s->z, z), s->chi);
  }
  return std::nullopt;
}

template <Scalar S>
struct ValueTable {
  FunctionSpec spec;
  std::uint64_t limit = 0;
  std::vector<S> values;  // values[0] unused

  static constexpr Mode mode = mode_of<S>();

  const S& operator[](std::uint64_t n) const { return values[n]; }
};

using FloatTable = ValueTable<Complex>;
using ExactTable = ValueTable<Rational>;

namespace detail {

template <Scalar S>
std::vector<S> allocate_values(std::uint64_t x) {
  try {
    return std::vector<S>(x + 1, from_int<S>(0));
  } catch (const std::bad_alloc&) {
    throw ResourceError("value table allocation failed", x);
  }
}

// Prime-power series memoized by p mod modulus. Primes sharing a residue with
// the modulus are unique in their class, so the key is always sound.
template <Scalar S, class Gen>
class PrimePowerMemo {
 public:
  PrimePowerMemo(std::uint64_t modulus, std::uint64_t x, Gen gen) : modulus_(modulus), x_(x), gen_(std::move(gen)) {}

  const S& get(std::uint64_t p, unsigned nu) {
    auto& series = memo_[p % modulus_];
    if (series.size() <= nu) {
      unsigned nu_max = 0;
      for (std::uint64_t pk = 1; pk <= x_ / p; pk *= p) ++nu_max;
      series = gen_(p, std::max(nu, nu_max));
    }
    return series[nu];
  }

 private:
  std::uint64_t modulus_, x_;
  Gen gen_;
  std::unordered_map<std::uint64_t, std::vector<S>> memo_;
};

}  // namespace detail

// values[n] = prod over p^nu || n of series(p)[nu], walking n upward and
// splitting off the full power of spf(n).
template <Scalar S, class Gen>
std::vector<S> sieve_from_prime_powers(std::uint64_t x, const FactorTable& table, std::uint64_t modulus, Gen gen) {
  if (x > table.limit()) {
    throw DomainError("sieve limit " + std::to_string(x) + " exceeds factor table limit " +
                      std::to_string(table.limit()));
  }
  auto values = detail::allocate_values<S>(x);
  if (x == 0) return values;
  values[1] = from_int<S>(1);
  std::vector<std::uint32_t> exponent(x + 1, 0), rest(x + 1, 1);
  detail::PrimePowerMemo<S, Gen> memo(modulus, x, std::move(gen));
  for (std::uint64_t n = 2; n <= x; ++n) {
    const std::uint64_t p = table.spf(n), m = n / p;
    if (m % p == 0) {
      exponent[n] = exponent[m] + 1;
      rest[n] = rest[m];
    } else {
      exponent[n] = 1;
      rest[n] = static_cast<std::uint32_t>(m);
    }
    const S& pp = memo.get(p, exponent[n]);
    const S& base = values[rest[n]];
    if (is_zero(pp) || is_zero(base)) continue;
    values[n] = base * pp;
  }
  return values;
}

template <Scalar S>
ValueTable<S> dirichlet_convolve(const ValueTable<S>& a, const ValueTable<S>& b, unsigned threads = 1);

// Value table of a FunctionSpec on [1, x]. Convolve nodes go through
// dirichlet_convolve of their component tables.
template <Scalar S>
ValueTable<S> sieve_multiplicative(const FunctionSpec& f, std::uint64_t x, const FactorTable& table,
                                   unsigned threads = 1) {
  if constexpr (is_exact_v<S>) {
    if (!f.all_rational()) throw ModeError("exact mode requires rational parameters: " + f.describe());
  }
  if (const auto* conv = std::get_if<spec::Convolve>(&f.node)) {
    ValueTable<S> acc = sieve_multiplicative<S>(conv->parts.front(), x, table, threads);
    for (std::size_t i = 1; i < conv->parts.size(); ++i) {
      acc = dirichlet_convolve(acc, sieve_multiplicative<S>(conv->parts[i], x, table, threads), threads);
    }
    acc.spec = f;
    return acc;
  }
  if (const auto* tw = std::get_if<spec::PointwiseCharTwist>(&f.node)) {
    ValueTable<S> inner = sieve_multiplicative<S>(*tw->inner, x, table, threads);
    for (std::uint64_t n = 1; n <= x; ++n) {
      if (!is_zero(inner.values[n])) inner.values[n] *= char_value<S>(tw->chi, static_cast<std::int64_t>(n));
    }
    inner.spec = f;
    return inner;
  }
  auto gen = [&f](std::uint64_t p, unsigned nu_max) { return prime_power_values<S>(f, p, nu_max); };
  return {f, x, sieve_from_prime_powers<S>(x, table, f.class_modulus(), gen)};
}

template <Scalar S>
ValueTable<S> sieve_multiplicative(const FunctionSpec& f, std::uint64_t x, unsigned threads = 1) {
  return sieve_multiplicative<S>(f, x, FactorTable(std::max<std::uint64_t>(x, 2)), threads);
}

// Values of f^(*z) on [1, x], sieved from the z-fold prime-power series.
template <Scalar S>
std::vector<S> z_fold_values(const FunctionSpec& f, const S& z, std::uint64_t x, const FactorTable& table) {
  if constexpr (is_exact_v<S>) {
    if (!f.all_rational()) throw ModeError("exact mode requires rational parameters: " + f.describe());
  }
  auto gen = [&](std::uint64_t p, unsigned nu_max) { return z_fold_series(prime_power_values<S>(f, p, nu_max), z, nu_max); };
  return sieve_from_prime_powers<S>(x, table, f.class_modulus(), gen);
}

// Raw Dirichlet convolution of two arrays over [1, x]. Each output block
// accumulates its entries in increasing-divisor order, so results do not
// depend on the thread count.
template <Scalar S>
std::vector<S> dirichlet_convolve_values(const std::vector<S>& a, const std::vector<S>& b, std::uint64_t x,
                                         unsigned threads = 1) {
  auto c = detail::allocate_values<S>(x);
  constexpr std::uint64_t kBlock = 1 << 15;
  std::vector<std::uint64_t> support_a;
  for (std::uint64_t d = 1; d <= x; ++d) {
    if (!is_zero(a[d])) support_a.push_back(d);
  }
  for_each_block(make_blocks(1, x + 1, kBlock), threads, [&](const Block& blk) {
    S scratch;
    for (const std::uint64_t d : support_a) {
      if (d >= blk.hi) break;
      const std::uint64_t e_lo = std::max<std::uint64_t>(1, (blk.lo + d - 1) / d);
      const std::uint64_t e_hi = (blk.hi - 1) / d;
      for (std::uint64_t e = e_lo; e <= e_hi; ++e) {
        if (!is_zero(b[e])) multiply_add(c[d * e], a[d], b[e], scratch);
      }
    }
  });
  return c;
}

template <Scalar S>
ValueTable<S> dirichlet_convolve(const ValueTable<S>& a, const ValueTable<S>& b, unsigned threads) {
  if (a.limit != b.limit) {
    throw DomainError("dirichlet_convolve: mismatched limits " + std::to_string(a.limit) + " and " +
                      std::to_string(b.limit));
  }
  return {FunctionSpec::convolve({a.spec, b.spec}), a.limit, dirichlet_convolve_values(a.values, b.values, a.limit, threads)};
}

// Runtime-moded table, for callers that pick the mode from input.
using AnyValueTable = std::variant<FloatTable, ExactTable>;

inline AnyValueTable sieve_multiplicative(const FunctionSpec& f, std::uint64_t x, const FactorTable& table, Mode mode,
                                          unsigned threads = 1) {
  if (mode == Mode::Exact) return sieve_multiplicative<Rational>(f, x, table, threads);
  return sieve_multiplicative<Complex>(f, x, table, threads);
}

inline AnyValueTable dirichlet_convolve(const AnyValueTable& a, const AnyValueTable& b, unsigned threads = 1) {
  if (a.index() != b.index()) throw DomainError("dirichlet_convolve: mismatched modes");
  return std::visit(
      [&](const auto& ta) -> AnyValueTable {
        using T = std::decay_t<decltype(ta)>;
        return dirichlet_convolve(ta, std::get<T>(b), threads);
      },
      a);
}

}  // namespace divcorr
