#pragma once

// Shifted convolution sums sum f(n) tau(an - h), the character-sum
// approximation to tau(n - h), the weighted discrepancy Sigma_f, the explicit
// main term M_f(x; a, h), and the omega-restricted correlations.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "divcorr/arith.hpp"
#include "divcorr/characters.hpp"
#include "divcorr/error.hpp"
#include "divcorr/multiplicative.hpp"
#include "divcorr/parallel.hpp"
#include "divcorr/scalar.hpp"

namespace divcorr {

namespace detail {

inline constexpr std::uint64_t kSumBlock = 1 << 14;

inline std::uint64_t uabs(std::int64_t h) {
  return h < 0 ? static_cast<std::uint64_t>(-h) : static_cast<std::uint64_t>(h);
}

// Largest an - h over n <= x, checked against the sieve capacity.
inline std::uint64_t shifted_limit(std::uint64_t x, std::uint64_t a, std::int64_t h) {
  if (a == 0) throw DomainError("a must be positive");
  const unsigned __int128 top = static_cast<unsigned __int128>(a) * x + uabs(h);
  if (top >= std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("a x + |h| exceeds the factor table capacity", static_cast<std::uint64_t>(std::min<unsigned __int128>(top, UINT64_MAX)));
  }
  const std::int64_t v = static_cast<std::int64_t>(a * x) - h;
  return v < 2 ? 2 : static_cast<std::uint64_t>(v);
}

// First n with n > |h| / a and a n - h >= 1.
inline std::uint64_t first_shifted_n(std::uint64_t a, std::int64_t h) {
  std::uint64_t n = uabs(h) / a + 1;
  while (static_cast<std::int64_t>(a * n) - h < 1) ++n;
  return n;
}

template <Scalar S>
S conj_value(const DirichletCharacter& chi, std::int64_t n) {
  if constexpr (is_exact_v<S>) {
    return char_value<S>(chi, n);
  } else {
    return std::conj(chi.value(n));
  }
}

template <Scalar S>
S from_double_checked(double v, const char* what) {
  if constexpr (is_exact_v<S>) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-6) throw InternalError(std::string(what) + ": character sum is not an integer");
    return from_int<S>(static_cast<std::int64_t>(r));
  } else {
    return Complex(v, 0.0);
  }
}

}  // namespace detail

// sum over |h|/a < n <= x of f[n] tau[a n - h], with tau given on [1, a x - h].
template <Scalar S>
S correlation_sum(const std::vector<S>& f, std::uint64_t x, std::uint64_t a, std::int64_t h,
                  const std::vector<std::uint32_t>& tau, unsigned threads = 1) {
  if (h == 0) throw DomainError("h must be nonzero");
  const std::uint64_t lo = detail::first_shifted_n(a, h);
  if (lo > x) return from_int<S>(0);
  if (f.size() < x + 1) throw DomainError("correlation_sum: f table shorter than x");
  if (tau.size() < a * x - h + 1) throw DomainError("correlation_sum: tau table shorter than a x - h");
  return blocked_sum<S>(lo, x + 1, detail::kSumBlock, threads, [&](std::uint64_t b, std::uint64_t e) {
    CompensatedSum<S> acc;
    for (std::uint64_t n = b; n < e; ++n) {
      if (is_zero(f[n])) continue;
      acc.add(f[n] * from_int<S>(tau[a * n - h]));
    }
    return acc.value();
  });
}

// D_f(x; a, h) = sum_{|h|/a < n <= x} f(n) tau(a n - h).
template <Scalar S>
S divisor_correlation(const FunctionSpec& f, std::uint64_t x, std::uint64_t a, std::int64_t h, unsigned threads = 1) {
  if (h == 0) throw DomainError("h must be nonzero");
  const std::uint64_t top = detail::shifted_limit(x, a, h);
  if (detail::first_shifted_n(a, h) > x) return from_int<S>(0);
  const FactorTable table(std::max(top, x));
  const auto fv = sieve_multiplicative<S>(f, x, table, threads).values;
  const auto tau = divisor_count_table(table, top);
  return correlation_sum(fv, x, a, h, tau, threads);
}

// q-th term of the approximation, as a function of N mod q:
// W_q[rho] = [gcd(rho, q) = (h, q)] phi(m)^{-1} sum_{f | m, f <= R} sum_{psi mod f primitive} psi(h/g) conj psi(rho/g),
// with g = (h, q), m = q / g. Primitive psi of conductor f | m lift to the
// characters mod m of conductor f.
inline std::vector<double> kernel_residue_weights(std::uint64_t q, std::int64_t h, std::uint64_t R,
                                                  const CharacterPool& pool) {
  const std::uint64_t g = std::gcd(detail::uabs(h), q);
  const std::uint64_t m = q / g;
  const auto hg = h / static_cast<std::int64_t>(g);
  std::vector<std::pair<const DirichletCharacter*, Complex>> chars;
  for (const auto f : divisors(m)) {
    if (f > R) break;
    if (f > pool.max_conductor()) throw DomainError("character pool too small for conductor " + std::to_string(f));
    for (const auto& psi : pool.with_conductor(f)) chars.emplace_back(&psi, psi.value(hg));
  }
  const double inv_phi = 1.0 / static_cast<double>(euler_phi(m));
  std::vector<double> w(q, 0.0);
  for (std::uint64_t rho = 0; rho < q; ++rho) {
    if (std::gcd(rho, q) != g) continue;
    const auto rg = static_cast<std::int64_t>(rho / g);
    Complex s;
    for (const auto& [psi, at_h] : chars) s += at_h * std::conj(psi->value(rg));
    w[rho] = s.real() * inv_phi;
  }
  return w;
}

// 2 sum_{q <= sqrt(n - h), (n, q) = (h, q)} phi(q/(h,q))^{-1}
//   sum_{chi mod q/(h,q), cond(chi) <= R} chi(h/(h,q)) conj chi(n/(h,q)),
// returned as a complex number; its imaginary part vanishes up to rounding.
inline Complex tilde_tau_complex(std::int64_t n, std::int64_t h, std::uint64_t R, const CharacterPool& pool) {
  if (n < 1) throw DomainError("tilde_tau: n must be positive");
  if (n - h < 1) throw DomainError("tilde_tau: n - h must be positive");
  if (R < 1) throw DomainError("tilde_tau: R must be positive");
  const std::uint64_t top = isqrt(static_cast<std::uint64_t>(n - h));
  Complex total;
  for (std::uint64_t q = 1; q <= top; ++q) {
    const std::uint64_t g = std::gcd(detail::uabs(h), q);
    if (std::gcd(static_cast<std::uint64_t>(n), q) != g) continue;
    const std::uint64_t m = q / g;
    const auto hg = h / static_cast<std::int64_t>(g), ng = n / static_cast<std::int64_t>(g);
    Complex s;
    for (const auto f : divisors(m)) {
      if (f > R) break;
      if (f > pool.max_conductor()) throw DomainError("character pool too small for conductor " + std::to_string(f));
      for (const auto& psi : pool.with_conductor(f)) s += psi.value(hg) * std::conj(psi.value(ng));
    }
    total += s / static_cast<double>(euler_phi(m));
  }
  return 2.0 * total;
}

inline double tilde_tau(std::int64_t n, std::int64_t h, std::uint64_t R, const CharacterPool& pool) {
  return tilde_tau_complex(n, h, R, pool).real();
}

// Delta_h(n; R) = tau(n - h) - tilde_tau_h(n; R).
inline double delta_h(std::int64_t n, std::int64_t h, std::uint64_t R, const CharacterPool& pool) {
  const double t = tilde_tau(n, h, R, pool);
  return static_cast<double>(divisor_count(static_cast<std::uint64_t>(n - h))) - t;
}

// Sigma_f(I; a, h; R) = sum_{n in (lo, hi]} f(n) Delta_h(a n; R).
template <Scalar S>
S sigma_f(const FunctionSpec& f, std::uint64_t lo, std::uint64_t hi, std::uint64_t a, std::int64_t h, std::uint64_t R,
          unsigned threads = 1) {
  if (hi <= lo) throw DomainError("sigma_f: interval (lo, hi] is empty");
  if (R < 1) throw DomainError("sigma_f: R must be positive");
  if (static_cast<std::int64_t>(a * (lo + 1)) - h < 1) throw DomainError("sigma_f: a n - h must be positive on I");
  const std::uint64_t top = detail::shifted_limit(hi, a, h);
  const std::uint64_t qmax = isqrt(top);
  const FactorTable table(std::max(top, hi));
  const auto fv = sieve_multiplicative<S>(f, hi, table, threads).values;
  const auto tau = divisor_count_table(table, top);
  const CharacterPool pool(std::max<std::uint64_t>(1, std::min(R, qmax)));

  std::vector<std::vector<S>> weights(qmax + 1);
  for (std::uint64_t q = 1; q <= qmax; ++q) {
    const auto w = kernel_residue_weights(q, h, R, pool);
    const std::uint64_t m = q / std::gcd(detail::uabs(h), q);
    const auto phi = static_cast<double>(euler_phi(m));
    weights[q].resize(q);
    for (std::uint64_t r = 0; r < q; ++r) {
      if constexpr (is_exact_v<S>) {
        weights[q][r] = detail::from_double_checked<S>(w[r] * phi, "sigma_f") / from_int<S>(static_cast<std::int64_t>(phi));
      } else {
        weights[q][r] = Complex(w[r], 0.0);
      }
    }
  }

  return blocked_sum<S>(lo + 1, hi + 1, detail::kSumBlock, threads, [&](std::uint64_t b, std::uint64_t e) {
    CompensatedSum<S> acc;
    for (std::uint64_t n = b; n < e; ++n) {
      if (is_zero(fv[n])) continue;
      const std::uint64_t an = a * n, shifted = an - h;
      const std::uint64_t qtop = isqrt(shifted);
      S approx = from_int<S>(0);
      for (std::uint64_t q = 1; q <= qtop; ++q) approx += weights[q][an % q];
      acc.add(fv[n] * (from_int<S>(tau[shifted]) - from_int<S>(2) * approx));
    }
    return acc.value();
  });
}

template <Scalar S>
struct MainTermResult {
  S value;
  std::vector<std::pair<DirichletCharacter, S>> partials;  // one entry per primitive chi with cond | D
};

// M_f(x; a, h) = 2 sum_{chi primitive, cond | D} sum_{q <= sqrt(a x), cond | q/(h,q)}
//   conj chi(h/(h,q)) / phi(q/(h,q)) sum_{q^2/a <= n <= x, (an, q) = (h, q)} f(n) chi(an/(an, q)).
// For each q the n-sum is gathered into residue classes mod q first.
template <Scalar S>
MainTermResult<S> main_term(const FunctionSpec& f, std::uint64_t x, std::uint64_t a, std::int64_t h, std::uint64_t D,
                            unsigned threads = 1) {
  if (h == 0) throw DomainError("h must be nonzero");
  if (a == 0) throw DomainError("a must be positive");
  if (D == 0) throw DomainError("D must be positive");
  if (D % f.class_modulus() != 0) {
    throw DomainError("D = " + std::to_string(D) + " is not a multiple of the period " +
                      std::to_string(f.class_modulus()) + " of " + f.describe());
  }
  detail::shifted_limit(x, a, h);
  const FactorTable table(std::max<std::uint64_t>(x, 2));
  const auto fv = sieve_multiplicative<S>(f, x, table, threads).values;
  const auto chars = primitive_characters_dividing(D);
  const std::uint64_t qmax = isqrt(a * x);
  const std::size_t nc = chars.size();

  const auto blocks = make_blocks(1, qmax + 1, 8);
  std::vector<std::vector<S>> block_parts(blocks.size(), std::vector<S>(nc, from_int<S>(0)));
  for_each_block(blocks, threads, [&](const Block& blk) {
    std::vector<CompensatedSum<S>> acc(nc);
    std::vector<S> classes;
    S scratch;
    for (std::uint64_t q = blk.lo; q < blk.hi; ++q) {
      const std::uint64_t g = std::gcd(detail::uabs(h), q);
      const std::uint64_t m = q / g;
      bool any = false;
      for (const auto& chi : chars) any = any || m % chi.conductor() == 0;
      if (!any) continue;
      const std::uint64_t n0 = std::max<std::uint64_t>(1, (q * q + a - 1) / a);
      if (n0 > x) continue;
      classes.assign(q, from_int<S>(0));
      std::uint64_t r = n0 % q;
      for (std::uint64_t n = n0; n <= x; ++n) {
        if (!is_zero(fv[n])) classes[r] += fv[n];
        if (++r == q) r = 0;
      }
      const S inv_phi = from_int<S>(1) / from_int<S>(static_cast<std::int64_t>(euler_phi(m)));
      const auto hg = h / static_cast<std::int64_t>(g);
      for (std::size_t c = 0; c < nc; ++c) {
        const auto& chi = chars[c];
        if (m % chi.conductor() != 0) continue;
        S inner = from_int<S>(0);
        for (std::uint64_t rho = 0; rho < q; ++rho) {
          if (is_zero(classes[rho])) continue;
          const std::uint64_t arho = (a % q) * rho % q;
          if (std::gcd(arho, q) != g) continue;
          const S cv = char_value<S>(chi, static_cast<std::int64_t>(arho / g));
          if (!is_zero(cv)) multiply_add(inner, classes[rho], cv, scratch);
        }
        acc[c].add(inner * detail::conj_value<S>(chi, hg) * inv_phi);
      }
    }
    for (std::size_t c = 0; c < nc; ++c) block_parts[blk.index][c] = acc[c].value();
  });

  MainTermResult<S> out{from_int<S>(0), {}};
  CompensatedSum<S> total;
  for (std::size_t c = 0; c < nc; ++c) {
    CompensatedSum<S> part;
    for (const auto& bp : block_parts) part.add(bp[c]);
    const S v = from_int<S>(2) * part.value();
    out.partials.emplace_back(chars[c], v);
    total.add(v);
  }
  out.value = total.value();
  return out;
}

// The a = h = 1 form: 2 sum_{chi primitive, cond | D} sum_{q <= sqrt x, cond | q} phi(q)^{-1}
// sum_{q^2 <= n <= x, (n, q) = 1} f(n) chi(n), evaluated n by n.
template <Scalar S>
S main_term_shift1(const FunctionSpec& f, std::uint64_t x, std::uint64_t D) {
  if (D == 0) throw DomainError("D must be positive");
  const FactorTable table(std::max<std::uint64_t>(x, 2));
  const auto fv = sieve_multiplicative<S>(f, x, table).values;
  const auto chars = primitive_characters_dividing(D);
  CompensatedSum<S> total;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (is_zero(fv[n])) continue;
    S at_n = from_int<S>(0);
    for (std::uint64_t q = 1; q * q <= n; ++q) {
      if (std::gcd(n, q) != 1) continue;
      S chi_sum = from_int<S>(0);
      for (const auto& chi : chars) {
        if (q % chi.conductor() == 0) chi_sum += char_value<S>(chi, static_cast<std::int64_t>(n));
      }
      at_n += chi_sum / from_int<S>(static_cast<std::int64_t>(euler_phi(q)));
    }
    total.add(fv[n] * at_n);
  }
  return from_int<S>(2) * total.value();
}

// sum_{|h| < n <= x, omega(n) = k} tau(n - h).
template <Scalar S>
S correlation_by_omega(std::uint64_t x, std::int64_t h, unsigned k) {
  if (h == 0) throw DomainError("h must be nonzero");
  const std::uint64_t top = detail::shifted_limit(x, 1, h);
  const FactorTable table(std::max(top, x));
  const auto tau = divisor_count_table(table, top);
  std::int64_t total = 0;
  for (std::uint64_t n = detail::first_shifted_n(1, h); n <= x; ++n) {
    if (table.factorize(n).size() == k) total += tau[n - h];
  }
  return from_int<S>(total);
}

// Xi_{x,h}(z) = sum_{|h| < n <= x} z^{omega(n)} tau(n - h).
template <Scalar S>
S xi_polynomial(std::uint64_t x, std::int64_t h, const S& z) {
  if (h == 0) throw DomainError("h must be nonzero");
  const std::uint64_t top = detail::shifted_limit(x, 1, h);
  const FactorTable table(std::max(top, x));
  const auto tau = divisor_count_table(table, top);
  std::vector<S> zpow{from_int<S>(1)};
  CompensatedSum<S> total;
  for (std::uint64_t n = detail::first_shifted_n(1, h); n <= x; ++n) {
    const std::size_t w = table.factorize(n).size();
    while (zpow.size() <= w) zpow.push_back(zpow.back() * z);
    total.add(zpow[w] * from_int<S>(tau[n - h]));
  }
  return total.value();
}

// b_chi = phi(D)^{-1} sum_{r mod D} v(r) conj chi(r) for every chi mod D, with
// the reconstruction sum_chi b_chi chi(r) = v(r) asserted on reduced residues.
template <Scalar S>
std::vector<std::pair<DirichletCharacter, S>> b_chi_parameters(const std::map<std::uint64_t, S>& class_values,
                                                               std::uint64_t D) {
  if (D == 0) throw DomainError("D must be positive");
  std::vector<std::uint64_t> residues;
  for (std::uint64_t r = 0; r < D; ++r) {
    if (std::gcd(r, D) == 1) residues.push_back(r);
  }
  for (auto r : residues) {
    if (!class_values.count(r)) throw DomainError("b_chi_parameters: missing class value for r = " + std::to_string(r));
  }
  for (const auto& [r, v] : class_values) {
    if (r >= D || std::gcd(r, D) != 1) throw DomainError("b_chi_parameters: " + std::to_string(r) + " is not a reduced residue");
  }
  const auto group = character_group(D);
  const S inv_phi = from_int<S>(1) / from_int<S>(static_cast<std::int64_t>(residues.size()));
  std::vector<std::pair<DirichletCharacter, S>> out;
  for (const auto& chi : group) {
    S b = from_int<S>(0);
    for (auto r : residues) b += class_values.at(r) * detail::conj_value<S>(chi, static_cast<std::int64_t>(r));
    out.emplace_back(chi, b * inv_phi);
  }
  for (auto r : residues) {
    S back = from_int<S>(0);
    for (const auto& [chi, b] : out) back += b * char_value<S>(chi, static_cast<std::int64_t>(r));
    const S diff = back - class_values.at(r);
    if (magnitude(diff) > (is_exact_v<S> ? 0.0 : 1e-9 * std::max(1.0, magnitude(class_values.at(r))))) {
      throw InternalError("b_chi reconstruction fails at r = " + std::to_string(r));
    }
  }
  return out;
}

template <Scalar S>
struct CorrelationReport {
  std::uint64_t x, a;
  std::int64_t h;
  std::uint64_t R, D;
  std::uint64_t sigma_lo, sigma_hi;  // Sigma_f interval (lo, hi]
  S d_value, m_value, sigma_value;
  double normalized_gap;
  std::vector<std::pair<DirichletCharacter, S>> m_partials;
};

template <Scalar S>
CorrelationReport<S> correlation_report(const FunctionSpec& f, std::uint64_t x, std::uint64_t a, std::int64_t h,
                                        std::uint64_t R, std::uint64_t D, unsigned threads = 1) {
  CorrelationReport<S> rep{x, a, h, R, D, x / 2, x, {}, {}, {}, 0.0, {}};
  rep.d_value = divisor_correlation<S>(f, x, a, h, threads);
  auto mt = main_term<S>(f, x, a, h, D, threads);
  rep.m_value = mt.value;
  rep.m_partials = std::move(mt.partials);
  std::uint64_t lo = x / 2;
  while (static_cast<std::int64_t>(a * (lo + 1)) - h < 1) ++lo;
  rep.sigma_lo = lo;
  rep.sigma_value = lo < x ? sigma_f<S>(f, lo, x, a, h, R, threads) : from_int<S>(0);
  rep.normalized_gap = x ? magnitude(rep.d_value - rep.m_value) / static_cast<double>(x) : 0.0;
  return rep;
}

}  // namespace divcorr
