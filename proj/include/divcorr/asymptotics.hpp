#pragma once

// Leading constants of the correlation asymptotics as truncated Euler
// products. Every value carries an explicit bound on the omitted tail.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "divcorr/arith.hpp"
#include "divcorr/error.hpp"
#include "divcorr/scalar.hpp"

namespace divcorr {

namespace constants {
// zeta(2) = pi^2/6, zeta(6) = pi^6/945, zeta(3) = sum n^-3 (Apery), and
// gamma = lim (H_n - log n).
inline constexpr double zeta2 = 1.6449340668482264365;
inline constexpr double zeta3 = 1.2020569031595942854;
inline constexpr double zeta6 = 1.0173430619844491397;
inline constexpr double euler_gamma = 0.57721566490153286061;
}  // namespace constants

struct EulerValue {
  Complex value;
  std::uint64_t prime_cutoff = 0;
  double tail_bound = 0.0;                // |true value - value|
  std::optional<double> log_tail_bound;  // |log of the omitted factors|, for products
};

// Primes up to P by the sieve of Eratosthenes.
inline std::vector<std::uint32_t> primes_up_to(std::uint64_t P) {
  if (P >= UINT32_MAX) throw ResourceError("primes_up_to: cutoff exceeds 32 bits", P);
  std::vector<char> composite(P + 1, 0);
  std::vector<std::uint32_t> out;
  for (std::uint64_t p = 2; p <= P; ++p) {
    if (composite[p]) continue;
    out.push_back(static_cast<std::uint32_t>(p));
    for (std::uint64_t m = p * p; m <= P; m += p) composite[m] = 1;
  }
  return out;
}

// 1 / Gamma(z): Lanczos (g = 7, 9 terms) for Re z >= 1/2 and the reflection
// formula elsewhere; exactly 0 at z = 0, -1, -2, ...
inline Complex reciprocal_gamma(Complex z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) return {0.0, 0.0};
  if (z.real() < 0.5) {
    // 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
    return std::sin(std::numbers::pi * z) / (std::numbers::pi * reciprocal_gamma(1.0 - z));
  }
  static constexpr double g = 7.0;
  static constexpr double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                  771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                  -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const Complex w = z - 1.0;
  Complex series = c[0];
  for (int i = 1; i < 9; ++i) series += c[i] / (w + static_cast<double>(i));
  const Complex t = w + g + 0.5;
  return std::exp(t - (w + 0.5) * std::log(t)) / (std::sqrt(2.0 * std::numbers::pi) * series);
}

namespace detail {

inline void check_cutoff(std::int64_t h, std::uint64_t P) {
  if (h == 0) throw DomainError("h must be nonzero");
  const std::uint64_t habs = h < 0 ? static_cast<std::uint64_t>(-h) : static_cast<std::uint64_t>(h);
  std::uint64_t top = 1;
  for (const auto& pp : factorize_trial(habs)) top = pp.p;
  if (P < std::max<std::uint64_t>(100, top)) {
    throw DomainError("prime cutoff P = " + std::to_string(P) + " must be at least max(100, P+(h))");
  }
}

// sum over odd n > P of n^-2, bounded by 1 / (2 (P - 1)).
inline double odd_inverse_square_tail(std::uint64_t P) { return 1.0 / (2.0 * static_cast<double>(P - 1)); }

inline Complex pow_one_minus(double p, Complex w) { return std::exp(w * std::log1p(-1.0 / p)); }

}  // namespace detail

// lambda_{h,0}(z) = Gamma(z)^{-1} prod_p E_p(z), with E_p = 1 + ((1 - 1/p)^{z-1} - 1)/p
// for p not dividing h, and for p^l || h
//   E_p = (1 - 1/p) [ (1 + l) - sum_{b < l} (l - b) (1 - 1/p)^z tau_z(p^b) / p^b ]
//         + (1 - 1/p)^{z-1} tau_z(p^l) / p^{l+1}.
// The second form reduces to the first at l = 0 and to 1 at z = 1.
inline EulerValue lambda_h0(const ZParam& zp, std::int64_t h, std::uint64_t P) {
  detail::check_cutoff(h, P);
  const Complex z = zp.as_complex();
  const Complex rg = reciprocal_gamma(z);
  const std::uint64_t habs = h < 0 ? static_cast<std::uint64_t>(-h) : static_cast<std::uint64_t>(h);
  const Complex w = z - 1.0;
  Complex prod(1.0, 0.0);
  for (const std::uint32_t p32 : primes_up_to(P)) {
    const double p = p32;
    unsigned l = 0;
    for (std::uint64_t m = habs; m % p32 == 0; m /= p32) ++l;
    if (l == 0) {
      prod *= 1.0 + (detail::pow_one_minus(p, w) - 1.0) / p;
      continue;
    }
    const auto tz = tau_z_prime_power_series(z, l);
    const Complex pz = detail::pow_one_minus(p, z);
    Complex inner = static_cast<double>(1 + l);
    double pb = 1.0;
    for (unsigned b = 0; b < l; ++b, pb *= p) inner -= static_cast<double>(l - b) * pz * tz[b] / pb;
    prod *= (1.0 - 1.0 / p) * inner + detail::pow_one_minus(p, w) * tz[l] / (pb * p);
  }
  EulerValue out{rg * prod, P, 0.0, 0.0};
  // |E_p - 1| <= c / p^2 for p > P with c = |z - 1| exp(|z - 1| / (P - 1)) / (1 - 1/P).
  const double Pd = static_cast<double>(P);
  const double c = std::abs(w) * std::exp(std::abs(w) / (Pd - 1.0)) / (1.0 - 1.0 / Pd);
  const double umax = c / (Pd * Pd);
  const double log_tail = umax < 1.0 ? c / (1.0 - umax) * detail::odd_inverse_square_tail(P) : INFINITY;
  out.log_tail_bound = log_tail;
  out.tail_bound = std::abs(out.value) * std::expm1(log_tail);
  return out;
}

struct TitchmarshConstants {
  EulerValue c_h, c_h_prime;
};

// C_h = zeta(2) zeta(3) / zeta(6) prod_{p | h} (1 - p / (p^2 - p + 1)),
// C_h' = (gamma - sum_p log p / (p^2 - p + 1) + sum_{p | h} p^2 log p / ((p - 1)(p^2 - p + 1))) C_h.
inline TitchmarshConstants titchmarsh_constants(std::int64_t h, std::uint64_t P) {
  detail::check_cutoff(h, P);
  const std::uint64_t habs = h < 0 ? static_cast<std::uint64_t>(-h) : static_cast<std::uint64_t>(h);
  double ch = constants::zeta2 * constants::zeta3 / constants::zeta6;
  double local = 0.0;
  for (const auto& [p64, nu] : factorize_trial(habs)) {
    const double p = static_cast<double>(p64);
    ch *= 1.0 - p / (p * p - p + 1.0);
    local += p * p * std::log(p) / ((p - 1.0) * (p * p - p + 1.0));
  }
  CompensatedSum<Complex> prime_sum;
  for (const std::uint32_t p32 : primes_up_to(P)) {
    const double p = p32;
    prime_sum.add(std::log(p) / (p * p - p + 1.0));
  }
  const double Pd = static_cast<double>(P);
  // log p / (p^2 - p + 1) <= log p / (p^2 (1 - 1/P)); sum over odd n > P of log n / n^2 <= (log(P-1) + 1) / (2 (P-1)).
  const double sum_tail = (std::log(Pd - 1.0) + 1.0) / (2.0 * (Pd - 1.0) * (1.0 - 1.0 / Pd));
  TitchmarshConstants out;
  out.c_h = {Complex(ch, 0.0), P, 0.0, 0.0};
  const double bracket = constants::euler_gamma - prime_sum.value().real() + local;
  out.c_h_prime = {Complex(bracket * ch, 0.0), P, sum_tail * ch, std::nullopt};
  return out;
}

// Leading coefficient C_h / (k - 1)! of the omega(n) = k correlation.
inline EulerValue omega_k_coefficient(std::int64_t h, unsigned k, std::uint64_t P) {
  if (k == 0) throw DomainError("omega_k_coefficient: k must be at least 1");
  const auto c = titchmarsh_constants(h, P).c_h;
  double fact = 1.0;
  for (unsigned i = 2; i < k; ++i) fact *= i;
  return {c.value / fact, P, c.tail_bound / fact, c.log_tail_bound};
}

// B_0 = 2^{-1/2} prod_{p = 3 mod 4} (1 - p^-2)^{-1/2}.
inline EulerValue landau_ramanujan(std::uint64_t P) {
  if (P < 100) throw DomainError("prime cutoff P must be at least 100");
  CompensatedSum<Complex> log_sum;
  for (const std::uint32_t p32 : primes_up_to(P)) {
    if (p32 % 4 != 3) continue;
    const double p = p32;
    log_sum.add(-0.5 * std::log1p(-1.0 / (p * p)));
  }
  const double Pd = static_cast<double>(P);
  const double value = std::exp(log_sum.value().real()) / std::numbers::sqrt2;
  // -log(1 - u) <= u / (1 - u) with u = p^-2 <= P^-2.
  const double log_tail = 0.5 / (1.0 - 1.0 / (Pd * Pd)) * detail::odd_inverse_square_tail(P);
  return {Complex(value, 0.0), P, value * std::expm1(log_tail), log_tail};
}

// beta_{h,0} = B_0 B(h) with
// B(h) = (1 + chi_4(h*) / (4 h°)) prod_{p^l || h, p = 3 mod 4} (1 - 1/(p+1) + (-1)^l / (p^l (p+1)))
//        prod_{p = 3 mod 4} (1 + p^-2),
// h° = (h, 2^infinity), h* = h / h°.
inline EulerValue two_squares_coeff(std::int64_t h, std::uint64_t P) {
  detail::check_cutoff(h, P);
  const std::uint64_t habs = h < 0 ? static_cast<std::uint64_t>(-h) : static_cast<std::uint64_t>(h);
  std::uint64_t h2 = 1;
  while (habs % (h2 * 2) == 0) h2 *= 2;
  const std::int64_t hstar = h / static_cast<std::int64_t>(h2);
  const std::int64_t r = ((hstar % 4) + 4) % 4;
  const double chi4 = r == 1 ? 1.0 : (r == 3 ? -1.0 : 0.0);
  double local = 1.0 + chi4 / (4.0 * static_cast<double>(h2));
  for (const auto& [p64, l] : factorize_trial(habs)) {
    if (p64 % 4 != 3) continue;
    const double p = static_cast<double>(p64);
    local *= 1.0 - 1.0 / (p + 1.0) + ((l % 2) ? -1.0 : 1.0) / (std::pow(p, l) * (p + 1.0));
  }
  CompensatedSum<Complex> log_sum;
  for (const std::uint32_t p32 : primes_up_to(P)) {
    if (p32 % 4 != 3) continue;
    const double p = p32;
    log_sum.add(std::log1p(1.0 / (p * p)) - 0.5 * std::log1p(-1.0 / (p * p)));
  }
  const double Pd = static_cast<double>(P);
  const double value = local * std::exp(log_sum.value().real()) / std::numbers::sqrt2;
  const double log_tail = (1.0 + 0.5 / (1.0 - 1.0 / (Pd * Pd))) * detail::odd_inverse_square_tail(P);
  return {Complex(value, 0.0), P, std::abs(value) * std::expm1(log_tail), log_tail};
}

}  // namespace divcorr
