#pragma once

// Integer arithmetic: smallest-prime-factor table, classical multiplicative
// functions and Ramanujan sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <new>
#include <numeric>
#include <string>
#include <vector>

#include "divcorr/error.hpp"

namespace divcorr {

struct PrimePower {
  std::uint64_t p;
  unsigned nu;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

using Factorization = std::vector<PrimePower>;

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Largest t with t^k <= x.
inline std::uint64_t iroot(std::uint64_t x, unsigned k) {
  if (k == 0) throw DomainError("iroot: k must be positive");
  if (k == 1 || x < 2) return x;
  auto fits = [&](std::uint64_t t) {
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      acc *= t;
      if (acc > x) return false;
    }
    return true;
  };
  std::uint64_t lo = 1, hi = std::min<std::uint64_t>(x, std::uint64_t{1} << (64 / k + 1));
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

inline std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

inline bool is_perfect_square(std::uint64_t n) {
  const auto r = isqrt(n);
  return r * r == n;
}

// Non-negative residue of a signed integer.
inline std::uint64_t mod_floor(std::int64_t a, std::uint64_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  std::int64_t r = a % mm;
  if (r < 0) r += mm;
  return static_cast<std::uint64_t>(r);
}

// Trial-division factorization for values outside a table.
inline Factorization factorize_trial(std::uint64_t n) {
  Factorization out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    unsigned nu = 0;
    while (n % p == 0) n /= p, ++nu;
    out.push_back({p, nu});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t r = n;
  for (const auto& [p, nu] : factorize_trial(n)) r = r / p * (p - 1);
  return r;
}

inline int mobius(std::uint64_t n) {
  int s = 1;
  for (const auto& pp : factorize_trial(n)) {
    if (pp.nu > 1) return 0;
    s = -s;
  }
  return s;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> ds{1};
  for (const auto& [p, nu] : factorize_trial(n)) {
    const std::size_t base = ds.size();
    std::uint64_t pk = 1;
    for (unsigned k = 1; k <= nu; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline std::uint64_t divisor_count(std::uint64_t n) {
  std::uint64_t c = 1;
  for (const auto& pp : factorize_trial(n)) c *= pp.nu + 1;
  return c;
}

// c_d(h) = sum over delta | (h, d) of delta * mu(d / delta).
inline std::int64_t ramanujan_sum(std::uint64_t d, std::int64_t h) {
  if (d == 0) throw DomainError("ramanujan_sum: d must be positive");
  const std::uint64_t habs = h < 0 ? static_cast<std::uint64_t>(-h) : static_cast<std::uint64_t>(h);
  const std::uint64_t g = std::gcd(habs, d);
  std::int64_t total = 0;
  for (auto delta : divisors(g)) total += static_cast<std::int64_t>(delta) * mobius(d / delta);
  return total;
}

// Smallest-prime-factor table on [0, limit], built by a linear sieve.
class FactorTable {
 public:
  explicit FactorTable(std::uint64_t limit) : limit_(limit) {
    if (limit < 2) throw DomainError("FactorTable: limit must be at least 2");
    if (limit >= std::numeric_limits<std::uint32_t>::max()) {
      throw ResourceError("FactorTable: limit exceeds 32-bit sieve capacity", limit);
    }
    try {
      spf_.assign(limit + 1, 0);
      for (std::uint64_t n = 2; n <= limit; ++n) {
        if (spf_[n] == 0) {
          spf_[n] = static_cast<std::uint32_t>(n);
          primes_.push_back(static_cast<std::uint32_t>(n));
        }
        for (const std::uint32_t p : primes_) {
          if (p > spf_[n] || p * n > limit) break;
          spf_[p * n] = p;
        }
      }
    } catch (const std::bad_alloc&) {
      throw ResourceError("FactorTable: allocation failed", limit);
    }
  }

  std::uint64_t limit() const noexcept { return limit_; }

  std::uint32_t spf(std::uint64_t n) const {
    check(n);
    return spf_[n];
  }

  bool is_prime(std::uint64_t n) const { return n >= 2 && spf(n) == n; }

  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

  Factorization factorize(std::uint64_t n) const {
    check(n);
    Factorization out;
    while (n > 1) {
      const std::uint64_t p = spf_[n];
      unsigned nu = 0;
      while (n % p == 0) n /= p, ++nu;
      out.push_back({p, nu});
    }
    return out;
  }

  // Largest prime factor, with P+(1) = 1.
  std::uint64_t largest_prime_factor(std::uint64_t n) const {
    const auto f = factorize(n);
    return f.empty() ? 1 : f.back().p;
  }

  void check(std::uint64_t n) const {
    if (n == 0 || n > limit_) {
      throw DomainError("n = " + std::to_string(n) + " outside factor table range [1, " +
                        std::to_string(limit_) + "]");
    }
  }

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

inline std::uint64_t multiply_out(const Factorization& f) {
  std::uint64_t n = 1;
  for (const auto& [p, nu] : f) n *= ipow(p, nu);
  return n;
}

struct BasicFunction {
  enum class Kind { Mobius, Phi, Omega, BigOmega, OmegaClass };
  Kind kind;
  std::uint64_t r = 0;
  std::uint64_t modulus = 1;

  static BasicFunction mobius() { return {Kind::Mobius}; }
  static BasicFunction phi() { return {Kind::Phi}; }
  static BasicFunction omega() { return {Kind::Omega}; }
  static BasicFunction big_omega() { return {Kind::BigOmega}; }
  // Number of distinct primes p | n with p = r mod D.
  static BasicFunction omega_class(std::uint64_t r, std::uint64_t D) {
    if (D == 0) throw DomainError("omega_class: modulus must be positive");
    if (std::gcd(r % D, D) != 1 && D != 1) throw DomainError("omega_class: gcd(r, D) must be 1");
    return {Kind::OmegaClass, r % D, D};
  }
};

inline std::int64_t eval_basic(std::uint64_t n, const BasicFunction& fn, const FactorTable& table) {
  const auto f = table.factorize(n);
  switch (fn.kind) {
    case BasicFunction::Kind::Mobius: {
      std::int64_t s = 1;
      for (const auto& pp : f) {
        if (pp.nu > 1) return 0;
        s = -s;
      }
      return s;
    }
    case BasicFunction::Kind::Phi: {
      std::uint64_t r = n;
      for (const auto& pp : f) r = r / pp.p * (pp.p - 1);
      return static_cast<std::int64_t>(r);
    }
    case BasicFunction::Kind::Omega:
      return static_cast<std::int64_t>(f.size());
    case BasicFunction::Kind::BigOmega: {
      std::int64_t c = 0;
      for (const auto& pp : f) c += pp.nu;
      return c;
    }
    case BasicFunction::Kind::OmegaClass: {
      return std::count_if(f.begin(), f.end(),
                           [&](const PrimePower& pp) { return pp.p % fn.modulus == fn.r; });
    }
  }
  return 0;
}

// P+(n) for n <= limit, with P+(1) = 1.
inline std::vector<std::uint32_t> largest_prime_factor_table(const FactorTable& table, std::uint64_t limit) {
  if (limit > table.limit()) throw ResourceError("largest_prime_factor_table: limit exceeds factor table", limit);
  std::vector<std::uint32_t> lpf(limit + 1, 1);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint32_t p = table.spf(n);
    lpf[n] = std::max(p, lpf[n / p]);
  }
  return lpf;
}

// tau(n) for n <= limit, from the factor table.
inline std::vector<std::uint32_t> divisor_count_table(const FactorTable& table, std::uint64_t limit) {
  if (limit > table.limit()) throw ResourceError("divisor_count_table: limit exceeds factor table", limit);
  std::vector<std::uint32_t> tau(limit + 1, 0), exp(limit + 1, 0);
  if (limit >= 1) tau[1] = 1;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint64_t p = table.spf(n), m = n / p;
    if (m % p == 0) {
      exp[n] = exp[m] + 1;
      tau[n] = tau[m] / (exp[m] + 1) * (exp[n] + 1);
    } else {
      exp[n] = 1;
      tau[n] = tau[m] * 2;
    }
  }
  return tau;
}

}  // namespace divcorr
