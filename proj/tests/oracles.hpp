#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// into the library's sieves or closed forms.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline std::uint64_t divisor_count(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) c += (d * d == n) ? 1 : 2;
  }
  return c;
}

// tau(n) for n <= x by enumerating divisor pairs.
inline std::vector<std::uint64_t> divisor_count_table(std::uint64_t x) {
  std::vector<std::uint64_t> t(x + 1, 0);
  for (std::uint64_t d = 1; d <= x; ++d) {
    for (std::uint64_t m = d; m <= x; m += d) ++t[m];
  }
  return t;
}

inline std::vector<bool> eratosthenes(std::uint64_t x) {
  std::vector<bool> prime(x + 1, true);
  prime[0] = false;
  if (x >= 1) prime[1] = false;
  for (std::uint64_t p = 2; p * p <= x; ++p) {
    if (!prime[p]) continue;
    for (std::uint64_t m = p * p; m <= x; m += p) prime[m] = false;
  }
  return prime;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t d = 2; d <= n; ++d) {
    if (n % d) continue;
    ps.push_back(d);
    while (n % d == 0) n /= d;
  }
  return ps;
}

inline int moebius(std::uint64_t n) {
  int s = 1;
  for (std::uint64_t d = 2; d <= n; ++d) {
    if (n % d) continue;
    n /= d;
    if (n % d == 0) return 0;
    s = -s;
  }
  return s;
}

inline std::uint64_t totient(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t a = 1; a <= n; ++a) c += std::gcd(a, n) == 1;
  return c;
}

inline std::complex<double> ramanujan_exp(std::uint64_t d, std::int64_t h) {
  std::complex<double> s;
  for (std::uint64_t nu = 1; nu <= d; ++nu) {
    if (std::gcd(nu, d) != 1) continue;
    const double t = 2 * std::numbers::pi * static_cast<double>(nu) * static_cast<double>(h) / static_cast<double>(d);
    s += std::complex<double>(std::cos(t), std::sin(t));
  }
  return s;
}

// Solves A b = rhs over Q by Gaussian elimination.
inline std::vector<mpq_class> solve_rational(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (a[piv][col] == 0) ++piv;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const mpq_class f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= a[i][i];
  return rhs;
}

// Dirichlet convolution by the definition, for small x.
template <class T>
std::vector<T> convolve(const std::vector<T>& a, const std::vector<T>& b, std::uint64_t x) {
  std::vector<T> c(x + 1, T(0));
  for (std::uint64_t n = 1; n <= x; ++n) {
    for (std::uint64_t d = 1; d <= n; ++d) {
      if (n % d == 0) c[n] += a[d] * b[n / d];
    }
  }
  return c;
}

inline std::uint64_t largest_prime(std::uint64_t n) {
  const auto ps = prime_factors(n);
  return ps.empty() ? 1 : ps.back();
}

inline std::uint64_t smallest_prime(std::uint64_t n) {
  const auto ps = prime_factors(n);
  return ps.empty() ? UINT64_MAX : ps.front();
}

// Q+(n): the full power of the largest prime dividing n.
inline std::uint64_t top_prime_power(std::uint64_t n) {
  const std::uint64_t p = largest_prime(n);
  std::uint64_t q = 1;
  if (p == 1) return 1;
  while (n % p == 0) n /= p, q *= p;
  return q;
}

// Every divisor d of n with P+(d) < P-(n/d) and w < d <= w Q+(d).
inline std::vector<std::uint64_t> admissible_splits(std::uint64_t n, std::uint64_t w) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    const std::uint64_t e = n / d;
    if (!(largest_prime(d) < smallest_prime(e))) continue;
    if (std::gcd(d, e) != 1) continue;
    if (w < d && d <= w * top_prime_power(d)) out.push_back(d);
  }
  return out;
}

// Deterministic generator shared by the property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace oracle
