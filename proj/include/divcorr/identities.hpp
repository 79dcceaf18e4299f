#pragma once

// Combinatorial identities for tau_z: the Heath-Brown type decomposition with
// restricted tau_{-1/v} factors, the Linnik type decomposition with friable
// pieces, and the friable factorization behind the type-II reduction.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "divcorr/arith.hpp"
#include "divcorr/error.hpp"
#include "divcorr/multiplicative.hpp"
#include "divcorr/scalar.hpp"

namespace divcorr {

struct HBCoefficients {
  int K, N, u, v;
  std::vector<Rational> b;          // b[l - 1] = b_l
  std::map<int, Rational> a;        // m -> a_m for K <= m <= (K + N) v - u
};

struct IdentityReport {
  std::string identity;
  std::map<std::string, std::string> params;
  std::uint64_t x = 0;
  Mode mode = Mode::Float;
  double max_abs_deviation = 0.0;
  std::string max_abs_deviation_exact = "0";  // exact mode only
  std::optional<std::uint64_t> worst_n;
  std::uint64_t terms_evaluated = 0;
  std::vector<std::string> warnings;

  bool exact_zero() const { return max_abs_deviation == 0.0 && max_abs_deviation_exact == "0"; }
};

namespace detail {

inline void check_hb_params(int K, int N, int u, int v) {
  if (K < 1) throw DomainError("K must be at least 1");
  if (N < 0) throw DomainError("N must be nonnegative");
  if (!(v > u && u >= 0)) throw DomainError("require v > u >= 0");
}

inline Rational factorial(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(f);
}

inline Rational binomial_int(std::int64_t e, int m) {
  return binomial_z(from_int<Rational>(e), static_cast<unsigned>(m));
}

// Exponents e_l = l v + N v - u, l = 1..K.
inline std::vector<std::int64_t> hb_exponents(int K, int N, int u, int v) {
  std::vector<std::int64_t> e(K);
  for (int l = 1; l <= K; ++l) e[l - 1] = static_cast<std::int64_t>(l) * v + static_cast<std::int64_t>(N) * v - u;
  return e;
}

}  // namespace detail

// b_l = (-1)^l / ((l-1)! (K-l)!) prod_{j != l} (j + N - u/v), checked against
// the Vandermonde system sum_l b_l e_l^i = -[i = 0] for i < K.
inline std::vector<Rational> hb_b_coefficients(int K, int N, int u, int v) {
  detail::check_hb_params(K, N, u, v);
  const Rational shift = Rational(N) - ZParam::rational(u, v).as_rational();
  std::vector<Rational> b(K);
  for (int l = 1; l <= K; ++l) {
    Rational prod = (l % 2 ? -1 : 1) / (detail::factorial(l - 1) * detail::factorial(K - l));
    for (int j = 1; j <= K; ++j) {
      if (j != l) prod *= Rational(j) + shift;
    }
    b[l - 1] = prod;
  }
  const auto e = detail::hb_exponents(K, N, u, v);
  for (int i = 0; i < K; ++i) {
    Rational row = 0;
    for (int l = 0; l < K; ++l) {
      mpz_class pw;
      mpz_pow_ui(pw.get_mpz_t(), mpz_class(static_cast<long>(e[l])).get_mpz_t(), static_cast<unsigned long>(i));
      row += b[l] * pw;
    }
    if (row != (i == 0 ? -1 : 0)) {
      throw InternalError("b coefficients fail linear system row " + std::to_string(i) + ": " + row.get_str());
    }
  }
  return b;
}

// Re-expands 1 + X^{Nv} sum_l b_l X^{lv-u} in powers of (X - 1). The
// coefficients below degree K must vanish.
inline HBCoefficients hb_a_coefficients(int K, int N, int u, int v, std::vector<Rational> b) {
  detail::check_hb_params(K, N, u, v);
  if (b.size() != static_cast<std::size_t>(K)) throw DomainError("hb_a_coefficients: expected K values of b");
  const auto e = detail::hb_exponents(K, N, u, v);
  const int degree = static_cast<int>(e.back());
  HBCoefficients out{K, N, u, v, std::move(b), {}};
  for (int m = 0; m <= degree; ++m) {
    Rational am = m == 0 ? 1 : 0;
    for (int l = 0; l < K; ++l) am += out.b[l] * detail::binomial_int(e[l], m);
    if (m < K) {
      if (am != 0) throw InternalError("coefficient of (X-1)^" + std::to_string(m) + " is " + am.get_str());
    } else {
      out.a[m] = am;
    }
  }
  return out;
}

inline HBCoefficients hb_coefficients(int K, int N, int u, int v) {
  return hb_a_coefficients(K, N, u, v, hb_b_coefficients(K, N, u, v));
}

enum class HBSign { Positive, Negative };

namespace detail {

template <Scalar S>
void compare_tables(const std::vector<S>& lhs, const std::vector<S>& rhs, std::uint64_t x, IdentityReport& report) {
  if constexpr (is_exact_v<S>) {
    Rational worst = 0, diff;
    for (std::uint64_t n = 1; n <= x; ++n) {
      diff = abs(lhs[n] - rhs[n]);
      if (diff > worst) {
        worst = diff;
        report.worst_n = n;
      }
    }
    report.max_abs_deviation = worst.get_d();
    report.max_abs_deviation_exact = worst.get_str();
  } else {
    double worst = 0.0;
    for (std::uint64_t n = 1; n <= x; ++n) {
      const double diff = std::abs(lhs[n] - rhs[n]);
      if (diff > worst) {
        worst = diff;
        report.worst_n = n;
      }
    }
    report.max_abs_deviation = worst;
    report.max_abs_deviation_exact = "0";
  }
}

}  // namespace detail

// Verifies on [1, x]
//   positive: tau_{r+u/v} = sum_l (-b_l(N=0)) tau_{l+r} * G^{lv-u}
//   negative: tau_{-r+u/v} = sum_l (-b_l(N=r-1)) tau_{l-1} * G^{lv+(r-1)v-u}
// where G is tau_{-1/v} restricted to n <= x^{1/K}.
template <Scalar S>
IdentityReport hb_verify(int r, int u, int v, int K, std::uint64_t x, HBSign sign, unsigned threads = 1) {
  if (x < 2) throw DomainError("hb_verify: x must be at least 2");
  if (sign == HBSign::Positive && r < 0) throw DomainError("hb_verify: positive case needs r >= 0");
  if (sign == HBSign::Negative && r < 1) throw DomainError("hb_verify: negative case needs r >= 1");
  const int N = sign == HBSign::Positive ? 0 : r - 1;
  const auto b = hb_b_coefficients(K, N, u, v);
  const FactorTable table(x);

  IdentityReport report;
  report.identity = "heath-brown";
  report.params = {{"r", std::to_string(r)}, {"u", std::to_string(u)}, {"v", std::to_string(v)},
                   {"K", std::to_string(K)}, {"N", std::to_string(N)},
                   {"sign", sign == HBSign::Positive ? "pos" : "neg"}};
  report.x = x;
  report.mode = mode_of<S>();

  const std::uint64_t y = iroot(x, static_cast<unsigned>(K));
  if (y < 2) report.warnings.push_back("x^(1/K) < 2: restricted factor reduces to the unit");

  const Rational alpha = (sign == HBSign::Positive ? Rational(r) : Rational(-r)) + ZParam::rational(u, v).as_rational();
  const auto lhs = sieve_multiplicative<S>(FunctionSpec::tau_z(ZParam::rational(alpha)), x, table, threads).values;

  auto g = sieve_multiplicative<S>(FunctionSpec::tau_z(ZParam::rational(-1, v)), x, table, threads).values;
  for (std::uint64_t n = y + 1; n <= x; ++n) g[n] = from_int<S>(0);

  std::vector<S> rhs(x + 1, from_int<S>(0));
  std::vector<S> g_power(x + 1, from_int<S>(0));
  g_power[1] = from_int<S>(1);
  std::int64_t g_exp = 0;
  S scratch;
  for (int l = 1; l <= K; ++l) {
    const std::int64_t e = static_cast<std::int64_t>(l) * v + static_cast<std::int64_t>(N) * v - u;
    while (g_exp < e) {
      g_power = dirichlet_convolve_values(g, g_power, x, threads);
      ++g_exp;
    }
    const std::int64_t k = sign == HBSign::Positive ? l + r : l - 1;
    const auto tau = sieve_multiplicative<S>(FunctionSpec::tau_z(ZParam::rational(k)), x, table, threads).values;
    const auto term = dirichlet_convolve_values(tau, g_power, x, threads);
    const S c = from_rational<S>(-b[l - 1]);
    for (std::uint64_t n = 1; n <= x; ++n) {
      if (!is_zero(term[n])) multiply_add(rhs[n], c, term[n], scratch);
    }
    report.terms_evaluated += x;
  }
  detail::compare_tables(lhs, rhs, x, report);
  return report;
}

// c_l = (-1)^l sum_{l <= k < K} (-1)^k binom(z, k) binom(k, l), l = 0..K-1.
template <Scalar S>
std::vector<S> linnik_coefficients(const S& z, int K) {
  if (K < 1) throw DomainError("linnik_coefficients: K must be at least 1");
  std::vector<S> bz(K);
  for (int k = 0; k < K; ++k) bz[k] = binomial_z(z, static_cast<unsigned>(k));
  std::vector<S> c(K, from_int<S>(0));
  for (int l = 0; l < K; ++l) {
    for (int k = l; k < K; ++k) {
      const S term = bz[k] * from_rational<S>(detail::binomial_int(k, l));
      if ((k + l) % 2) {
        c[l] -= term;
      } else {
        c[l] += term;
      }
    }
  }
  return c;
}

// Verifies f^(*z)(n) = sum_l c_l sum_{n = n1 n2, P+(n1) <= x^{1/K}} f^(*(z-l))(n1) f^(*l)(n2)
// on [1, x]. The left side uses the closed form of f^(*z) when one exists.
template <Scalar S>
IdentityReport linnik_verify(const FunctionSpec& f, const ZParam& z, int K, std::uint64_t x, unsigned threads = 1) {
  if (x < 2) throw DomainError("linnik_verify: x must be at least 2");
  if (K < 1) throw DomainError("linnik_verify: K must be at least 1");
  const FactorTable table(x);
  const S zs = z.as<S>();

  IdentityReport report;
  report.identity = "linnik";
  report.params = {{"f", f.describe()}, {"z", z.str()}, {"K", std::to_string(K)}};
  report.x = x;
  report.mode = mode_of<S>();

  const std::uint64_t y = iroot(x, static_cast<unsigned>(K));
  if (y < 2) report.warnings.push_back("x^(1/K) < 2: friable factor reduces to the unit");

  std::vector<S> lhs;
  if (auto closed = z_fold_closed_form(f, z)) {
    lhs = sieve_multiplicative<S>(*closed, x, table, threads).values;
  } else {
    lhs = z_fold_values<S>(f, zs, x, table);
  }

  const auto lpf = largest_prime_factor_table(table, x);
  const auto c = linnik_coefficients(zs, K);
  std::vector<S> rhs(x + 1, from_int<S>(0));
  S scratch;
  for (int l = 0; l < K; ++l) {
    auto friable = z_fold_values<S>(f, zs - from_int<S>(l), x, table);
    for (std::uint64_t n = 2; n <= x; ++n) {
      if (lpf[n] > y) friable[n] = from_int<S>(0);
    }
    const auto rest = z_fold_values<S>(f, from_int<S>(l), x, table);
    const auto term = dirichlet_convolve_values(friable, rest, x, threads);
    for (std::uint64_t n = 1; n <= x; ++n) {
      if (!is_zero(term[n])) multiply_add(rhs[n], c[l], term[n], scratch);
    }
    report.terms_evaluated += x;
  }
  detail::compare_tables(lhs, rhs, x, report);
  return report;
}

struct FriableOutcome {
  enum class Kind { SigmaI, SigmaTriv, Split };
  Kind kind;
  std::uint64_t n1 = 0, n2 = 0;  // set for Split

  static FriableOutcome sigma_i() { return {Kind::SigmaI}; }
  static FriableOutcome sigma_triv() { return {Kind::SigmaTriv}; }
  static FriableOutcome split(std::uint64_t a, std::uint64_t b) { return {Kind::Split, a, b}; }
  friend bool operator==(const FriableOutcome&, const FriableOutcome&) = default;
};

inline std::string to_string(FriableOutcome::Kind k) {
  switch (k) {
    case FriableOutcome::Kind::SigmaI:
      return "sigma_i";
    case FriableOutcome::Kind::SigmaTriv:
      return "sigma_triv";
    case FriableOutcome::Kind::Split:
      return "split";
  }
  return "?";
}

// Classifies a y-friable n. Splits accumulate prime powers of n by increasing
// prime until the partial product exceeds w.
inline FriableOutcome friable_factorize(std::uint64_t n, std::uint64_t y, std::uint64_t w, const FactorTable& table) {
  if (y < 2 || w < 2) throw DomainError("friable_factorize: y and w must be at least 2");
  const auto fac = table.factorize(n);
  if (!fac.empty() && fac.back().p > y) {
    throw DomainError("friable_factorize: P+(" + std::to_string(n) + ") = " + std::to_string(fac.back().p) +
                      " exceeds y = " + std::to_string(y));
  }
  if (n <= w) return FriableOutcome::sigma_i();
  for (const auto& [p, nu] : fac) {
    if (ipow(p, nu) > y) return FriableOutcome::sigma_triv();
  }
  std::uint64_t n1 = 1;
  std::size_t used = 0;
  while (n1 <= w) n1 *= ipow(fac[used].p, fac[used].nu), ++used;
  const std::uint64_t n2 = n / n1;
  const std::uint64_t q_plus = ipow(fac[used - 1].p, fac[used - 1].nu);
  const std::uint64_t p_minus_n2 = used < fac.size() ? fac[used].p : UINT64_MAX;
  if (!(w < n1 && n1 <= w * q_plus && fac[used - 1].p < p_minus_n2 && std::gcd(n1, n2) == 1)) {
    throw InternalError("friable split of " + std::to_string(n) + " violates its defining inequalities");
  }
  return FriableOutcome::split(n1, n2);
}

template <Scalar S>
struct FriableReport {
  S sum_total, sum_i, sum_triv, residual;
  S split_mass;  // sum of f g over Split numbers
  std::uint64_t count_i = 0, count_triv = 0, count_split = 0;
  std::uint64_t max_n1 = 0;  // largest n1 seen, lies in (w, y w]
};

// Partitions sum_{n <= x, P+(n) <= y} f(n) g(n) by friable_factorize.
template <Scalar S>
FriableReport<S> friable_decomposition_report(const FunctionSpec& f, const std::vector<S>& g, std::uint64_t y,
                                              std::uint64_t w, std::uint64_t x) {
  if (g.size() < x + 1) throw DomainError("friable_decomposition_report: weights shorter than x");
  const FactorTable table(std::max<std::uint64_t>(x, 2));
  const auto fv = sieve_multiplicative<S>(f, x, table).values;
  const auto lpf = largest_prime_factor_table(table, x);
  CompensatedSum<S> total, in_i, in_triv, split;
  FriableReport<S> rep;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (lpf[n] > y) continue;
    const S t = fv[n] * g[n];
    total.add(t);
    const auto out = friable_factorize(n, y, w, table);
    switch (out.kind) {
      case FriableOutcome::Kind::SigmaI:
        in_i.add(t);
        ++rep.count_i;
        break;
      case FriableOutcome::Kind::SigmaTriv:
        in_triv.add(t);
        ++rep.count_triv;
        break;
      case FriableOutcome::Kind::Split:
        split.add(t);
        ++rep.count_split;
        rep.max_n1 = std::max(rep.max_n1, out.n1);
        break;
    }
  }
  rep.sum_total = total.value();
  rep.sum_i = in_i.value();
  rep.sum_triv = in_triv.value();
  rep.residual = rep.sum_total - rep.sum_i - rep.sum_triv;
  rep.split_mass = split.value();
  return rep;
}

}  // namespace divcorr
