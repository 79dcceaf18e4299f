#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "divcorr/asymptotics.hpp"
#include "divcorr/correlations.hpp"
#include "oracles.hpp"

using namespace divcorr;

namespace {

// Euler-Maclaurin with N terms and corrections through B_6.
double zeta_em(double s, int N) {
  double sum = 0.0;
  for (int n = N - 1; n >= 1; --n) sum += std::pow(n, -s);
  const double Nd = N;
  sum += std::pow(Nd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Nd, -s);
  sum += s * std::pow(Nd, -s - 1.0) / 12.0;
  sum -= s * (s + 1.0) * (s + 2.0) * std::pow(Nd, -s - 3.0) / 720.0;
  sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * std::pow(Nd, -s - 5.0) / 30240.0;
  return sum;
}

double gamma_em(int N) {
  double h = 0.0;
  for (int n = N; n >= 1; --n) h += 1.0 / n;
  const double Nd = N;
  return h - std::log(Nd) - 1.0 / (2.0 * Nd) + 1.0 / (12.0 * Nd * Nd) - 1.0 / (120.0 * std::pow(Nd, 4)) +
         1.0 / (252.0 * std::pow(Nd, 6));
}

std::vector<std::uint64_t> primes_oracle(std::uint64_t P) {
  const auto is_prime = oracle::eratosthenes(P);
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p <= P; ++p) {
    if (is_prime[p]) out.push_back(p);
  }
  return out;
}

double tau_z_pp(double z, unsigned a) {
  double t = 1.0;
  for (unsigned i = 0; i < a; ++i) t *= (z + i) / (i + 1.0);
  return t;
}

// Local factor as (1 - 1/p)^z E[tau_z(p^v(n)) (v(n - h) + 1)] over p-adic n.
double local_factor_oracle(double z, double p, unsigned l) {
  const double q = 1.0 - 1.0 / p;
  double mean = 0.0, head = 0.0, pa = 1.0;
  for (unsigned a = 0; a <= l; ++a, pa *= p) {
    const double g = a < l ? a + 1.0 : l + 1.0 + p / ((p - 1.0) * (p - 1.0));
    mean += q / pa * tau_z_pp(z, a) * g;
    head += tau_z_pp(z, a) / pa;
  }
  mean += q * (l + 1.0) * (std::pow(q, -z) - head);
  return std::pow(q, z) * mean;
}

double lambda_oracle(double z, std::int64_t h, std::uint64_t P) {
  double prod = 1.0;
  const std::uint64_t habs = h < 0 ? -h : h;
  for (const auto p : primes_oracle(P)) {
    unsigned l = 0;
    for (std::uint64_t m = habs; m % p == 0; m /= p) ++l;
    prod *= local_factor_oracle(z, static_cast<double>(p), l);
  }
  return prod / std::tgamma(z);
}

double sigma_minus1(std::uint64_t h) {
  double s = 0.0;
  for (std::uint64_t d = 1; d <= h; ++d) {
    if (h % d == 0) s += 1.0 / d;
  }
  return s;
}

}  // namespace

TEST(Constants, MatchEulerMaclaurin) {
  EXPECT_NEAR(constants::zeta2, zeta_em(2.0, 50), 1e-15);
  EXPECT_NEAR(constants::zeta3, zeta_em(3.0, 50), 1e-15);
  EXPECT_NEAR(constants::zeta6, zeta_em(6.0, 50), 1e-15);
  EXPECT_NEAR(constants::euler_gamma, gamma_em(50), 2e-15);
  EXPECT_NEAR(constants::zeta2, std::numbers::pi * std::numbers::pi / 6.0, 1e-15);
}

TEST(ReciprocalGamma, Factorials) {
  double fact = 1.0;
  for (int n = 1; n <= 12; ++n) {
    const Complex v = reciprocal_gamma(Complex(n, 0.0));
    EXPECT_NEAR(v.real() * fact, 1.0, 1e-13) << n;
    EXPECT_EQ(v.imag(), 0.0);
    fact *= n;
  }
}

TEST(ReciprocalGamma, ExactZerosAtNonPositiveIntegers) {
  for (int n = 0; n >= -12; --n) EXPECT_EQ(reciprocal_gamma(Complex(n, 0.0)), Complex(0.0, 0.0));
}

TEST(ReciprocalGamma, KnownValues) {
  EXPECT_NEAR(reciprocal_gamma(0.5).real(), 1.0 / std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_NEAR(reciprocal_gamma(-0.5).real(), -0.5 / std::sqrt(std::numbers::pi), 1e-14);
  // Gamma(1 + i) = 0.49801566811835604 - 0.15494982830181069 i
  const Complex g = 1.0 / reciprocal_gamma(Complex(1.0, 1.0));
  EXPECT_NEAR(g.real(), 0.49801566811835604, 1e-13);
  EXPECT_NEAR(g.imag(), -0.15494982830181069, 1e-13);
}

TEST(ReciprocalGamma, RealGridAgainstTgamma) {
  oracle::Rng rng(101);
  for (int i = 0; i < 500; ++i) {
    const double x = rng.real(-9.9, 10.0);
    if (std::abs(x - std::round(x)) < 1e-3) continue;
    const double expect = 1.0 / std::tgamma(x);
    EXPECT_NEAR(reciprocal_gamma(x).real(), expect, 1e-12 * std::max(1.0, std::abs(expect))) << x;
  }
}

TEST(ReciprocalGamma, ComplexRecurrence) {
  oracle::Rng rng(102);
  for (int i = 0; i < 500; ++i) {
    const Complex z(rng.real(-9.0, 9.0), rng.real(-6.0, 6.0));
    if (std::abs(z) > 9.0) continue;
    const Complex lhs = reciprocal_gamma(z);
    const Complex rhs = z * reciprocal_gamma(z + 1.0);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs))) << z;
  }
}

TEST(Lambda, EqualsOneAtZOne) {
  for (std::int64_t h = 1; h <= 60; ++h) {
    const auto v = lambda_h0(ZParam::rational(1), h, 1000);
    EXPECT_NEAR(v.value.real(), 1.0, 1e-12) << h;
    EXPECT_EQ(v.tail_bound, 0.0);
  }
  EXPECT_NEAR(lambda_h0(ZParam::rational(1), -12, 1000).value.real(), 1.0, 1e-12);
}

TEST(Lambda, VanishesAtZeroAndMinusOne) {
  for (std::int64_t h : {1, 2, 6, 30}) {
    EXPECT_EQ(lambda_h0(ZParam::rational(0), h, 1000).value, Complex(0.0, 0.0));
    EXPECT_EQ(lambda_h0(ZParam::rational(-1), h, 1000).value, Complex(0.0, 0.0));
  }
}

TEST(Lambda, InghamAtZTwo) {
  const std::uint64_t P = 100000;
  for (std::int64_t h = 1; h <= 40; ++h) {
    const auto v = lambda_h0(ZParam::rational(2), h, P);
    const double expect = 6.0 / (std::numbers::pi * std::numbers::pi) * sigma_minus1(h);
    EXPECT_LE(std::abs(v.value.real() - expect), v.tail_bound + 1e-12) << h;
    EXPECT_GT(v.tail_bound, 0.0);
  }
}

TEST(Lambda, AgreesWithLocalDensityOracle) {
  const std::uint64_t P = 5000;
  for (double z : {3.0, 0.5, 2.5, -0.5, 1.5}) {
    for (std::int64_t h : {1, 2, 12, 360, -6, 97}) {
      const int num = static_cast<int>(std::lround(z * 2));
      const auto v = lambda_h0(ZParam::rational(num, 2), h, P);
      const double expect = lambda_oracle(z, h, P);
      EXPECT_NEAR(v.value.real(), expect, 1e-11 * std::max(1.0, std::abs(expect))) << z << " " << h;
      EXPECT_NEAR(v.value.imag(), 0.0, 1e-15);
    }
  }
}

TEST(Lambda, CubeProductAtHOne) {
  const std::uint64_t P = 20000;
  double prod = 1.0;
  for (const auto p : primes_oracle(P)) {
    const double pd = static_cast<double>(p);
    prod *= 1.0 - 2.0 / (pd * pd) + 1.0 / (pd * pd * pd);
  }
  EXPECT_NEAR(lambda_h0(ZParam::rational(3), 1, P).value.real(), prod / 2.0, 1e-13);
}

TEST(Lambda, TailBoundCoversLongerProduct) {
  for (const auto& z : {ZParam::rational(3), ZParam::rational(1, 2), ZParam::complex(2.0, 1.0)}) {
    const auto coarse = lambda_h0(z, 6, 1000);
    const auto fine = lambda_h0(z, 6, 200000);
    EXPECT_LE(std::abs(coarse.value - fine.value), coarse.tail_bound) << z.str();
    EXPECT_LT(fine.tail_bound, coarse.tail_bound);
  }
}

TEST(Lambda, RejectsSmallCutoff) {
  EXPECT_THROW(lambda_h0(ZParam::rational(2), 1, 50), DomainError);
  EXPECT_THROW(lambda_h0(ZParam::rational(2), 2 * 1009, 1000), DomainError);
  EXPECT_NO_THROW(lambda_h0(ZParam::rational(2), 2 * 1009, 1009));
  EXPECT_THROW(lambda_h0(ZParam::rational(2), 0, 1000), DomainError);
}

TEST(Titchmarsh, ShiftOneValue) {
  const auto c = titchmarsh_constants(1, 1000);
  EXPECT_NEAR(c.c_h.value.real(), 1.9435964368207592, 1e-13);
  EXPECT_EQ(c.c_h.tail_bound, 0.0);
}

TEST(Titchmarsh, LocalFactors) {
  const double c1 = titchmarsh_constants(1, 1000).c_h.value.real();
  EXPECT_NEAR(titchmarsh_constants(2, 1000).c_h.value.real(), c1 / 3.0, 1e-14);
  EXPECT_NEAR(titchmarsh_constants(4, 1000).c_h.value.real(), c1 / 3.0, 1e-14);
  EXPECT_NEAR(titchmarsh_constants(-4, 1000).c_h.value.real(), c1 / 3.0, 1e-14);
  EXPECT_NEAR(titchmarsh_constants(6, 1000).c_h.value.real(), c1 / 3.0 * (1.0 - 3.0 / 7.0), 1e-14);
}

TEST(Titchmarsh, PrimeConstantTailBound) {
  for (std::int64_t h : {1, 2, 6, 30}) {
    const auto coarse = titchmarsh_constants(h, 1000).c_h_prime;
    const auto fine = titchmarsh_constants(h, 1000000).c_h_prime;
    EXPECT_LE(std::abs(coarse.value - fine.value), coarse.tail_bound) << h;
    EXPECT_LT(fine.tail_bound, coarse.tail_bound);
  }
}

TEST(OmegaK, FactorialScaling) {
  const double c6 = titchmarsh_constants(6, 1000).c_h.value.real();
  EXPECT_NEAR(omega_k_coefficient(6, 1, 1000).value.real(), c6, 1e-14);
  EXPECT_NEAR(omega_k_coefficient(6, 2, 1000).value.real(), c6, 1e-14);
  EXPECT_NEAR(omega_k_coefficient(6, 4, 1000).value.real(), c6 / 6.0, 1e-14);
  EXPECT_THROW(omega_k_coefficient(6, 0, 1000), DomainError);
}

TEST(TwoSquares, LandauRamanujan) {
  const auto b = landau_ramanujan(1000000);
  EXPECT_NEAR(b.value.real(), 0.7642236535, 1e-6);
  const auto fine = landau_ramanujan(10000000);
  EXPECT_LE(std::abs(b.value - fine.value), b.tail_bound);
  EXPECT_NEAR(fine.value.real(), 0.76422365358922066, 1e-7);
}

TEST(TwoSquares, MonotoneTruncation) {
  double prev = 0.0;
  for (std::uint64_t P : {100, 1000, 10000, 100000}) {
    const auto b = landau_ramanujan(P);
    EXPECT_GT(b.value.real(), prev);
    prev = b.value.real();
    EXPECT_LE(landau_ramanujan(1000000).value.real(), b.value.real() + b.tail_bound) << P;
  }
}

TEST(TwoSquares, ShiftOneProduct) {
  const std::uint64_t P = 100000;
  double prod = 1.0;
  for (const auto p : primes_oracle(P)) {
    if (p % 4 != 3) continue;
    const double pd = static_cast<double>(p);
    prod *= (1.0 + 1.0 / (pd * pd)) / std::sqrt(1.0 - 1.0 / (pd * pd));
  }
  const auto v = two_squares_coeff(1, P);
  EXPECT_NEAR(v.value.real(), 1.25 * prod / std::numbers::sqrt2, 1e-12);
}

TEST(TwoSquares, LocalFactors) {
  const std::uint64_t P = 1000;
  const double base = two_squares_coeff(1, P).value.real() / 1.25;
  // h = 3: chi_4(3) = -1, factor (1 - 1/4 - 1/12).
  EXPECT_NEAR(two_squares_coeff(3, P).value.real(), base * 0.75 * (1.0 - 0.25 - 1.0 / 12.0), 1e-13);
  // h = 2: h° = 2, h* = 1.
  EXPECT_NEAR(two_squares_coeff(2, P).value.real(), base * (1.0 + 1.0 / 8.0), 1e-13);
  // h = 9: factor (1 - 1/4 + 1/36).
  EXPECT_NEAR(two_squares_coeff(9, P).value.real(), base * 1.25 * (0.75 + 1.0 / 36.0), 1e-13);
  // h = -1: chi_4(-1) = -1.
  EXPECT_NEAR(two_squares_coeff(-1, P).value.real(), base * 0.75, 1e-13);
}

TEST(Consistency, DivisorSumRatioApproachesLambda) {
  const auto f = FunctionSpec::tau_z(ZParam::rational(1));
  const double lam = lambda_h0(ZParam::rational(1), 1, 1000).value.real();
  double prev_gap = INFINITY;
  for (std::uint64_t x : {10000, 100000, 1000000}) {
    const Complex d = divisor_correlation<Complex>(f, x, 1, 1, 1);
    const double ratio = d.real() / (static_cast<double>(x) * std::log(static_cast<double>(x)));
    const double gap = std::abs(ratio - lam);
    EXPECT_LT(gap, prev_gap) << x;
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 0.02);
}
