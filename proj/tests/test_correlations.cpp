#include <gtest/gtest.h>

#include "divcorr/correlations.hpp"
#include "oracles.hpp"

using namespace divcorr;

namespace {

FunctionSpec one() { return FunctionSpec::tau_z(ZParam::rational(1)); }
FunctionSpec mu() { return FunctionSpec::tau_z(ZParam::rational(-1)); }

}  // namespace

TEST(DivisorCorrelation, HandValues) {
  EXPECT_EQ(divisor_correlation<Rational>(one(), 10, 1, 1), Rational(23));
  EXPECT_EQ(divisor_correlation<Rational>(one(), 1, 1, 1), Rational(0));
  EXPECT_EQ(divisor_correlation<Complex>(one(), 10, 1, 1), Complex(23, 0));
  EXPECT_THROW(divisor_correlation<Rational>(one(), 10, 1, 0), DomainError);
  EXPECT_THROW(divisor_correlation<Rational>(one(), 10, 0, 1), DomainError);
  EXPECT_THROW(divisor_correlation<Rational>(one(), std::uint64_t{1} << 33, 1, 1), ResourceError);
}

TEST(DivisorCorrelation, MoebiusAgainstDoubleLoop) {
  const std::uint64_t x = 10000;
  for (std::int64_t h : {1, -3, 6}) {
    for (std::uint64_t a : {1u, 3u}) {
      std::int64_t naive = 0;
      for (std::uint64_t n = 1; n <= x; ++n) {
        const std::int64_t m = static_cast<std::int64_t>(a * n) - h;
        if (static_cast<std::int64_t>(n * a) <= std::abs(h) || m < 1) continue;
        naive += oracle::moebius(n) * static_cast<std::int64_t>(oracle::divisor_count(static_cast<std::uint64_t>(m)));
      }
      EXPECT_EQ(divisor_correlation<Rational>(mu(), x, a, h), Rational(naive)) << h << " " << a;
    }
  }
}

TEST(DivisorCorrelation, Linearity) {
  const std::uint64_t x = 3000;
  const FactorTable t(x + 10);
  const auto tau = divisor_count_table(t, x + 10);
  const auto f = sieve_multiplicative<Rational>(FunctionSpec::tau_z(ZParam::rational(1, 2)), x, t).values;
  const auto g = sieve_multiplicative<Rational>(FunctionSpec::two_squares(), x, t).values;
  const Rational alpha(3, 7), beta(-5, 2);
  std::vector<Rational> mix(x + 1);
  for (std::uint64_t n = 1; n <= x; ++n) mix[n] = alpha * f[n] + beta * g[n];
  EXPECT_EQ(correlation_sum(mix, x, 1, 2, tau),
            alpha * correlation_sum(f, x, 1, 2, tau) + beta * correlation_sum(g, x, 1, 2, tau));
}

TEST(DivisorCorrelation, ThreadInvariant) {
  const auto f = FunctionSpec::tau_z(ZParam::complex(0.4, 0.9));
  const Complex a = divisor_correlation<Complex>(f, 200000, 2, 3, 1);
  const Complex b = divisor_correlation<Complex>(f, 200000, 2, 3, 8);
  EXPECT_EQ(a, b);
}

TEST(TildeTau, HandValues) {
  const CharacterPool pool(10);
  EXPECT_NEAR(tilde_tau(3, 1, 2, pool), 2.0, 1e-12);
  EXPECT_NEAR(tilde_tau(11, 1, 1, pool), 5.0, 1e-12);
  EXPECT_NEAR(tilde_tau(11, 1, 4, pool), 4.0, 1e-12);
  EXPECT_NEAR(delta_h(11, 1, 4, pool), 0.0, 1e-12);
  EXPECT_NEAR(delta_h(10, 1, 4, pool), -1.0, 1e-12);
  EXPECT_NEAR(delta_h(11, 1, 1, pool), -1.0, 1e-12);
  EXPECT_THROW(tilde_tau(3, 3, 2, pool), DomainError);
  EXPECT_THROW(tilde_tau(200, 1, 20, pool), DomainError);
}

TEST(TildeTau, KernelExactness) {
  const CharacterPool pool(80);
  for (std::int64_t h : {1, -1, 2, -2, 3}) {
    for (std::int64_t n = 1; n <= 5000; ++n) {
      if (n - h < 1) continue;
      const auto N = static_cast<std::uint64_t>(n - h);
      const std::uint64_t R = isqrt(N) + (is_perfect_square(N) ? 0 : 1) + 1;
      const Complex t = tilde_tau_complex(n, h, R, pool);
      ASSERT_LT(std::abs(t.imag()), 1e-9);
      if (!is_perfect_square(N)) {
        ASSERT_NEAR(t.real(), static_cast<double>(oracle::divisor_count(N)), 1e-9) << n << " " << h;
      }
    }
  }
}

TEST(TildeTau, ImaginaryPartVanishesForSmallR) {
  const CharacterPool pool(12);
  for (std::int64_t n = 5; n <= 1500; n += 7) {
    for (std::uint64_t R : {1u, 3u, 5u, 12u}) EXPECT_LT(std::abs(tilde_tau_complex(n, 2, R, pool).imag()), 1e-9);
  }
}

TEST(TildeTau, ResidueWeightsMatchPointwise) {
  const CharacterPool pool(9);
  for (std::uint64_t q = 1; q <= 40; ++q) EXPECT_EQ(kernel_residue_weights(q, -2, 9, pool).size(), q);
  for (std::int64_t n = 10; n <= 400; ++n) {
    double s = 0;
    for (std::uint64_t q = 1; q * q <= static_cast<std::uint64_t>(n + 2); ++q) s += kernel_residue_weights(q, -2, 9, pool)[n % q];
    ASSERT_NEAR(2 * s, tilde_tau(n, -2, 9, pool), 1e-9);
  }
}

TEST(SigmaF, VanishesForLargeR) {
  // n - 2 runs over 29..32, with no squares, and R = 10 exceeds every sqrt(n - 2).
  EXPECT_NEAR(std::abs(sigma_f<Complex>(one(), 30, 34, 1, 2, 10)), 0.0, 1e-9);
  EXPECT_EQ(sigma_f<Rational>(one(), 30, 34, 1, 2, 10), Rational(0));
}

TEST(SigmaF, SmallIntervalByDefinition) {
  const CharacterPool pool(4);
  double expect = 0;
  for (std::int64_t n = 6; n <= 10; ++n) expect += delta_h(n, 1, 1, pool);
  EXPECT_NEAR(sigma_f<Complex>(one(), 5, 10, 1, 1, 1).real(), expect, 1e-12);
  EXPECT_EQ(sigma_f<Rational>(one(), 5, 10, 1, 1, 1).get_d(), expect);
}

TEST(SigmaF, MatchesPointwiseDelta) {
  const std::uint64_t lo = 400, hi = 900;
  const CharacterPool pool(7);
  const FactorTable t(hi);
  const auto f = sieve_multiplicative<Rational>(FunctionSpec::zpow_omega(ZParam::rational(-2, 3)), hi, t).values;
  for (std::uint64_t a : {1u, 2u}) {
    for (std::int64_t h : {1, -3}) {
      for (std::uint64_t R : {1u, 4u, 7u}) {
        double expect = 0;
        for (std::uint64_t n = lo + 1; n <= hi; ++n) {
          expect += f[n].get_d() * delta_h(static_cast<std::int64_t>(a * n), h, R, pool);
        }
        const Rational exact = sigma_f<Rational>(FunctionSpec::zpow_omega(ZParam::rational(-2, 3)), lo, hi, a, h, R);
        const Complex flt = sigma_f<Complex>(FunctionSpec::zpow_omega(ZParam::rational(-2, 3)), lo, hi, a, h, R, 3);
        EXPECT_NEAR(exact.get_d(), expect, 1e-7);
        EXPECT_NEAR(flt.real(), expect, 1e-7);
      }
    }
  }
}

TEST(SigmaF, Errors) {
  EXPECT_THROW(sigma_f<Complex>(one(), 10, 10, 1, 1, 2), DomainError);
  EXPECT_THROW(sigma_f<Complex>(one(), 0, 10, 1, 1, 2), DomainError);
  EXPECT_THROW(sigma_f<Complex>(one(), 5, 10, 1, 1, 0), DomainError);
}

TEST(MainTerm, HandValue) {
  const auto m = main_term<Rational>(one(), 10, 1, 1, 1);
  EXPECT_EQ(m.value, Rational(27));
  ASSERT_EQ(m.partials.size(), 1u);
}

TEST(MainTerm, ShiftOneSpecialization) {
  const auto chi4 = character_group(4)[1];
  const std::vector<std::pair<FunctionSpec, std::uint64_t>> cases = {
      {one(), 1},
      {mu(), 1},
      {FunctionSpec::two_squares(), 4},
      {FunctionSpec::tau_z_twisted(ZParam::rational(1, 2), chi4), 4},
      {FunctionSpec::zpow_omega(ZParam::rational(3)), 12},
  };
  for (const auto& [f, D] : cases) {
    EXPECT_EQ(main_term<Rational>(f, 3000, 1, 1, D).value, main_term_shift1<Rational>(f, 3000, D)) << f.describe();
  }
}

TEST(MainTerm, ThreadInvariantAndModes) {
  const auto f = FunctionSpec::two_squares();
  const auto a = main_term<Complex>(f, 50000, 3, -2, 4, 1);
  const auto b = main_term<Complex>(f, 50000, 3, -2, 4, 5);
  EXPECT_EQ(a.value, b.value);
  const auto e = main_term<Rational>(f, 2000, 3, -2, 4);
  const auto g = main_term<Complex>(f, 2000, 3, -2, 4);
  EXPECT_NEAR(e.value.get_d(), g.value.real(), 1e-8);
}

TEST(MainTerm, TwoSquaresBothCharactersContribute) {
  const auto m = main_term<Complex>(FunctionSpec::two_squares(), 20000, 1, 1, 4);
  ASSERT_EQ(m.partials.size(), 2u);
  for (const auto& [chi, v] : m.partials) EXPECT_GT(std::abs(v), 1.0) << chi.label();
}

TEST(MainTerm, Errors) {
  EXPECT_THROW(main_term<Complex>(FunctionSpec::two_squares(), 100, 1, 1, 2), DomainError);
  EXPECT_THROW(main_term<Complex>(one(), 100, 1, 0, 1), DomainError);
  EXPECT_THROW(main_term<Complex>(one(), 100, 1, 1, 0), DomainError);
}

TEST(MainTerm, ApproximatesCorrelation) {
  const std::uint64_t x = 100000;
  const Complex d = divisor_correlation<Complex>(one(), x, 1, 1);
  const Complex m = main_term<Complex>(one(), x, 1, 1, 1).value;
  EXPECT_LT(std::abs(d - m) / static_cast<double>(x), 0.01);
}

TEST(OmegaCorrelation, HandValueAndPartition) {
  EXPECT_EQ(correlation_by_omega<Rational>(10, 1, 1), Rational(18));
  const std::uint64_t x = 1000;
  for (std::int64_t h : {1, -2}) {
    Rational total = 0;
    for (unsigned k = 0; k <= 6; ++k) total += correlation_by_omega<Rational>(x, h, k);
    EXPECT_EQ(total, divisor_correlation<Rational>(one(), x, 1, h));
  }
}

TEST(OmegaCorrelation, XiPolynomialCoherence) {
  const std::uint64_t x = 1000;
  EXPECT_EQ(xi_polynomial<Rational>(x, 1, Rational(1)), divisor_correlation<Rational>(one(), x, 1, 1));
  for (const Rational& z : {Rational(-1), Rational(1, 2), Rational(2)}) {
    Rational expect = 0, zk = 1;
    for (unsigned k = 0; k <= 6; ++k, zk *= z) expect += zk * correlation_by_omega<Rational>(x, 1, k);
    EXPECT_EQ(xi_polynomial<Rational>(x, 1, z), expect);
    EXPECT_EQ(xi_polynomial<Rational>(x, 1, z),
              divisor_correlation<Rational>(FunctionSpec::zpow_omega(ZParam::rational(z)), x, 1, 1));
  }
}

TEST(BChi, Examples) {
  const auto d1 = b_chi_parameters<Rational>({{0, Rational(5, 3)}}, 1);
  ASSERT_EQ(d1.size(), 1u);
  EXPECT_EQ(d1[0].second, Rational(5, 3));
  const auto d4 = b_chi_parameters<Rational>({{1, Rational(1)}, {3, Rational(0)}}, 4);
  ASSERT_EQ(d4.size(), 2u);
  EXPECT_EQ(d4[0].second, Rational(1, 2));
  EXPECT_EQ(d4[1].second, Rational(1, 2));
  EXPECT_THROW(b_chi_parameters<Rational>({{1, Rational(1)}}, 4), DomainError);
  EXPECT_THROW(b_chi_parameters<Rational>({{1, Rational(1)}, {2, Rational(1)}, {3, Rational(1)}}, 4), DomainError);
}

TEST(BChi, ReconstructionRandom) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::uint64_t, Rational> v;
    for (std::uint64_t r : {1u, 3u, 5u, 7u}) v[r] = Rational(rng.uniform(-20, 20), rng.uniform(1, 9));
    for (auto& [r, q] : v) q.canonicalize();
    const auto b = b_chi_parameters<Rational>(v, 8);
    for (const auto& [r, val] : v) {
      Rational back = 0;
      for (const auto& [chi, bc] : b) back += bc * char_value<Rational>(chi, static_cast<std::int64_t>(r));
      EXPECT_EQ(back, val);
    }
  }
  std::map<std::uint64_t, Complex> v7;
  for (std::uint64_t r = 1; r < 7; ++r) v7[r] = Complex(rng.real(-1, 1), rng.real(-1, 1));
  EXPECT_EQ(b_chi_parameters<Complex>(v7, 7).size(), 6u);
}
