#pragma once

// Dirichlet characters stored as discrete-log tables: value(n) = e(log[n mod q] / order),
// with log = -1 marking residues that share a factor with the modulus (value 0).

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "divcorr/arith.hpp"
#include "divcorr/error.hpp"
#include "divcorr/scalar.hpp"

namespace divcorr {

class DirichletCharacter {
 public:
  DirichletCharacter(std::uint64_t modulus, std::uint64_t conductor, std::uint32_t order, std::uint64_t index,
                     std::vector<std::int32_t> logs)
      : modulus_(modulus), conductor_(conductor), order_(order), index_(index),
        logs_(std::make_shared<const std::vector<std::int32_t>>(std::move(logs))),
        roots_(root_table(order)) {}

  std::uint64_t modulus() const noexcept { return modulus_; }
  std::uint64_t conductor() const noexcept { return conductor_; }
  bool is_primitive() const noexcept { return conductor_ == modulus_; }
  std::uint64_t index() const noexcept { return index_; }
  // Values are order-th roots of unity.
  std::uint32_t order() const noexcept { return order_; }

  // Exponent k with value e(k / order), or -1 when gcd(n, q) > 1.
  std::int32_t log_at(std::int64_t n) const { return (*logs_)[mod_floor(n, modulus_)]; }

  Complex value(std::int64_t n) const {
    const auto k = log_at(n);
    return k < 0 ? Complex{} : (*roots_)[static_cast<std::size_t>(k)];
  }

  // e(k / order) for an arbitrary exponent.
  Complex root(std::int64_t k) const { return (*roots_)[mod_floor(k, order_)]; }

  bool is_principal() const {
    for (auto k : *logs_) {
      if (k > 0) return false;
    }
    return true;
  }

  bool is_real() const {
    for (auto k : *logs_) {
      if (k > 0 && (2 * static_cast<std::int64_t>(k)) % order_ != 0) return false;
    }
    return true;
  }

  std::string label() const { return std::to_string(modulus_) + "." + std::to_string(index_); }

  friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
    if (a.modulus_ != b.modulus_) return false;
    for (std::uint64_t r = 0; r < a.modulus_; ++r) {
      const auto ka = (*a.logs_)[r], kb = (*b.logs_)[r];
      if ((ka < 0) != (kb < 0)) return false;
      if (ka >= 0 && static_cast<std::uint64_t>(ka) * b.order_ != static_cast<std::uint64_t>(kb) * a.order_) {
        return false;
      }
    }
    return true;
  }

 private:
  static std::shared_ptr<const std::vector<Complex>> root_table(std::uint32_t order) {
    std::vector<Complex> roots(order);
    for (std::uint32_t k = 0; k < order; ++k) {
      // Exact values at the quarter turns keep real characters exactly +-1.
      if ((4 * static_cast<std::uint64_t>(k)) % order == 0) {
        static const Complex quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        roots[k] = quarter[(4 * static_cast<std::uint64_t>(k)) / order];
      } else {
        const double t = 2.0 * std::numbers::pi * k / order;
        roots[k] = {std::cos(t), std::sin(t)};
      }
    }
    return std::make_shared<const std::vector<Complex>>(std::move(roots));
  }

  std::uint64_t modulus_, conductor_;
  std::uint32_t order_;
  std::uint64_t index_;
  std::shared_ptr<const std::vector<std::int32_t>> logs_;
  std::shared_ptr<const std::vector<Complex>> roots_;
};

// chi(n) as a scalar. Exact mode only admits real characters.
template <Scalar S>
S char_value(const DirichletCharacter& chi, std::int64_t n) {
  if constexpr (is_exact_v<S>) {
    const auto k = chi.log_at(n);
    if (k < 0) return Rational(0);
    if (k == 0) return Rational(1);
    if (2 * static_cast<std::int64_t>(k) == chi.order()) return Rational(-1);
    throw ModeError("character " + chi.label() + " takes non-real values; exact mode unavailable");
  } else {
    return chi.value(n);
  }
}

class CharGroup {
 public:
  CharGroup(std::uint64_t modulus, std::vector<DirichletCharacter> chars)
      : modulus_(modulus), chars_(std::move(chars)) {}

  std::uint64_t modulus() const noexcept { return modulus_; }
  std::size_t size() const noexcept { return chars_.size(); }
  const DirichletCharacter& operator[](std::size_t i) const { return chars_[i]; }
  const DirichletCharacter& principal() const { return chars_.front(); }
  auto begin() const { return chars_.begin(); }
  auto end() const { return chars_.end(); }

 private:
  std::uint64_t modulus_;
  std::vector<DirichletCharacter> chars_;
};

namespace detail {

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 r = 1 % m, x = b % m;
  while (e) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(r);
}

inline std::uint64_t primitive_root_mod_prime(std::uint64_t p) {
  if (p == 2) return 1;
  const auto f = factorize_trial(p - 1);
  for (std::uint64_t g = 2;; ++g) {
    bool ok = true;
    for (const auto& pp : f) {
      if (pow_mod(g, (p - 1) / pp.p, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
}

// Unit group of (Z / p^e Z): generator orders and the exponent vector of every residue.
struct UnitComponent {
  std::uint64_t p;
  unsigned e;
  std::uint64_t pe;
  std::vector<std::uint64_t> gen_orders;
  std::vector<std::vector<std::uint32_t>> exps;  // exps[residue][generator]

  static UnitComponent build(std::uint64_t p, unsigned e) {
    UnitComponent c{p, e, ipow(p, e), {}, {}};
    c.exps.assign(c.pe, {});
    if (p != 2) {
      std::uint64_t g = primitive_root_mod_prime(p);
      if (e >= 2 && pow_mod(g, p - 1, p * p) == 1) g += p;
      const std::uint64_t ord = c.pe / p * (p - 1);
      c.gen_orders = {ord};
      std::uint64_t x = 1;
      for (std::uint64_t k = 0; k < ord; ++k) {
        c.exps[x] = {static_cast<std::uint32_t>(k)};
        x = x * g % c.pe;
      }
    } else if (e == 2) {
      c.gen_orders = {2};
      c.exps[1] = {0};
      c.exps[3] = {1};
    } else if (e >= 3) {
      // (Z / 2^e)^x = <-1> x <5>
      const std::uint64_t ord5 = c.pe / 4;
      c.gen_orders = {2, ord5};
      for (std::uint32_t a = 0; a < 2; ++a) {
        std::uint64_t x = a ? c.pe - 1 : 1;
        for (std::uint64_t b = 0; b < ord5; ++b) {
          c.exps[x] = {a, static_cast<std::uint32_t>(b)};
          x = x * 5 % c.pe;
        }
      }
    } else {
      c.exps[1] = {};
    }
    return c;
  }

  // Conductor of the component character with generator exponents js.
  std::uint64_t conductor(const std::vector<std::uint64_t>& js) const {
    auto valuation = [](std::uint64_t v, std::uint64_t q) {
      unsigned s = 0;
      while (v % q == 0) v /= q, ++s;
      return s;
    };
    if (p != 2) {
      if (js[0] == 0) return 1;
      return ipow(p, e - std::min(valuation(js[0], p), e - 1));
    }
    if (e == 1) return 1;
    if (e == 2) return js[0] ? 4 : 1;
    if (js[1] == 0) return js[0] ? 4 : 1;
    return ipow(2, e - valuation(js[1], 2));
  }
};

}  // namespace detail

inline CharGroup character_group(std::uint64_t q) {
  if (q == 0) throw DomainError("character_group: modulus must be positive");
  std::vector<detail::UnitComponent> comps;
  for (const auto& [p, nu] : factorize_trial(q)) comps.push_back(detail::UnitComponent::build(p, nu));

  // Flattened generator list: (component, slot, order).
  struct Gen {
    std::size_t comp, slot;
    std::uint64_t order;
  };
  std::vector<Gen> gens;
  std::uint64_t lambda = 1, group_size = 1;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t s = 0; s < comps[c].gen_orders.size(); ++s) {
      const auto o = comps[c].gen_orders[s];
      gens.push_back({c, s, o});
      lambda = std::lcm(lambda, o);
      group_size *= o;
    }
  }

  // Exponent vector of every residue mod q (empty when not a unit).
  std::vector<std::vector<std::uint64_t>> residue_exps(q);
  for (std::uint64_t a = 0; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    auto& v = residue_exps[a];
    for (const auto& g : gens) v.push_back(comps[g.comp].exps[a % comps[g.comp].pe][g.slot]);
  }

  std::vector<DirichletCharacter> chars;
  chars.reserve(group_size);
  std::vector<std::uint64_t> js(gens.size(), 0);
  for (std::uint64_t idx = 0; idx < group_size; ++idx) {
    std::uint64_t rest = idx;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      js[i] = rest % gens[i].order;
      rest /= gens[i].order;
    }
    std::vector<std::int32_t> logs(q, -1);
    for (std::uint64_t a = 0; a < q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      std::uint64_t k = 0;
      for (std::size_t i = 0; i < gens.size(); ++i) {
        k = (k + js[i] % gens[i].order * residue_exps[a][i] % lambda * (lambda / gens[i].order)) % lambda;
      }
      logs[a] = static_cast<std::int32_t>(k);
    }
    std::uint64_t cond = 1;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      std::vector<std::uint64_t> local;
      for (std::size_t i = 0; i < gens.size(); ++i) {
        if (gens[i].comp == c) local.push_back(js[i]);
      }
      cond *= comps[c].conductor(local);
    }
    chars.emplace_back(q, cond, static_cast<std::uint32_t>(lambda), idx, std::move(logs));
  }
  return CharGroup(q, std::move(chars));
}

// All primitive characters of conductor f <= R, sorted by (conductor, index).
inline std::vector<DirichletCharacter> primitive_characters_up_to(std::uint64_t R) {
  if (R == 0) throw DomainError("primitive_characters_up_to: R must be positive");
  std::vector<DirichletCharacter> out;
  for (std::uint64_t f = 1; f <= R; ++f) {
    for (const auto& chi : character_group(f)) {
      if (chi.is_primitive()) out.push_back(chi);
    }
  }
  return out;
}

// Primitive characters with conductor dividing D.
inline std::vector<DirichletCharacter> primitive_characters_dividing(std::uint64_t D) {
  if (D == 0) throw DomainError("primitive_characters_dividing: D must be positive");
  std::vector<DirichletCharacter> out;
  for (auto f : divisors(D)) {
    for (const auto& chi : character_group(f)) {
      if (chi.is_primitive()) out.push_back(chi);
    }
  }
  return out;
}

// Primitive characters up to a conductor bound, grouped by conductor.
class CharacterPool {
 public:
  explicit CharacterPool(std::uint64_t max_conductor) : max_(max_conductor), by_conductor_(max_conductor + 1) {
    for (auto& chi : primitive_characters_up_to(max_conductor)) by_conductor_[chi.conductor()].push_back(chi);
  }

  std::uint64_t max_conductor() const noexcept { return max_; }

  const std::vector<DirichletCharacter>& with_conductor(std::uint64_t f) const {
    if (f == 0 || f > max_) throw DomainError("CharacterPool: conductor outside pool");
    return by_conductor_[f];
  }

 private:
  std::uint64_t max_;
  std::vector<std::vector<DirichletCharacter>> by_conductor_;
};

}  // namespace divcorr
