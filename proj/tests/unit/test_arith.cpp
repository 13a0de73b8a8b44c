#include <cmath>
#include <complex>
#include <numeric>
#include <numbers>

#include "doctest.h"
#include "nldlab/arith.hpp"
#include "nldlab/characters.hpp"
#include "nldlab/kloosterman.hpp"
#include "nldlab/parallel.hpp"

using namespace nldlab;
using arith::u64;
using cd = std::complex<double>;

namespace {

bool trial_division_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

u64 brute_phi(u64 t) {
  u64 count = 0;
  for (u64 a = 1; a <= t; ++a) count += std::gcd(a, t) == 1;
  return count;
}

// Smallest d | q such that chi(n) = 1 whenever n = 1 mod d and (n, q) = 1.
u64 brute_conductor(const DirichletCharacter& chi) {
  const u64 q = chi.modulus();
  for (u64 d = 1; d <= q; ++d) {
    if (q % d != 0) continue;
    bool ok = true;
    for (u64 n = 1; n < q + 1 && ok; n += d) {
      if (std::gcd(n, q) == 1 && chi.phase(static_cast<std::int64_t>(n)) != 0) ok = false;
    }
    if (ok) return d;
  }
  return q;
}

}  // namespace

TEST_CASE("factorize examples and invariants") {
  CHECK(arith::factorize(1).factors.empty());
  const auto f12 = arith::factorize(12);
  REQUIRE(f12.factors.size() == 2);
  CHECK(f12.factors[0] == arith::PrimePower{2, 2});
  CHECK(f12.factors[1] == arith::PrimePower{3, 1});
  const auto f1009 = arith::factorize(1009);
  REQUIRE(f1009.factors.size() == 1);
  CHECK(f1009.factors[0] == arith::PrimePower{1009, 1});
  CHECK(trial_division_prime(1009));
  CHECK_THROWS_AS(arith::factorize(0), std::invalid_argument);

  for (u64 n = 1; n <= 5000; ++n) {
    const auto f = arith::factorize(n);
    u64 prod = 1;
    u64 last = 1;
    for (const auto& pp : f.factors) {
      CHECK(pp.p > last);
      CHECK(trial_division_prime(pp.p));
      prod *= pp.value();
      last = pp.p;
    }
    CHECK(prod == n);
  }
}

TEST_CASE("primality and sieve agree with trial division") {
  const auto primes = arith::primes_up_to(3000);
  std::size_t idx = 0;
  for (u64 n = 0; n <= 3000; ++n) {
    const bool p = trial_division_prime(n);
    CHECK(arith::is_prime(n) == p);
    if (p) CHECK(primes[idx++] == n);
  }
  CHECK(idx == primes.size());
  CHECK(arith::is_prime(1000000007ULL));
  CHECK_FALSE(arith::is_prime(1000000007ULL * 3));
}

TEST_CASE("euler_phi_and_nu") {
  CHECK(arith::euler_phi_and_nu(1).phi == 1);
  CHECK(arith::euler_phi_and_nu(1).nu == 1);
  CHECK(arith::euler_phi_and_nu(12).phi == 4);
  CHECK(arith::euler_phi_and_nu(12).nu == 24);
  CHECK(arith::euler_phi_and_nu(11).phi == 10);
  CHECK(arith::euler_phi_and_nu(11).nu == 12);
  for (u64 t = 1; t <= 500; ++t) CHECK(arith::euler_phi(t) == brute_phi(t));
}

TEST_CASE("modular inverse and primitive roots") {
  for (u64 m = 1; m <= 60; ++m) {
    for (std::int64_t a = -70; a <= 70; ++a) {
      const auto inv = arith::inverse_mod(a, m);
      if (std::gcd(arith::reduce(a, m), m) == 1) {
        REQUIRE(inv.has_value());
        CHECK(arith::reduce(static_cast<std::int64_t>(arith::reduce(a, m) * *inv), m) == 1 % m);
      } else {
        CHECK_FALSE(inv.has_value());
      }
    }
  }
  for (u64 p : {3u, 5u, 7u, 29u, 31u, 101u}) {
    for (int e = 1; e <= 3; ++e) {
      const u64 q = arith::PrimePower{p, e}.value();
      const u64 g = arith::primitive_root(p, e);
      const u64 phi = arith::euler_phi(q);
      u64 x = 1, ord = 0;
      do {
        x = x * g % q;
        ++ord;
      } while (x != 1);
      CHECK(ord == phi);
    }
  }
}

TEST_CASE("unit_root reduces its argument") {
  const auto z = arith::unit_root(1, 4);
  CHECK(z.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(z.imag() == doctest::Approx(1.0));
  const auto w = arith::unit_root(-3, 4);
  CHECK(std::abs(w - z) < 1e-15);
  const auto big = arith::unit_root(1000000000001LL, 1000000000000ULL);
  CHECK(std::abs(big - std::polar(1.0, 2 * M_PI * 1e-12)) < 1e-15);
}

TEST_CASE("enumerate_characters counts and conductors") {
  CHECK(enumerate_characters(1).size() == 1);
  CHECK(enumerate_characters(1)[0].primitive());
  auto count_primitive = [](u64 q) {
    std::size_t n = 0;
    for (const auto& chi : enumerate_characters(q)) n += chi.primitive();
    return n;
  };
  CHECK(enumerate_characters(5).size() == 4);
  CHECK(count_primitive(5) == 3);
  CHECK(enumerate_characters(8).size() == 4);
  CHECK(count_primitive(8) == 2);
  CHECK(count_primitive(15) == 3);
  CHECK(count_primitive(35) == 15);

  for (u64 q = 1; q <= 100; ++q) {
    const auto chars = enumerate_characters(q);
    REQUIRE(chars.size() == arith::euler_phi(q));
    std::size_t principal = 0;
    for (std::size_t i = 0; i < chars.size(); ++i) {
      const auto& chi = chars[i];
      principal += chi.principal();
      CHECK(character_index(chi) == i);
      CHECK(chi.conductor() == brute_conductor(chi));
      CHECK(q % chi.conductor() == 0);
      CHECK(chi.primitive() == (chi.conductor() == q));
      CHECK(std::abs(chi(1) - cd(1.0, 0.0)) < 1e-15);
      CHECK(std::abs(chi(-1) - cd(chi.parity(), 0.0)) < 1e-15);
      for (u64 a = 0; a < q; ++a) {
        const bool unit = std::gcd(a, q) == 1;
        CHECK((std::abs(chi(static_cast<std::int64_t>(a))) > 0.5) == unit);
        if (unit) CHECK(std::abs(std::abs(chi(static_cast<std::int64_t>(a))) - 1.0) < 1e-14);
      }
      if (q <= 40) {
        for (u64 a = 1; a < q; ++a) {
          for (u64 b = 1; b < q; ++b) {
            if (std::gcd(a * b, q) != 1) continue;
            const auto lhs = chi(static_cast<std::int64_t>(a * b));
            const auto rhs = chi(static_cast<std::int64_t>(a)) * chi(static_cast<std::int64_t>(b));
            CHECK(std::abs(lhs - rhs) < 1e-13);
          }
        }
      }
    }
    CHECK(principal == 1);
  }
}

TEST_CASE("character orthogonality, q <= 100") {
  for (u64 q = 1; q <= 100; ++q) {
    const auto chars = enumerate_characters(q);
    const double phi = static_cast<double>(chars.size());
    for (u64 a = 1; a <= q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      for (u64 b = 1; b <= q; ++b) {
        if (std::gcd(b, q) != 1) continue;
        cd s{};
        for (const auto& chi : chars) {
          s += chi(static_cast<std::int64_t>(a)) * std::conj(chi(static_cast<std::int64_t>(b)));
        }
        s /= phi;
        CHECK(std::abs(s - cd(a % q == b % q ? 1.0 : 0.0, 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("decompose_character recovers chi") {
  const auto trivial_split = decompose_character(primitive_characters(7)[0], 7);
  CHECK(trivial_split.psi.modulus() == 1);
  CHECK(trivial_split.xi == primitive_characters(7)[0]);

  for (auto [d, N] : {std::pair<u64, u64>{15, 5}, {35, 7}, {77, 11}, {60, 5}, {24, 3}, {105, 7}}) {
    const auto prims = primitive_characters(d);
    for (const auto& chi : prims) {
      const auto [psi, xi] = decompose_character(chi, N);
      CHECK(psi.modulus() == d / N);
      CHECK(xi.modulus() == N);
      CHECK(psi.primitive());
      CHECK(xi.primitive());
      for (u64 n = 0; n < d; ++n) {
        const auto v = static_cast<std::int64_t>(n);
        CHECK(std::abs(chi(v) - psi(v) * xi(v)) < 1e-13);
      }
      CHECK(compose(psi, xi) == chi);
    }
    CHECK(prims.size() == primitive_characters(d / N).size() * primitive_characters(N).size());
  }
  CHECK_THROWS_AS(decompose_character(primitive_characters(45)[0], 3), std::invalid_argument);
  CHECK_THROWS_AS(decompose_character(enumerate_characters(15)[0], 5), std::invalid_argument);
}

TEST_CASE("gauss_sum examples and modulus") {
  const auto g2 = gauss_sum(enumerate_characters(2)[0]);
  CHECK(std::abs(g2 - cd(-1.0, 0.0)) < 1e-15);
  const auto g4 = gauss_sum(primitive_characters(4)[0]);
  CHECK(std::abs(g4 - cd(0.0, 2.0)) < 1e-14);
  const auto g3 = gauss_sum(primitive_characters(3)[0]);
  CHECK(std::abs(g3 - cd(0.0, std::sqrt(3.0))) < 1e-14);
  for (u64 q = 1; q <= 200; ++q) {
    for (const auto& chi : primitive_characters(q)) {
      CHECK(std::abs(std::norm(gauss_sum(chi)) - static_cast<double>(q)) <= 1e-10 * q);
    }
  }
}

TEST_CASE("kloosterman examples") {
  CHECK(kloosterman(1, 1, 1) == 1.0);
  CHECK(kloosterman(1, 1, 3) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(kloosterman(1, 2, 5) == doctest::Approx(-1.0 - std::sqrt(5.0)).epsilon(1e-14));
  CHECK(weil_majorant(1, 1, 1) == 1.0);
  CHECK(weil_majorant(1, 1, 3) == doctest::Approx(2 * std::sqrt(3.0)));
  CHECK(weil_majorant(2, 4, 8) == doctest::Approx(16.0));
}

TEST_CASE("Weil bound, symmetry and reality for c <= 200") {
  for (u64 c = 1; c <= 200; ++c) {
    for (std::int64_t m = 1; m <= 10; ++m) {
      for (std::int64_t n = m; n <= 10; ++n) {
        const auto s = kloosterman_complex(m, n, c);
        CHECK(std::abs(s.imag()) < 1e-9);
        CHECK(std::abs(s.real()) <= weil_majorant(m, n, c) + 1e-9);
        CHECK(std::abs(s.real() - kloosterman(n, m, c)) < 1e-9);
      }
    }
  }
}

TEST_CASE("twisted multiplicativity, rs <= 200") {
  for (u64 r = 1; r <= 200; ++r) {
    for (u64 s = 1; r * s <= 200; ++s) {
      if (std::gcd(r, s) != 1) continue;
      const auto sbar = static_cast<std::int64_t>(*arith::inverse_mod(static_cast<std::int64_t>(s), r));
      const auto rbar = static_cast<std::int64_t>(*arith::inverse_mod(static_cast<std::int64_t>(r), s));
      for (std::int64_t m : {1, 2, 3, 6, 7}) {
        for (std::int64_t n : {1, 4, 5}) {
          const double lhs = kloosterman(m, n, r * s);
          const double rhs = kloosterman(m * sbar, n * sbar, r) * kloosterman(m * rbar, n * rbar, s);
          CHECK(std::abs(lhs - rhs) < 1e-9);
          CHECK(std::abs(lhs - kloosterman_multiplicative(m, n, r * s)) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("Gauss-Kloosterman identity and spectral decomposition, c <= 200") {
  const auto primes = arith::primes_up_to(50);
  for (u64 c = 1; c <= 200; ++c) {
    std::vector<double> s_a(c);
    for (u64 a = 0; a < c; ++a) s_a[a] = kloosterman(static_cast<std::int64_t>(a), 1, c);
    const auto chars = enumerate_characters(c);
    std::vector<cd> tau2;
    for (const auto& chi : chars) {
      const auto chibar = chi.conjugate();
      cd lhs{};
      for (u64 a = 0; a < c; ++a) lhs += chibar(static_cast<std::int64_t>(a)) * s_a[a];
      const cd t = gauss_sum(chibar);
      tau2.push_back(t * t);
      CHECK(std::abs(lhs - t * t) <= 1e-8 * std::max(1.0, std::abs(t * t)));
    }
    for (u64 p : primes) {
      if (c % p == 0) continue;
      for (u64 pv = p; pv <= 50; pv *= p) {
        cd rhs{};
        for (std::size_t i = 0; i < chars.size(); ++i) rhs += tau2[i] * chars[i](static_cast<std::int64_t>(pv));
        rhs /= static_cast<double>(chars.size());
        const double lhs = s_a[pv % c];
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("batched progression kernel matches direct sums") {
  const std::vector<KloostermanPair> pairs = {{1, 1}, {1, 2}, {2, 2}, {3, 3}, {2, 3}, {4, 1}, {6, 1}};
  for (u64 N : {1u, 2u, 11u, 101u}) {
    const auto fast = kloosterman_progression(pairs, N, 3000);
    const auto ref = kloosterman_progression_reference(pairs, N, 3000);
    REQUIRE(fast.values.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (std::size_t r = 0; r < fast.count(); ++r) {
        CHECK(std::abs(fast.values[i][r] - ref.values[i][r]) < 1e-9);
      }
    }
  }
}

TEST_CASE("batched kernel is identical across worker counts") {
  const std::vector<KloostermanPair> pairs = {{1, 1}, {2, 1}, {3, 1}, {5, 1}};
  set_worker_count(1);
  const auto one = kloosterman_progression(pairs, 7, 20000);
  set_worker_count(4);
  const auto four = kloosterman_progression(pairs, 7, 20000);
  set_worker_count(1);
  CHECK(one.values == four.values);
}

TEST_CASE("identity suite report") {
  const IdentitySuiteReport r = kloosterman_identity_suite(40);
  std::size_t chars = 0;
  for (u64 c = 1; c <= 40; ++c) chars += arith::euler_phi(c);
  CHECK(r.gauss_checks == chars);
  CHECK(r.gauss_max_rel < 1e-8);
  CHECK(r.spectral_checks > 0);
  CHECK(r.spectral_max_rel < 1e-8);
  CHECK(r.weil_checks == 40 * 41 * 81 / 6);
  CHECK(r.weil_violations == 0);
}

TEST_CASE("Kloosterman rounding model against long double sums") {
  const std::vector<KloostermanPair> pairs{{1, 1}, {2, 3}, {1, 5}};
  const auto t = kloosterman_progression(pairs, 1, 1200);
  const long double two_pi = 2 * std::numbers::pi_v<long double>;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (u64 c = 1; c <= 1200; ++c) {
      long double s = 0;
      for (u64 x = 1; x <= c; ++x) {
        const auto xi = arith::inverse_mod(static_cast<std::int64_t>(x), c);
        if (!xi) continue;
        const u64 a = (static_cast<u64>(pairs[i].m) * x + static_cast<u64>(pairs[i].n) * *xi) % c;
        s += std::cos(two_pi * static_cast<long double>(a) / static_cast<long double>(c));
      }
      const double err = std::abs(static_cast<double>(static_cast<long double>(t.values[i][c - 1]) - s));
      CHECK_MESSAGE(err <= kloosterman_rounding_bound(c), "c=" << c);
    }
  }
}
