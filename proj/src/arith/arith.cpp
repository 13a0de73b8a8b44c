#include "nldlab/arith.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nldlab::arith {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

u64 PrimePower::value() const {
  u64 v = 1;
  for (int i = 0; i < e; ++i) v *= p;
  return v;
}

Factorization factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  Factorization f;
  f.n = n;
  auto take = [&](u64 p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) f.factors.push_back({p, e});
  };
  take(2);
  take(3);
  for (u64 p = 5; p * p <= n; p += 6) {
    take(p);
    take(p + 2);
  }
  if (n > 1) f.factors.push_back({n, 1});
  return f;
}

u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<u32> primes_up_to(u64 limit) {
  std::vector<u32> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<u32>(i));
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::vector<u32> smallest_prime_factors(u64 limit) {
  std::vector<u32> spf(limit + 1, 0);
  for (u64 i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    for (u64 j = i; j <= limit; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<u32>(i);
    }
  }
  return spf;
}

PhiNu euler_phi_and_nu(u64 t) {
  if (t == 0) throw std::invalid_argument("euler_phi_and_nu: t must be positive");
  PhiNu r{t, t};
  for (const auto& [p, e] : factorize(t).factors) {
    r.phi = r.phi / p * (p - 1);
    r.nu = r.nu / p * (p + 1);
  }
  return r;
}

u64 euler_phi(u64 t) { return euler_phi_and_nu(t).phi; }

u64 divisor_count(u64 n) {
  u64 d = 1;
  for (const auto& f : factorize(n).factors) d *= static_cast<u64>(f.e + 1);
  return d;
}

u64 reduce(i64 a, u64 m) {
  const i64 r = a % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

std::optional<u64> inverse_mod(i64 a, u64 m) {
  if (m == 1) return 0;
  i64 old_r = static_cast<i64>(reduce(a, m)), r = static_cast<i64>(m);
  i64 old_s = 1, s = 0;
  while (r != 0) {
    const i64 q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
  }
  if (old_r != 1) return std::nullopt;
  return reduce(old_s, m);
}

u64 primitive_root(u64 p, int e) {
  if (p == 2 || !is_prime(p)) {
    throw std::invalid_argument("primitive_root: p must be an odd prime");
  }
  const auto order_factors = factorize(p - 1).factors;
  u64 g = 2;
  for (;; ++g) {
    bool ok = true;
    for (const auto& f : order_factors) {
      if (pow_mod(g, (p - 1) / f.p, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  // A primitive root mod p lifts to all p^e unless g^(p-1) = 1 mod p^2.
  if (e >= 2 && pow_mod(g, p - 1, p * p) == 1) g += p;
  return g;
}

std::complex<double> unit_root(i64 num, u64 den) {
  u64 r = reduce(num, den);
  // map r/den into (-1/2, 1/2]
  double frac;
  if (2 * r > den) {
    frac = -static_cast<double>(den - r) / static_cast<double>(den);
  } else {
    frac = static_cast<double>(r) / static_cast<double>(den);
  }
  const double angle = 2.0 * std::numbers::pi * frac;
  return {std::cos(angle), std::sin(angle)};
}

double unit_cos(i64 num, u64 den) {
  u64 r = reduce(num, den);
  if (2 * r > den) r = den - r;
  return std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den));
}

std::vector<double> von_mangoldt_table(u64 limit) {
  std::vector<double> lambda(limit + 1, 0.0);
  for (u32 p : primes_up_to(limit)) {
    const double lp = std::log(static_cast<double>(p));
    for (u64 q = p; q <= limit; q *= p) {
      lambda[q] = lp;
      if (q > limit / p) break;
    }
  }
  return lambda;
}

}  // namespace nldlab::arith
