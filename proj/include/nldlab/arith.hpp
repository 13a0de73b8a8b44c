#pragma once

// Exact integer arithmetic used throughout: factorization, multiplicative
// functions, modular inverses and primitive roots, and a small sieve.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace nldlab::arith {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

struct PrimePower {
  u64 p = 0;
  int e = 0;
  u64 value() const;
  bool operator==(const PrimePower&) const = default;
};

struct Factorization {
  u64 n = 1;
  std::vector<PrimePower> factors;  // primes strictly increasing
};

/// Trial-division factorization. Throws std::invalid_argument for n == 0.
Factorization factorize(u64 n);

/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(u64 n);

/// All primes p <= limit, ascending.
std::vector<u32> primes_up_to(u64 limit);

/// Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 0).
std::vector<u32> smallest_prime_factors(u64 limit);

struct PhiNu {
  u64 phi = 0;
  u64 nu = 0;
};

/// phi(t) and nu(t) = t * prod_{p | t} (1 + 1/p), both exact.
PhiNu euler_phi_and_nu(u64 t);
u64 euler_phi(u64 t);
u64 divisor_count(u64 n);

u64 mul_mod(u64 a, u64 b, u64 m);
u64 pow_mod(u64 base, u64 exp, u64 m);

/// Reduces a (possibly negative) integer into [0, m).
u64 reduce(i64 a, u64 m);

/// Inverse of a modulo m, or nullopt when gcd(a, m) != 1. m >= 1.
std::optional<u64> inverse_mod(i64 a, u64 m);

/// Smallest primitive root modulo p^e for an odd prime p.
u64 primitive_root(u64 p, int e = 1);

/// e(num/den) = exp(2 pi i num/den) with the argument reduced first, so the
/// angle passed to sin/cos always lies in [-pi, pi].
std::complex<double> unit_root(i64 num, u64 den);

/// cos(2 pi num/den) with the same reduction.
double unit_cos(i64 num, u64 den);

/// Von Mangoldt table Lambda(n) for n <= limit.
std::vector<double> von_mangoldt_table(u64 limit);

}  // namespace nldlab::arith
