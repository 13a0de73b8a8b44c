#pragma once

// Kloosterman sums S(m,n;c) = sum_{x mod c, (x,c)=1} e((m x + n xbar)/c).

#include <complex>
#include <cstdint>
#include <vector>

namespace nldlab {

/// Raw complex accumulation of the defining sum by direct O(c) summation.
std::complex<double> kloosterman_complex(std::int64_t m, std::int64_t n, std::uint64_t c);

/// Real value of the direct sum. S(m,n;1) = 1.
double kloosterman(std::int64_t m, std::int64_t n, std::uint64_t c);

/// Same value through twisted multiplicativity over the prime-power factors
/// of c, each factor summed directly.
double kloosterman_multiplicative(std::int64_t m, std::int64_t n, std::uint64_t c);

/// d(c) * gcd(m,n,c)^{1/2} * c^{1/2}.
double weil_majorant(std::int64_t m, std::int64_t n, std::uint64_t c);

/// Rounding model for the computed sums: |computed - S(m,n;c)| <= 4 u c (1 + log2 c),
/// u the unit roundoff. Largest observed |error| / (u c) for c <= 6006 is 6.3.
double kloosterman_rounding_bound(std::uint64_t c);

struct KloostermanPair {
  std::int64_t m = 1;
  std::int64_t n = 1;
};

/// S(m,n;c) for every pair and every c = N*r, r = 1..c_max/N.
/// values[i][r-1] = S(pairs[i].m, pairs[i].n; N*r).
struct KloostermanTable {
  std::uint64_t N = 1;
  std::uint64_t c_max = 1;
  std::vector<KloostermanPair> pairs;
  std::vector<std::vector<double>> values;

  std::uint64_t count() const { return c_max / N; }
};

/// Batched evaluation: tasks are grouped by prime-power modulus, each group
/// shares one inverse table and one cosine table, and the per-modulus
/// components are multiplied in a fixed order, so the result does not depend
/// on the number of OpenMP threads.
KloostermanTable kloosterman_progression(const std::vector<KloostermanPair>& pairs,
                                         std::uint64_t N, std::uint64_t c_max);

/// Serial reference for the same table: one direct sum per entry.
KloostermanTable kloosterman_progression_reference(const std::vector<KloostermanPair>& pairs,
                                                   std::uint64_t N, std::uint64_t c_max);


struct IdentitySuiteReport {
  std::uint64_t c_max = 0;
  std::size_t gauss_checks = 0;     // sum_a conj(chi)(a) S(a,1;c) = tau(conj chi)^2
  double gauss_max_rel = 0.0;       // relative to max(1, |tau|^2)
  std::size_t spectral_checks = 0;  // S(p^nu,1;c) = phi(c)^{-1} sum_chi tau(conj chi)^2 chi(p^nu)
  double spectral_max_rel = 0.0;
  std::size_t weil_checks = 0;      // |S(m,n;c)| <= weil_majorant, 1 <= m,n <= c
  std::size_t weil_violations = 0;
};

/// Both character identities for every c <= c_max and every chi mod c, the
/// decomposition for p^nu <= 50 with p not dividing c, and the Weil bound.
IdentitySuiteReport kloosterman_identity_suite(std::uint64_t c_max);

}  // namespace nldlab
