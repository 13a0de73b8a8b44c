#pragma once

// Harmonically weighted averages over newforms of prime level through the
// Petersson formula, their truncation majorants, the Kloosterman-side prime
// sum, and the assembled one-level density. Eigenvalue fixtures are only
// needed to check the formula in reverse or for weights with level-1 cusp forms.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nldlab/kloosterman.hpp"
#include "nldlab/testfn.hpp"

namespace nldlab {

struct PeterssonQuery {
  int k = 2;
  std::uint64_t N = 1;
  std::int64_t m = 1, n = 1;
  std::uint64_t c_max = 100000;
};

/// Throws std::invalid_argument unless k is even and >= 2, N is 1 or prime,
/// m, n >= 1, c_max >= N, and for N > 1: (m, N) = 1 and (n, N^2) | N.
void validate(const PeterssonQuery& q);

struct EigenformFixture {
  std::uint64_t level = 1;
  int weight = 2;
  std::string label;
  std::map<std::uint64_t, std::int64_t> a_p;

  /// a_p / p^{(k-1)/2}; throws std::out_of_range when p is missing.
  double lambda_prime(std::uint64_t p) const;
  /// Multiplicative extension through the Hecke relations.
  double lambda(std::uint64_t n) const;
  /// Roots of T^2 - lambda(p) T + 1 for p not dividing the level.
  std::pair<std::complex<double>, std::complex<double>> satake(std::uint64_t p) const;
};

/// Deligne bound at p not dividing the level, |lambda(N)| <= N^{-1/2} at p = N.
/// Returns one message per violation; empty when the fixture is valid.
std::vector<std::string> fixture_violations(const EigenformFixture& f);

/// CSV with header level,weight,label,p,a_p. Rows are grouped into fixtures
/// by (level, weight, label). Malformed rows or bound violations throw
/// std::runtime_error listing every offending row. An empty file yields an
/// empty list and a message in *warnings.
std::vector<EigenformFixture> load_fixtures(const std::string& path,
                                            std::vector<std::string>* warnings = nullptr);

/// dim S_k(SL_2(Z)) for even k >= 2.
int level_one_dimension(int k);

struct HarmonicAverage {
  double value = 0.0;          // delta + 2 pi i^k sum_c ... - old-form correction
  double kloosterman_sum = 0.0;  // sum_{N | c <= c_max} S(m,n;c) J_{k-1}(4 pi sqrt(mn)/c)/c
  double oldform_correction = 0.0;
  double rounding_majorant = 0.0;  // floating-point error of the computed value
  double tail_majorant = 0.0;  // bound on |value - exact|: c > c_max, old-form rest and rounding
  std::uint64_t c_max = 0;
};

/// Bound for 2 pi sum_{c > c_max, N | c} |S(m,n;c) J_{k-1}(4 pi sqrt(mn)/c)| / c:
/// Weil times the Bessel majorant term by term up to c = 4 pi sqrt(mn), then
/// the first branch summed in closed form through sum_{r <= x} d(r) <= x (log x + 1).
double petersson_tail_majorant(int k, std::uint64_t N, std::int64_t m, std::int64_t n,
                               std::uint64_t c_max);

/// The right-hand side of the Petersson formula. For N > 1 and weights with
/// cusp forms at level 1 the old-form correction needs level_one (a fixture
/// for the single level-1 form of weight k); std::invalid_argument otherwise.
HarmonicAverage harmonic_average(const PeterssonQuery& q,
                                 const std::vector<EigenformFixture>* level_one = nullptr);

/// Several (m, n) for one (k, N, c_max) sharing a single Kloosterman table.
std::vector<HarmonicAverage> harmonic_averages(int k, std::uint64_t N,
                                               const std::vector<KloostermanPair>& pairs,
                                               std::uint64_t c_max,
                                               const std::vector<EigenformFixture>* level_one = nullptr);

/// Same, with a precomputed table (N and c_max are taken from it).
std::vector<HarmonicAverage> harmonic_averages(int k, const KloostermanTable& table,
                                               const std::vector<EigenformFixture>* level_one = nullptr);

/// sum_f w_f lambda_f(m) lambda_f(n); all fixtures must share (level, weight).
double eigenform_side_average(const std::vector<EigenformFixture>& fixtures,
                              const std::vector<double>& weights, std::uint64_t m, std::uint64_t n);

struct PrimeSumOptions {
  int nu_max = 3;
  std::uint64_t c_max_floor = 100000;  // c_max(p^nu) = max(floor, A sqrt(p^nu))
  double c_max_slope = 20.0;           // A
};

struct PrimeSumTerm {
  std::uint64_t p = 0;
  int nu = 0;
  double weight = 0.0;      // p^{-nu/2} phihat(nu log p / log X) log p / log X
  double c_sum = 0.0;       // truncated sum over c
  double c_tail = 0.0;      // its majorant, without the 2 pi
  std::uint64_t c_max = 0;
};

struct PrimeSum {
  double value = 0.0;             // -(4 pi i^k / Omega) sum weight * c_sum
  double discard_majorant = 0.0;  // c tails plus the nu > nu_max terms
  double c_tail_majorant = 0.0;
  double high_nu_majorant = 0.0;
  double raw_sum = 0.0;           // sum weight * c_sum, before -(4 pi i^k / Omega)
  double omega = 0.0;
  double omega_tail = 0.0;
  double log_x = 0.0;
  std::vector<PrimeSumTerm> terms;  // primes ascending, then nu
};

/// X = k^2 N. Rejects sigma >= 2, nu_max < 2, and weights whose level-1
/// space is nonzero.
PrimeSum averaged_prime_sum(int k, std::uint64_t N, const TestFunctionPair& phi,
                            const PrimeSumOptions& opt = {});

struct DensityReport {
  int k = 2;
  std::uint64_t N = 1;
  double X = 0.0;
  std::string phi_name;
  double sigma = 0.0;
  double conductor_term = 0.0;   // phihat(0) log(N/pi^2) / log X
  double archimedean = 0.0;
  double square_primes = 0.0;    // 2 sum_{p !| N} p^{-1} phihat(2 log p/log X) log p/log X
  double main_prime_sum = 0.0;   // the Kloosterman side
  double discard_majorant = 0.0; // all discarded pieces, bounded
  double total = 0.0;            // sum of the four terms above
  double target = 0.0;           // katz_sarnak_target(phi)
  double residual = 0.0;         // total - target
  double omega = 0.0;
  PrimeSum prime_sum;
};

/// N prime, k even with no level-1 cusp forms, sigma < 2.
DensityReport one_level_density(int k, std::uint64_t N, const TestFunctionPair& phi,
                                const PrimeSumOptions& opt = {});

}  // namespace nldlab
