#include "nldlab/kloosterman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nldlab/arith.hpp"

namespace nldlab {

namespace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Inverse of an odd x modulo 2^64 by Newton iteration.
u64 inverse_pow2(u64 x) {
  u64 y = x;
  for (int i = 0; i < 6; ++i) y *= 2 - x * y;
  return y;
}

// cos(2 pi j / q) for j in [0, q). Rotation by e(1/q), re-anchored with an
// exact evaluation every 64 steps.
void fill_cos_table(u64 q, std::vector<double>& out) {
  out.resize(q);
  const double w = 2.0 * std::numbers::pi / static_cast<double>(q);
  const double cw = std::cos(w), sw = std::sin(w);
  const u64 half = q / 2;
  for (u64 j0 = 0; j0 <= half; j0 += 64) {
    double c = std::cos(w * static_cast<double>(j0));
    double s = std::sin(w * static_cast<double>(j0));
    const u64 end = std::min(j0 + 64, half + 1);
    for (u64 j = j0; j < end; ++j) {
      out[j] = c;
      if (j != 0) out[q - j] = c;
      const double cn = c * cw - s * sw;
      s = s * cw + c * sw;
      c = cn;
    }
  }
}

// inv[x] = x^{-1} mod q for units, 0 otherwise. q = p^e.
void fill_inverse_table(u64 p, u64 q, std::vector<u32>& inv) {
  inv.assign(q, 0);
  if (q == 2) {
    inv[1] = 1;
    return;
  }
  if (p == 2) {
    for (u64 x = 1; x < q; x += 2) inv[x] = static_cast<u32>(inverse_pow2(x) & (q - 1));
    return;
  }
  int e = 0;
  for (u64 t = q; t > 1; t /= p) ++e;
  const u64 g = arith::primitive_root(p, e);
  const u64 phi = q / p * (p - 1);
  std::vector<u32> pw(phi);
  u64 x = 1;
  for (u64 j = 0; j < phi; ++j) {
    pw[j] = static_cast<u32>(x);
    x = x * g % q;
  }
  for (u64 j = 0; j < phi; ++j) inv[pw[j]] = pw[j == 0 ? 0 : phi - j];
}

constexpr int kChunk = 8;

// S(a_j, 1; q) for up to kChunk values a_j, in one pass over the units.
void sum_chunk(u64 p, u64 q, const u64* a, int count, const std::vector<u32>& inv,
               const std::vector<double>& cosq, double* out) {
  u64 ax[kChunk] = {};
  double acc[kChunk] = {};
  u64 t = 0;  // x mod p
  for (u64 x = 1; x < q; ++x) {
    for (int j = 0; j < count; ++j) {
      ax[j] += a[j];
      if (ax[j] >= q) ax[j] -= q;
    }
    if (++t == p) {
      t = 0;
      continue;
    }
    const u64 ix = inv[x];
    for (int j = 0; j < count; ++j) {
      u64 idx = ax[j] + ix;
      if (idx >= q) idx -= q;
      acc[j] += cosq[idx];
    }
  }
  for (int j = 0; j < count; ++j) out[j] = acc[j];
}

// General S(a, b; q) when both a and b share the prime p.
double sum_general(u64 p, u64 q, u64 a, u64 b, const std::vector<u32>& inv,
                   const std::vector<double>& cosq) {
  double acc = 0.0;
  for (u64 x = 1; x < q; ++x) {
    if (x % p == 0) continue;
    const u64 idx = (a * x + b * static_cast<u64>(inv[x])) % q;
    acc += cosq[idx];
  }
  return acc;
}

struct Task {
  u64 q;
  u64 p;
  u64 a;
  u64 b;  // 1 after reduction when possible
  std::size_t slot;
};

}  // namespace

std::complex<double> kloosterman_complex(i64 m, i64 n, u64 c) {
  if (c == 0) throw std::invalid_argument("kloosterman: modulus must be positive");
  if (c == 1) return {1.0, 0.0};
  const u64 mr = arith::reduce(m, c), nr = arith::reduce(n, c);
  std::complex<double> s{};
  for (u64 x = 1; x < c; ++x) {
    const auto xi = arith::inverse_mod(static_cast<i64>(x), c);
    if (!xi) continue;
    const u64 idx = (arith::mul_mod(mr, x, c) + arith::mul_mod(nr, *xi, c)) % c;
    s += arith::unit_root(static_cast<i64>(idx), c);
  }
  return s;
}

double kloosterman(i64 m, i64 n, u64 c) { return kloosterman_complex(m, n, c).real(); }

double kloosterman_multiplicative(i64 m, i64 n, u64 c) {
  if (c == 0) throw std::invalid_argument("kloosterman: modulus must be positive");
  double prod = 1.0;
  for (const auto& f : arith::factorize(c).factors) {
    const u64 q = f.value();
    const u64 rbar = *arith::inverse_mod(static_cast<i64>((c / q) % q), q);
    const u64 a = arith::mul_mod(arith::reduce(m, q), rbar, q);
    const u64 b = arith::mul_mod(arith::reduce(n, q), rbar, q);
    prod *= kloosterman(static_cast<i64>(a), static_cast<i64>(b), q);
  }
  return prod;
}

double weil_majorant(i64 m, i64 n, u64 c) {
  if (c == 0) throw std::invalid_argument("weil_majorant: modulus must be positive");
  const u64 g = std::gcd(std::gcd(static_cast<u64>(std::llabs(m)), static_cast<u64>(std::llabs(n))), c);
  return static_cast<double>(arith::divisor_count(c)) * std::sqrt(static_cast<double>(g)) *
         std::sqrt(static_cast<double>(c));
}

double kloosterman_rounding_bound(u64 c) {
  const double cd = static_cast<double>(c);
  return 4 * std::numeric_limits<double>::epsilon() / 2 * cd * (1 + std::log2(cd));
}

KloostermanTable kloosterman_progression(const std::vector<KloostermanPair>& pairs, u64 N,
                                         u64 c_max) {
  if (N == 0 || c_max < N) throw std::invalid_argument("kloosterman_progression: need 1 <= N <= c_max");
  KloostermanTable out{N, c_max, pairs, {}};
  const u64 count = c_max / N;
  const auto spf = arith::smallest_prime_factors(c_max);

  // Prime-power components of every c = N r, stored contiguously.
  std::vector<std::size_t> comp_begin(count + 1, 0);
  std::vector<u64> comp_q, comp_p;
  for (u64 r = 1; r <= count; ++r) {
    u64 c = N * r;
    while (c > 1) {
      const u64 p = spf[c];
      u64 q = 1;
      while (c % p == 0) {
        c /= p;
        q *= p;
      }
      comp_q.push_back(q);
      comp_p.push_back(p);
    }
    comp_begin[r] = comp_q.size();
  }
  const std::size_t ncomp = comp_q.size();

  std::vector<Task> tasks;
  tasks.reserve(pairs.size() * ncomp);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (u64 r = 1; r <= count; ++r) {
      const u64 c = N * r;
      for (std::size_t j = comp_begin[r - 1]; j < comp_begin[r]; ++j) {
        const u64 q = comp_q[j], p = comp_p[j];
        const u64 rbar = *arith::inverse_mod(static_cast<i64>((c / q) % q), q);
        u64 a = arith::mul_mod(arith::reduce(pairs[i].m, q), rbar, q);
        u64 b = arith::mul_mod(arith::reduce(pairs[i].n, q), rbar, q);
        // S(a,b;q) = S(ab,1;q) whenever a or b is a unit.
        if (b % p != 0 || a % p != 0) {
          a = arith::mul_mod(a, b, q);
          b = 1;
        }
        tasks.push_back({q, p, a, b, i * ncomp + j});
      }
    }
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& x, const Task& y) {
    if (x.q != y.q) return x.q < y.q;
    if (x.b != y.b) return x.b < y.b;
    return x.a < y.a;
  });
  std::vector<std::size_t> group_begin;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (t == 0 || tasks[t].q != tasks[t - 1].q) group_begin.push_back(t);
  }
  group_begin.push_back(tasks.size());
  const auto ngroups = static_cast<std::int64_t>(group_begin.size()) - 1;

  std::vector<double> slot(pairs.size() * ncomp, 0.0);

#pragma omp parallel
  {
    std::vector<u32> inv;
    std::vector<double> cosq;
    std::vector<u64> keys;
    std::vector<double> vals;
    // Largest moduli first so the dynamic schedule balances.
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t gi = ngroups - 1; gi >= 0; --gi) {
      const std::size_t lo = group_begin[gi], hi = group_begin[gi + 1];
      const u64 q = tasks[lo].q, p = tasks[lo].p;
      fill_inverse_table(p, q, inv);
      fill_cos_table(q, cosq);
      std::size_t t = lo;
      while (t < hi) {
        if (tasks[t].b != 1) {
          const double v = sum_general(p, q, tasks[t].a, tasks[t].b, inv, cosq);
          slot[tasks[t].slot] = v;
          ++t;
          continue;
        }
        std::size_t u = t;
        keys.clear();
        while (u < hi && tasks[u].b == 1) {
          if (keys.empty() || keys.back() != tasks[u].a) keys.push_back(tasks[u].a);
          ++u;
        }
        vals.assign(keys.size(), 0.0);
        for (std::size_t k = 0; k < keys.size(); k += kChunk) {
          const int n = static_cast<int>(std::min<std::size_t>(kChunk, keys.size() - k));
          sum_chunk(p, q, keys.data() + k, n, inv, cosq, vals.data() + k);
        }
        std::size_t kk = 0;
        for (std::size_t v = t; v < u; ++v) {
          while (keys[kk] != tasks[v].a) ++kk;
          slot[tasks[v].slot] = vals[kk];
        }
        t = u;
      }
    }
  }

  out.values.assign(pairs.size(), std::vector<double>(count, 1.0));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (u64 r = 1; r <= count; ++r) {
      double prod = 1.0;
      for (std::size_t j = comp_begin[r - 1]; j < comp_begin[r]; ++j) prod *= slot[i * ncomp + j];
      out.values[i][r - 1] = prod;
    }
  }
  return out;
}

KloostermanTable kloosterman_progression_reference(const std::vector<KloostermanPair>& pairs,
                                                   u64 N, u64 c_max) {
  if (N == 0 || c_max < N) throw std::invalid_argument("kloosterman_progression: need 1 <= N <= c_max");
  KloostermanTable out{N, c_max, pairs, {}};
  const u64 count = c_max / N;
  out.values.assign(pairs.size(), std::vector<double>(count));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (u64 r = 1; r <= count; ++r) out.values[i][r - 1] = kloosterman(pairs[i].m, pairs[i].n, N * r);
  }
  return out;
}

}  // namespace nldlab
