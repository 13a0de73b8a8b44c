#include <algorithm>
#include <cmath>
#include <complex>

#include "nldlab/arith.hpp"
#include "nldlab/characters.hpp"
#include "nldlab/kloosterman.hpp"

namespace nldlab {

IdentitySuiteReport kloosterman_identity_suite(std::uint64_t c_max) {
  using cd = std::complex<double>;
  IdentitySuiteReport out;
  out.c_max = c_max;
  const auto primes = arith::primes_up_to(50);
  for (std::uint64_t c = 1; c <= c_max; ++c) {
    std::vector<double> s_a(c);
    for (std::uint64_t a = 0; a < c; ++a) s_a[a] = kloosterman(static_cast<std::int64_t>(a), 1, c);
    const auto chars = enumerate_characters(c);
    std::vector<cd> tau2;
    tau2.reserve(chars.size());
    for (const auto& chi : chars) {
      const auto chibar = chi.conjugate();
      cd lhs{};
      for (std::uint64_t a = 0; a < c; ++a) lhs += chibar(static_cast<std::int64_t>(a)) * s_a[a];
      const cd t = gauss_sum(chibar);
      tau2.push_back(t * t);
      out.gauss_max_rel = std::max(out.gauss_max_rel, std::abs(lhs - t * t) / std::max(1.0, std::abs(t * t)));
      ++out.gauss_checks;
    }
    for (std::uint64_t p : primes) {
      if (c % p == 0) continue;
      for (std::uint64_t pv = p; pv <= 50; pv *= p) {
        cd rhs{};
        for (std::size_t i = 0; i < chars.size(); ++i) rhs += tau2[i] * chars[i](static_cast<std::int64_t>(pv));
        rhs /= static_cast<double>(chars.size());
        const double lhs = s_a[pv % c];
        out.spectral_max_rel = std::max(out.spectral_max_rel, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        ++out.spectral_checks;
      }
    }
    for (std::uint64_t m = 1; m <= c; ++m) {
      for (std::uint64_t n = 1; n <= c; ++n) {
        const auto mi = static_cast<std::int64_t>(m), ni = static_cast<std::int64_t>(n);
        if (std::abs(kloosterman(mi, ni, c)) > weil_majorant(mi, ni, c) * (1 + 1e-12) + 1e-9) ++out.weil_violations;
        ++out.weil_checks;
      }
    }
  }
  return out;
}

}  // namespace nldlab
