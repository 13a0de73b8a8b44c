#include "nldlab/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nldlab/quadrature.hpp"
#include "nldlab/testfn.hpp"

namespace nldlab {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2j} itself, needed by the Stirling and digamma series (j <= 10).
constexpr std::array<double, 11> kBernoulli = {
    1.0,          1.0 / 6,      -1.0 / 30,    1.0 / 42,      -1.0 / 30,        5.0 / 66,
    -691.0 / 2730, 7.0 / 6,     -3617.0 / 510, 43867.0 / 798, -174611.0 / 330};

// B_{2j} / (2j)! for j = 1..kBernoulliTerms. Exact values for j <= 10; beyond
// that B_{2j}/(2j)! = (-1)^{j+1} 2 zeta(2j) / (2 pi)^{2j}, where a 60-term sum
// already gives zeta(2j) to full precision.
constexpr int kBernoulliTerms = 40;

const std::array<double, kBernoulliTerms + 1>& bernoulli_over_factorial() {
  static const auto table = [] {
    std::array<double, kBernoulliTerms + 1> t{};
    long double fact = 1;
    for (int j = 1; j <= kBernoulliTerms; ++j) {
      fact *= static_cast<long double>(2 * j - 1) * (2 * j);
      if (j <= 10) {
        t[j] = static_cast<double>(kBernoulli[j] / fact);
        continue;
      }
      long double z = 0;
      for (int n = 60; n >= 1; --n) z += std::pow(static_cast<long double>(n), -2.0L * j);
      const long double v = 2 * z / std::pow(2 * std::numbers::pi_v<long double>, 2.0L * j);
      t[j] = static_cast<double>(j % 2 == 1 ? v : -v);
    }
    return t;
  }();
  return table;
}

}  // namespace

// ---------------------------------------------------------------- Bessel J

double bessel_series_radius(int nu) { return 2.0 * std::sqrt(std::abs(nu) + 1.0); }

double bessel_jn_series(int nu, double x) {
  if (nu < 0) return (nu % 2 == 0 ? 1 : -1) * bessel_jn_series(-nu, x);
  if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
  const long double h = static_cast<long double>(x) / 2;
  const long double h2 = h * h;
  long double term = std::exp(nu * std::log(h) - std::lgamma(static_cast<long double>(nu) + 1));
  long double sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= -h2 / (static_cast<long double>(m) * (m + nu));
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum) && h2 < static_cast<long double>(m + 1) * (m + 1 + nu)) break;
  }
  return static_cast<double>(sum);
}

double bessel_jn_recurrence(int nu, double x) {
  if (nu < 0) return (nu % 2 == 0 ? 1 : -1) * bessel_jn_recurrence(-nu, x);
  if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
  const double big = std::max(static_cast<double>(nu), x);
  int start = static_cast<int>(big + 25 + 20 * std::cbrt(big));
  if (start % 2 == 1) ++start;
  // Downward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalized by
  // J_0 + 2 sum_{k>=1} J_{2k} = 1.
  double jp1 = 0.0;
  double j = 1e-30;
  double norm = 2 * j;  // start is even
  double result = (start == nu) ? j : 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm1 = (2.0 * n / x) * j - jp1;
    jp1 = j;
    j = jm1;
    const int m = n - 1;
    if (m == nu) result = j;
    if (m == 0) {
      norm += j;
    } else if (m % 2 == 0) {
      norm += 2 * j;
    }
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      norm *= 1e-250;
      result *= 1e-250;
    }
  }
  return result / norm;
}

double bessel_jn_asymptotic(int nu, double x) {
  if (nu < 0) return (nu % 2 == 0 ? 1 : -1) * bessel_jn_asymptotic(-nu, x);
  const double mu = 4.0 * nu * nu;
  double p = 0.0, q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    if (k > 0) term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last && k > 2) break;
    const int sign = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (mag < 1e-17 * std::abs(p)) break;
    last = mag;
  }
  // cos(x - phase) with phase = (2 nu + 1) pi / 4 reduced exactly mod 2 pi.
  const int eighth = (2 * nu + 1) % 8;
  const double phase = eighth * kPi / 4;
  const double cx = std::cos(x), sx = std::sin(x);
  const double cp = std::cos(phase), sp = std::sin(phase);
  const double cw = cx * cp + sx * sp;
  const double sw = sx * cp - cx * sp;
  return std::sqrt(2.0 / (kPi * x)) * (p * cw - q * sw);
}

double bessel_jn(int nu, double x) {
  if (x < 0.0 || std::isnan(x)) throw std::domain_error("bessel_jn: x must be non-negative");
  const int a = std::abs(nu);
  if (x <= bessel_series_radius(a)) return bessel_jn_series(nu, x);
  if (x >= 1000.0 && x >= 1.5 * a * a) return bessel_jn_asymptotic(nu, x);
  return bessel_jn_recurrence(nu, x);
}

double bessel_j(int k, double x) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("bessel_j: k must be even and >= 2");
  if (x < 0.0) throw std::domain_error("bessel_j: x must be non-negative");
  return bessel_jn(k - 1, x);
}

double bessel_first_branch(int k, double x) {
  if (x <= 0.0) return 0.0;
  return std::exp((k - 1) * std::log(x / 2) - std::lgamma(static_cast<double>(k)));
}

double bessel_second_branch(int k, double x) {
  return std::pow(x, -0.25) * std::pow(std::abs(x - k + 1) + std::cbrt(static_cast<double>(k)), -0.25);
}

double bessel_majorant(int k, double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_majorant: x must be positive");
  return std::min(bessel_first_branch(k, x), kBesselSecondBranchConstant * bessel_second_branch(k, x));
}

// ------------------------------------------------------- digamma, log gamma

cplx digamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw std::domain_error("digamma: pole at a non-positive integer");
  }
  if (z.real() < 0.5) {
    // psi(z) = psi(1 - z) - pi cot(pi z)
    return digamma(1.0 - z) - kPi / std::tan(kPi * z);
  }
  cplx acc{};
  while (std::abs(z) < 16.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const cplx iz2 = 1.0 / (z * z);
  cplx series{};
  cplx pw = iz2;
  for (int k = 1; k <= 10; ++k) {
    series += kBernoulli[k] / (2.0 * k) * pw;
    pw *= iz2;
  }
  return acc + std::log(z) - 0.5 / z - series;
}

cplx log_gamma(cplx z) {
  if (z.real() <= 0.0) throw std::domain_error("log_gamma: requires Re z > 0");
  cplx acc{};
  while (std::abs(z) < 16.0) {
    acc -= std::log(z);
    z += 1.0;
  }
  const cplx iz = 1.0 / z;
  const cplx iz2 = iz * iz;
  cplx series{};
  cplx pw = iz;
  for (int k = 1; k <= 10; ++k) {
    series += kBernoulli[k] / (2.0 * k * (2.0 * k - 1)) * pw;
    pw *= iz2;
  }
  return acc + (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * kPi) + series;
}

// ------------------------------------------------------------ Hurwitz zeta

namespace {

// Euler-Maclaurin for zeta(s, a). With `regularized` the pole part 1/(s-1) is
// removed analytically, so s = 1 is allowed.
std::pair<cplx, cplx> hurwitz_em(cplx s, double a, bool regularized) {
  if (!(a > 0.0 && a <= 1.0)) throw std::domain_error("hurwitz_zeta: a must lie in (0, 1]");
  if (!regularized && s == cplx(1.0, 0.0)) throw std::domain_error("hurwitz_zeta: pole at s = 1");
  const auto& bf = bernoulli_over_factorial();
  const int M = 15 + static_cast<int>(std::ceil(std::abs(s) / 2));
  cplx val{}, der{};
  for (int n = 0; n < M; ++n) {
    const double ln = std::log(n + a);
    const cplx t = std::exp(-s * ln);
    val += t;
    der -= ln * t;
  }
  const double Ma = M + a;
  const double lM = std::log(Ma);
  const cplx Ms = std::exp(-s * lM);  // (M+a)^{-s}
  const cplx sm1 = s - 1.0;
  if (regularized) {
    // ((M+a)^{1-s} - 1)/(s-1) = -lM g(z), z = (1-s) lM, g(z) = (e^z - 1)/z
    const cplx z = -sm1 * lM;
    cplx g, dg;
    if (std::abs(z) < 0.5) {
      g = 0.0;
      dg = 0.0;
      cplx zp = 1.0;  // z^n
      double fact = 1.0;  // (n+1)!
      for (int n = 0; n < 30; ++n) {
        fact *= (n + 1);
        g += zp / fact;
        if (n + 1 < 30) dg += (n + 1.0) * zp / (fact * (n + 2));
        zp *= z;
      }
    } else {
      const cplx ez = std::exp(z);
      g = (ez - 1.0) / z;
      dg = (z * ez - ez + 1.0) / (z * z);
    }
    val += -lM * g + 0.5 * Ms;
    der += lM * lM * dg - 0.5 * lM * Ms;
  } else {
    val += Ma * Ms / sm1 + 0.5 * Ms;
    der += -Ma * Ms * (lM / sm1 + 1.0 / (sm1 * sm1)) - 0.5 * lM * Ms;
  }
  // Bernoulli corrections: c_j P_j(s) (M+a)^{-s-2j+1}, P_j = s(s+1)...(s+2j-2)
  cplx P = s, dP = 1.0;
  cplx pw = Ms / Ma;  // (M+a)^{-s-1}
  const double inv2 = 1.0 / (Ma * Ma);
  for (int j = 1; j <= kBernoulliTerms; ++j) {
    const cplx tv = bf[j] * P * pw;
    const cplx td = bf[j] * (dP - lM * P) * pw;
    val += tv;
    der += td;
    if (std::abs(tv) < 1e-17 * std::abs(val) && std::abs(td) < 1e-17 * (std::abs(der) + 1e-300)) break;
    // P_{j+1} = P_j (s+2j-1)(s+2j)
    const cplx f1 = s + (2.0 * j - 1), f2 = s + 2.0 * j;
    dP = dP * f1 * f2 + P * (f1 + f2);
    P = P * f1 * f2;
    pw *= inv2;
  }
  return {val, der};
}

}  // namespace

std::pair<cplx, cplx> hurwitz_zeta_with_derivative(cplx s, double a) { return hurwitz_em(s, a, false); }

std::pair<cplx, cplx> hurwitz_zeta_regularized(cplx s, double a) { return hurwitz_em(s, a, true); }

cplx hurwitz_zeta(cplx s, double a) { return hurwitz_zeta_with_derivative(s, a).first; }

// ---------------------------------------------------- archimedean term

double archimedean_term(int k, double X, const TestFunctionPair& phi) {
  if (!(X > 1.0)) throw std::domain_error("archimedean_term: X must exceed 1");
  if (phi.is_zero()) return 0.0;
  const double L = std::log(X);
  const double end = 2 * L * phi.sigma();
  const double h0 = phi.phihat(0.0);
  // int_R psi(a + pi i t/L) phi(t) dt
  //   = int_0^inf [phihat(0) e^{-x}/x - phihat(x/2L) e^{-a x}/(1-e^{-x})] dx,
  // and phihat(x/2L) vanishes for x > 2 L sigma.
  auto piece = [&](double a) {
    auto f = [&](double x) {
      const long double xl = x;
      const long double em = -std::expm1(-xl);  // 1 - e^{-x}
      const long double ea = std::exp(-static_cast<long double>(a) * xl);
      const long double bracket = std::exp(-xl) / xl - ea / em;
      const long double diff = static_cast<long double>(h0 - phi.phihat(x / (2 * L))) * ea / em;
      return static_cast<double>(h0 * bracket + diff);
    };
    const auto r = integrate_adaptive(f, 0.0, end, 1e-14);
    return r.value - h0 * std::expint(-end);  // + phihat(0) E1(end)
  };
  const double a1 = 0.25 + (k + 1) / 4.0;
  const double a2 = 0.25 + (k - 1) / 4.0;
  return (piece(a1) + piece(a2)) / L;
}

ArchimedeanDirect archimedean_term_direct(int k, double X, const TestFunctionPair& phi, double t_max) {
  if (!(X > 1.0)) throw std::domain_error("archimedean_term: X must exceed 1");
  ArchimedeanDirect out;
  if (phi.is_zero()) return out;
  if (kPi * t_max < std::log(X)) throw std::domain_error("archimedean_term_direct: t_max too small");
  const double L = std::log(X);
  const double a1 = 0.25 + (k + 1) / 4.0;
  const double a2 = 0.25 + (k - 1) / 4.0;
  auto integrand = [&](double t) {
    const cplx z(0.0, kPi * t / L);
    return (digamma(a1 + z) + digamma(a2 + z)) * phi.phi(t);
  };
  // phi oscillates with period 1/sigma; about eight panels per period.
  const int panels = std::max(8, static_cast<int>(std::ceil(t_max * phi.sigma() * 8)));
  const cplx pos = integrate_gl(integrand, 0.0, t_max, panels);
  const cplx neg = integrate_gl(integrand, -t_max, 0.0, panels);
  out.value = (pos + neg).real() / L;
  out.imag_residue = (pos + neg).imag() / L;
  // For Re z > 0 and |z| >= 1, |psi(z)| <= |log|z|| + pi/2 + 1/|z|.
  auto tail = [&](double t) {
    const double za = std::hypot(a1, kPi * t / L), zb = std::hypot(a2, kPi * t / L);
    const double ba = std::abs(std::log(za)) + kPi / 2 + 1 / za;
    const double bb = std::abs(std::log(zb)) + kPi / 2 + 1 / zb;
    return (ba + bb) * phi.envelope(t);
  };
  const auto r = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      tail, t_max, std::numeric_limits<double>::infinity(), 15, 1e-10);
  out.tail_bound = 2 * r / L;
  return out;
}

}  // namespace nldlab
