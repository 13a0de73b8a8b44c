#include "nldlab/lfunc.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nldlab/arith.hpp"
#include "nldlab/quadrature.hpp"
#include "nldlab/special.hpp"

namespace nldlab {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// Gamma-factor shift a: 0 for even chi, 1 for odd chi.
int gamma_shift(const DirichletCharacter& chi) { return chi.parity() == 1 ? 0 : 1; }

void require_primitive_nonprincipal(const DirichletCharacter& chi, const char* who) {
  if (!chi.primitive() || chi.modulus() < 3) {
    throw std::invalid_argument(std::string(who) + ": chi must be primitive with q >= 3");
  }
}

// Composite Gauss-Legendre of a complex integrand over [a, b] with panels of
// width at most h; panels are reduced in a fixed order.
template <class F>
cplx integrate_panels(F&& f, double a, double b, double h) {
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  const double w = (b - a) / panels;
  std::vector<cplx> part(panels);
#pragma omp parallel for schedule(dynamic, 4)
  for (int p = 0; p < panels; ++p) {
    part[p] = integrate_gl(f, a + p * w, a + (p + 1) * w, 1);
  }
  cplx total{};
  for (const auto& v : part) total += v;
  return total;
}

}  // namespace

// ---------------------------------------------------------------- values

std::pair<cplx, cplx> l_eval_with_derivative(const DirichletCharacter& chi, cplx s) {
  const std::uint64_t q = chi.modulus();
  const bool principal = chi.principal();
  if (principal && s == cplx(1.0, 0.0)) throw std::domain_error("l_eval: pole of the principal L-function at s = 1");
  cplx F{}, dF{};
  for (std::uint64_t a = 1; a <= q; ++a) {
    if (chi.phase(static_cast<std::int64_t>(a)) < 0) continue;
    const double x = static_cast<double>(a) / static_cast<double>(q);
    // For non-principal chi the pole parts cancel, so the regularized form
    // is exact and stays finite at s = 1.
    const auto [v, d] = principal ? hurwitz_zeta_with_derivative(s, x) : hurwitz_zeta_regularized(s, x);
    const cplx c = chi(static_cast<std::int64_t>(a));
    F += c * v;
    dF += c * d;
  }
  const double lq = std::log(static_cast<double>(q));
  const cplx qs = std::exp(-s * lq);
  return {qs * F, qs * (dF - lq * F)};
}

cplx l_eval(const DirichletCharacter& chi, cplx s) { return l_eval_with_derivative(chi, s).first; }

LogDerivative log_derivative(const DirichletCharacter& chi, cplx s, LogDerivativeMode mode, double tol) {
  LogDerivative out;
  if (mode == LogDerivativeMode::ratio) {
    const auto [v, d] = l_eval_with_derivative(chi, s);
    if (std::abs(v) < 1e-8) throw std::domain_error("log_derivative: |L| < 1e-8, too close to a zero");
    out.value = d / v;
    return out;
  }
  const double sig = s.real();
  if (sig < 1.5) throw std::invalid_argument("log_derivative: series mode needs Re s >= 3/2");
  // psi(x) < 1.03883 x for all x > 0, so by partial summation
  // sum_{n > M} Lambda(n) n^{-sig} <= 1.03883 sig M^{1-sig} / (sig - 1).
  auto tail = [&](double M) { return 1.03883 * sig / (sig - 1) * std::pow(M, 1 - sig); };
  // Past the cap the sum stops early and the caller sees the larger tail.
  constexpr double kSeriesCap = 33554432.0;
  double M = 64;
  while (tail(M) > tol && M < kSeriesCap) M *= 2;
  const auto limit = static_cast<std::uint64_t>(M);
  const auto primes = arith::primes_up_to(limit);
  const std::uint64_t q = chi.modulus();
  std::vector<cplx> part(primes.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const std::uint64_t p = primes[i];
    if (q % p == 0) continue;
    const double lp = std::log(static_cast<double>(p));
    cplx acc{};
    for (std::uint64_t pk = p, e = 1; pk <= limit; ++e) {
      acc += chi(static_cast<std::int64_t>(pk % q)) * std::exp(-s * (static_cast<double>(e) * lp));
      if (pk > limit / p) break;
      pk *= p;
    }
    part[i] = -lp * acc;
  }
  cplx total{};
  for (std::size_t i = part.size(); i-- > 0;) total += part[i];
  out.value = total;
  out.tail_bound = tail(M);
  out.terms = limit;
  return out;
}

cplx root_number(const DirichletCharacter& chi) {
  const int a = gamma_shift(chi);
  const cplx ia = a == 0 ? cplx(1.0) : kI;
  return gauss_sum(chi) / (ia * std::sqrt(static_cast<double>(chi.modulus())));
}

cplx log_derivative_reflected(const DirichletCharacter& chi, cplx s) {
  require_primitive_nonprincipal(chi, "log_derivative_reflected");
  const double a = gamma_shift(chi);
  const double q = static_cast<double>(chi.modulus());
  const cplx mirror = log_derivative(chi.conjugate(), 1.0 - s).value;
  return -std::log(q / kPi) - 0.5 * digamma((s + a) / 2.0) - 0.5 * digamma((1.0 - s + a) / 2.0) - mirror;
}

double hardy_z(const DirichletCharacter& chi, double t) {
  require_primitive_nonprincipal(chi, "hardy_z");
  const double a = gamma_shift(chi);
  const double q = static_cast<double>(chi.modulus());
  const double theta = 0.5 * t * std::log(q / kPi) + log_gamma(cplx(0.5 + a, t) / 2.0).imag();
  const cplx rot = std::exp(kI * theta) / std::sqrt(root_number(chi));
  return (rot * l_eval(chi, cplx(0.5, t))).real();
}

// --------------------------------------------------- argument principle

namespace {

struct Winding {
  double value = 0.0;      // (1/2 pi) Im of the contour integral of L'/L
  double log_modulus = 0;  // (1/2 pi) Re of the same; zero for a closed loop
  long tracked = 0;        // winding from continuous argument tracking
  bool near_zero = false;
};

// Integrates L'/L along the closed polygon. Each accepted segment has a small
// argument increment and a Gauss-Legendre integral that matches
// log(L(b)/L(a)); otherwise it is bisected.
Winding polygon_winding(const DirichletCharacter& chi, const std::vector<cplx>& poly) {
  Winding w;
  double arg_total = 0.0;
  cplx integral{};
  struct Seg {
    cplx a, b, la, lb;
  };
  auto value = [&](cplx s) { return l_eval(chi, s); };
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const cplx z0 = poly[e], z1 = poly[(e + 1) % poly.size()];
    std::vector<Seg> stack{{z0, z1, value(z0), value(z1)}};
    // Process left to right so the summation order is fixed.
    while (!stack.empty()) {
      Seg sg = stack.back();
      stack.pop_back();
      if (std::abs(sg.la) < 1e-7 || std::abs(sg.lb) < 1e-7 || std::abs(sg.b - sg.a) < 1e-9) {
        w.near_zero = true;
        return w;
      }
      const double darg = std::arg(sg.lb / sg.la);
      bool accept = std::abs(darg) < kPi / 3 && std::abs(sg.b - sg.a) <= 0.5;
      cplx seg_int{};
      if (accept) {
        const cplx dir = sg.b - sg.a;
        bool tiny = false;
        seg_int = integrate_gl(
                      [&](double x) {
                        const auto [v, d] = l_eval_with_derivative(chi, sg.a + x * dir);
                        if (std::abs(v) < 1e-7) tiny = true;
                        return d / v;
                      },
                      0.0, 1.0, 1) *
                  dir;
        if (tiny) {
          w.near_zero = true;
          return w;
        }
        const cplx exact = std::log(sg.lb / sg.la);
        accept = std::abs(seg_int - exact) < 1e-8;
      }
      if (accept) {
        arg_total += darg;
        integral += seg_int;
        continue;
      }
      const cplx mid = 0.5 * (sg.a + sg.b);
      const cplx lm = value(mid);
      stack.push_back({mid, sg.b, lm, sg.lb});
      stack.push_back({sg.a, mid, sg.la, lm});
    }
  }
  w.value = integral.imag() / (2 * kPi);
  w.log_modulus = integral.real() / (2 * kPi);
  w.tracked = std::lround(arg_total / (2 * kPi));
  return w;
}

}  // namespace

ZeroBoxCount count_zeros_rectangle(const DirichletCharacter& chi, double beta1, double beta2, double t1,
                                   double t2) {
  require_primitive_nonprincipal(chi, "count_zeros_rectangle");
  if (!(beta1 < beta2) || !(t1 <= t2)) throw std::invalid_argument("count_zeros_rectangle: empty box");
  ZeroBoxCount out;
  out.q = chi.modulus();
  out.char_index = character_index(chi);
  out.beta1 = beta1;
  out.beta2 = beta2;
  out.t1 = t1;
  out.t2 = t2;
  if (t1 == t2) return out;
  // s = 0 is a trivial zero for even chi; no non-trivial zero has Re < 1e-4
  // at the heights considered, so the left edge steps inside.
  if (chi.parity() == 1 && beta1 <= 1e-4 && t1 <= 0 && t2 >= 0 && beta2 > 1e-4) beta1 = 1e-4;
  constexpr int kMaxRetries = 6;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    // Half-open box: edges that must stay outside move down, the lower
    // edges move down so that zeros on them remain counted.
    const double d = attempt * 1e-4;
    const double b1 = beta1 - (beta1 > 1e-4 ? d : -d);
    const double b2 = beta2 - d, lo = t1 - d, hi = t2 - d;
    const std::vector<cplx> poly{{b1, lo}, {b2, lo}, {b2, hi}, {b1, hi}};
    const Winding w = polygon_winding(chi, poly);
    if (w.near_zero) {
      ++out.retries;
      continue;
    }
    const long rounded = std::lround(w.value);
    out.residual = std::max(std::abs(w.value - static_cast<double>(rounded)), std::abs(w.log_modulus));
    if (rounded != w.tracked) out.residual = std::max(out.residual, 1.0);
    if (out.residual < 0.1) {
      out.count = rounded;
      return out;
    }
    ++out.retries;
  }
  throw std::runtime_error("count_zeros_rectangle: contour integral did not settle on an integer");
}

ZeroBoxCount count_zeros_box(const DirichletCharacter& chi, double beta1, double beta2, double t1, double t2) {
  if (!(0.0 <= beta1 && beta1 < beta2 && beta2 <= 1.0) || !(0.0 <= t1 && t1 <= t2)) {
    throw std::invalid_argument("count_zeros_box: need 0 <= beta1 < beta2 <= 1 and 0 <= t1 <= t2");
  }
  ZeroBoxCount out;
  out.q = chi.modulus();
  out.char_index = character_index(chi);
  out.beta1 = beta1;
  out.beta2 = beta2;
  out.t1 = t1;
  out.t2 = t2;
  if (t1 == t2) return out;
  if (t1 == 0.0) {
    const auto r = count_zeros_rectangle(chi, beta1, beta2, -t2, t2);
    out.count = r.count;
    out.residual = r.residual;
    out.retries = r.retries;
    return out;
  }
  // Zeros of chi below the real axis are conjugates of zeros of conj(chi).
  const auto up = count_zeros_rectangle(chi, beta1, beta2, t1, t2);
  const auto down = count_zeros_rectangle(chi.conjugate(), beta1, beta2, t1, t2);
  out.count = up.count + down.count;
  out.residual = std::max(up.residual, down.residual);
  out.retries = up.retries + down.retries;
  return out;
}

// ----------------------------------------------------------------- zeros

ZeroList find_zeros(const DirichletCharacter& chi, double T) {
  require_primitive_nonprincipal(chi, "find_zeros");
  if (!(T > 0)) throw std::invalid_argument("find_zeros: T must be positive");
  ZeroList out;
  out.q = chi.modulus();
  out.char_index = character_index(chi);
  out.height = T;
  out.certified_count = count_zeros_rectangle(chi, 0.0, 1.0, 0.0, T).count;

  auto Z = [&](double t) { return hardy_z(chi, t); };
  double step = 0.05;
  for (int level = 0; level < 5; ++level, step /= 2) {
    const int n = static_cast<int>(std::ceil(T / step));
    std::vector<double> ts(n + 1), zs(n + 1);
    for (int i = 0; i <= n; ++i) ts[i] = std::min(T, i * step);
#pragma omp parallel for schedule(static)
    for (int i = 0; i <= n; ++i) zs[i] = Z(ts[i]);
    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
      if (zs[i] == 0.0 && i > 0) {
        roots.push_back(ts[i]);
        continue;
      }
      if ((zs[i] < 0) == (zs[i + 1] < 0) || zs[i + 1] == 0.0) continue;
      std::uintmax_t iters = 100;
      const auto tol = boost::math::tools::eps_tolerance<double>(44);
      const auto [lo, hi] = boost::math::tools::toms748_solve(Z, ts[i], ts[i + 1], zs[i], zs[i + 1], tol, iters);
      roots.push_back(0.5 * (lo + hi));
    }
    if (zs[n] == 0.0) roots.push_back(ts[n]);
    out.ordinates = std::move(roots);
    out.step = step;
    if (static_cast<long>(out.ordinates.size()) == out.certified_count) {
      out.certified = true;
      break;
    }
  }
  return out;
}

std::vector<double> zero_ordinates(const DirichletCharacter& chi, double T) {
  const auto up = find_zeros(chi, T);
  if (!up.certified) throw std::runtime_error("zero_ordinates: zero list could not be certified");
  std::vector<double> all(up.ordinates.begin(), up.ordinates.end());
  if (chi.is_real()) {
    for (double g : up.ordinates) all.push_back(-g);
  } else {
    const auto down = find_zeros(chi.conjugate(), T);
    if (!down.certified) throw std::runtime_error("zero_ordinates: zero list could not be certified");
    for (double g : down.ordinates) all.push_back(-g);
  }
  std::sort(all.begin(), all.end());
  return all;
}

ZeroSymmetryCheck zero_symmetry_check(const DirichletCharacter& chi, double T) {
  return zero_symmetry_check(chi, find_zeros(chi, T), find_zeros(chi.conjugate(), T));
}

ZeroSymmetryCheck zero_symmetry_check(const DirichletCharacter& chi, const ZeroList& up, const ZeroList& down) {
  const DirichletCharacter bar = chi.conjugate();
  if (!up.certified || !down.certified) throw std::runtime_error("zero_symmetry_check: uncertified zero list");
  ZeroSymmetryCheck out;
  out.zeros = up.ordinates.size() + down.ordinates.size();
  auto Z = [&](double t) { return hardy_z(chi, t); };
  for (double g : down.ordinates) {
    double h = 1e-4, lo = -g - h, hi = -g + h;
    double zlo = Z(lo), zhi = Z(hi);
    while ((zlo < 0) == (zhi < 0) && h < 0.01) {
      h *= 4;
      lo = -g - h;
      hi = -g + h;
      zlo = Z(lo);
      zhi = Z(hi);
    }
    if ((zlo < 0) == (zhi < 0)) {
      out.conjugation = std::max(out.conjugation, h);
      continue;
    }
    std::uintmax_t iters = 100;
    const auto [a, b] =
        boost::math::tools::toms748_solve(Z, lo, hi, zlo, zhi, boost::math::tools::eps_tolerance<double>(44), iters);
    out.conjugation = std::max(out.conjugation, std::abs(0.5 * (a + b) + g));
  }
  for (double g : up.ordinates) {
    const auto [v, d] = l_eval_with_derivative(bar, cplx(0.5, -g));
    out.reflection = std::max(out.reflection, std::abs(v) / std::abs(d));
  }
  return out;
}

// ------------------------------------------------------------- Mellin Psi

MellinPsi::MellinPsi(const TestFunctionPair& phi, double X, std::uint64_t c, int k)
    : phi_(phi), X_(X), L_(std::log(X)), c_(c), k_(k) {
  if (!(X > 1.0)) throw std::invalid_argument("MellinPsi: X must exceed 1");
  if (c < 1) throw std::invalid_argument("MellinPsi: c must be positive");
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("MellinPsi: k must be even and >= 2");
  // a_m = (-1)^m (2 pi/c)^{2m+nu} / (m! (m+nu)!), kept while the largest
  // possible term a_m X^{sigma m} is not yet negligible.
  const int nu = k - 1;
  const long double r = 2 * std::numbers::pi_v<long double> / static_cast<long double>(c);
  long double a = std::pow(r, static_cast<long double>(nu));
  for (int j = 2; j <= nu; ++j) a /= j;
  const long double grow = std::pow(static_cast<long double>(X), static_cast<long double>(phi.sigma()));
  long double peak = 0;
  for (int m = 0; m < 2000; ++m) {
    coeff_.push_back(a);
    const long double size = std::abs(a) * std::pow(grow, static_cast<long double>(m));
    if (!std::isfinite(static_cast<double>(std::log10(size)))) {
      coeff_.clear();  // the expansion is not usable in long double
      break;
    }
    peak = std::max(peak, size);
    if (m > 4 && size < 1e-40L * peak) break;
    a *= -r * r / (static_cast<long double>(m + 1) * static_cast<long double>(m + 1 + nu));
  }
}

cplx MellinPsi::series(cplx s, double* rounding) const {
  if (coeff_.empty()) {
    if (rounding) *rounding = std::numeric_limits<double>::infinity();
    return {};
  }
  using lcplx = std::complex<long double>;
  const lcplx sl(s.real(), s.imag());
  const long double L = L_;
  const long double half_nu = (k_ - 1) / 2.0L;
  lcplx total{};
  long double mass = 0;
  for (std::size_t m = 0; m < coeff_.size(); ++m) {
    const lcplx w = L * (sl + static_cast<long double>(m) + half_nu);
    const lcplx term = coeff_[m] * phi_.laplace(w);
    total += term;
    mass += std::abs(term);
  }
  if (rounding) *rounding = static_cast<double>(mass * 4e-18L);
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

int MellinPsi::default_panels(cplx s) const {
  const double sigma = phi_.sigma();
  const double bessel_rate = 2 * kPi * std::pow(X_, sigma / 2) * L_ / static_cast<double>(c_);
  const double omega = L_ * std::abs(s) + bessel_rate;
  // A 20-point panel resolves about 20 radians of phase to ~1e-14 relative;
  // rounding up to a power of two bounds the number of cached node sets.
  const int need = 4 + static_cast<int>(std::ceil(sigma * omega / 20.0));
  int panels = 4;
  while (panels < need) panels *= 2;
  return panels;
}

const std::vector<std::pair<double, double>>& MellinPsi::nodes(int panels) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = node_cache_.find(panels);
  if (it != node_cache_.end()) return *it->second;
  auto v = std::make_unique<std::vector<std::pair<double, double>>>();
  const double sigma = phi_.sigma();
  for (const auto& [a, b] : {std::pair{-sigma, 0.0}, std::pair{0.0, sigma}}) {
    for (const auto& nd : gauss_legendre_nodes(a, b, panels)) {
      const double y = 4 * kPi * std::exp(nd.x * L_ / 2) / static_cast<double>(c_);
      v->emplace_back(nd.x, nd.w * phi_.phihat(nd.x) * bessel_j(k_, y));
    }
  }
  auto& ref = *v;
  node_cache_.emplace(panels, std::move(v));
  return ref;
}

cplx MellinPsi::quadrature(cplx s, int panels) const {
  if (phi_.is_zero()) return {};
  if (panels <= 0) panels = default_panels(s);
  const auto& nd = nodes(panels);
  cplx total{};
  for (const auto& [u, wg] : nd) total += wg * std::exp(u * L_ * s);
  return total;
}

cplx MellinPsi::operator()(cplx s) const {
  if (phi_.is_zero()) return {};
  double rounding = 0.0;
  const cplx v = series(s, &rounding);
  if (rounding < 1e-12) return v;
  return quadrature(s);
}

double MellinPsi::envelope(cplx s) const {
  const double e = phi_.sigma() * std::abs(s.real() + (k_ - 1) / 2.0);
  const double a = std::abs(s) + 1;
  return std::pow(X_, e) / (a * a * std::pow(static_cast<double>(c_), k_ - 1));
}

double MellinPsi::ibp_constant(double re) const {
  if (phi_.is_zero()) return 0.0;
  // g(u) = phihat(u) B(u), B(u) = J_nu(y(u)), y = (4 pi/c) X^{u/2}.
  const int nu = k_ - 1;
  const double half = L_ / 2;
  auto B = [&](double u, double& d1, double& d2) {
    const double y = 4 * kPi * std::exp(u * half) / static_cast<double>(c_);
    const double j0 = bessel_jn(nu, y);
    const double jp = 0.5 * (bessel_jn(nu - 1, y) - bessel_jn(nu + 1, y));
    const double jpp = 0.25 * (bessel_jn(nu - 2, y) - 2 * j0 + bessel_jn(nu + 2, y));
    const double y1 = half * y, y2 = half * half * y;
    d1 = jp * y1;
    d2 = jpp * y1 * y1 + jp * y2;
    return j0;
  };
  auto g2 = [&](double u) {
    double b1, b2;
    const double b0 = B(u, b1, b2);
    const double v = phi_.phihat_d2(u) * b0 + 2 * phi_.phihat_d1(u) * b1 + phi_.phihat(u) * b2;
    return std::abs(v) * std::exp(u * L_ * re);
  };
  const double sigma = phi_.sigma();
  double K = integrate_gl(g2, -sigma, 0.0, 256) + integrate_gl(g2, 0.0, sigma, 256);
  for (const auto& [u, jump] : phi_.phihat_kinks()) {
    double b1, b2;
    K += jump * std::abs(B(u, b1, b2)) * std::exp(u * L_ * re);
  }
  return K * 1.001;  // margin for the quadrature of |g''|
}

// ---------------------------------------------------- contour identities

namespace {

void check_contour_inputs(const DirichletCharacter& chi, std::uint64_t c, int k) {
  require_primitive_nonprincipal(chi, "contour identity");
  if (c < 2) throw std::invalid_argument("contour identity: c must exceed 1");
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("contour identity: k must be even and >= 2");
  for (const auto& f : arith::factorize(c).factors) {
    if (chi.modulus() % f.p != 0) {
      throw std::invalid_argument("contour identity: every prime factor of c must divide the modulus");
    }
  }
}

// -zeta'/zeta(sigma) bounds |L'/L(sigma + it, chi)| for every chi.
double zeta_log_derivative_bound(double sigma) {
  const auto one = enumerate_characters(1).front();
  return -log_derivative(one, cplx(sigma, 0.0)).value.real();
}

}  // namespace

ContourPrimeSumCheck contour_prime_sum_residual(const DirichletCharacter& chi, const TestFunctionPair& phi, double X,
                                                std::uint64_t c, int k, double t_int) {
  check_contour_inputs(chi, c, k);
  if (!(phi.sigma() < 2.0)) throw std::invalid_argument("contour identity: sigma must be below 2");
  ContourPrimeSumCheck out;
  out.t_int = t_int;
  if (phi.is_zero()) return out;
  const double L = std::log(X);
  const double top = std::pow(X, phi.sigma());

  // Left side: finite because phihat vanishes beyond sigma.
  std::complex<long double> acc{};
  long double mass = 0;
  for (std::uint64_t p : arith::primes_up_to(static_cast<std::uint64_t>(top))) {
    if (c % p == 0) continue;
    const double lp = std::log(static_cast<double>(p));
    std::uint64_t pk = p;
    for (int nu = 1;; ++nu) {
      const double u = nu * lp / L;
      if (u >= phi.sigma()) break;
      const double amp = lp / std::sqrt(static_cast<double>(pk)) * phi.phihat(u) *
                         bessel_j(k, 4 * kPi * std::sqrt(static_cast<double>(pk)) / static_cast<double>(c));
      const cplx term = amp * chi(static_cast<std::int64_t>(pk % chi.modulus()));
      acc += std::complex<long double>(term.real(), term.imag());
      mass += std::abs(amp);
      ++out.prime_powers;
      pk *= p;
    }
  }
  out.lhs = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag())) / L;
  out.lhs_certificate = static_cast<double>(mass) * 1e-15 / L;

  // Right side: the line Re s = 2 truncated at |t| <= t_int.
  const MellinPsi psi(phi, X, c, k);
  auto f = [&](double t) {
    return log_derivative(chi, cplx(2.5, t)).value * psi(cplx(2.0, t));
  };
  out.rhs = -integrate_panels(f, -t_int, t_int, 1.0) / (2 * kPi);

  // |L'/L(5/2+it)| <= -zeta'/zeta(5/2) and |Psi(2+it)| <= K/|s log X|^2.
  const double K = psi.ibp_constant(2.0);
  const double tail = 0.5 * (kPi / 2 - std::atan(t_int / 2));  // int_T^inf dt/(t^2+4)
  out.rhs_certificate = zeta_log_derivative_bound(2.5) * K / (L * L) * tail / kPi;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

ZeroExpansionCheck zero_expansion_residual(const DirichletCharacter& chi, const TestFunctionPair& phi, double X,
                                           std::uint64_t c, int k, double T_z) {
  check_contour_inputs(chi, c, k);
  ZeroExpansionCheck out;
  out.height = T_z;
  if (phi.is_zero()) return out;
  const double L = std::log(X);
  const auto zeros = zero_ordinates(chi, T_z + 1.0);  // throws if incomplete

  // Keep the horizontal edges at least 0.1 away from every ordinate.
  double T = T_z;
  auto too_close = [&](double h) {
    return std::any_of(zeros.begin(), zeros.end(), [&](double g) { return std::abs(std::abs(g) - h) < 0.1; });
  };
  while (too_close(T)) T += 0.05;
  if (T > T_z + 0.9) throw std::runtime_error("zero_expansion_residual: could not place the horizontal edges");
  out.height = T;

  const MellinPsi psi(phi, X, c, k);
  const auto right = [&](double t) { return log_derivative(chi, cplx(2.5, t)).value * psi(cplx(2.0, t)); };
  const auto left = [&](double t) { return log_derivative_reflected(chi, cplx(-0.5, t)) * psi(cplx(-1.0, t)); };
  out.line_right = integrate_panels(right, -T, T, 0.5) / (2 * kPi);
  out.line_left = integrate_panels(left, -T, T, 0.5) / (2 * kPi);
  // Top edge runs from 2+iT to -1+iT, bottom edge from -1-iT to 2-iT.
  const auto top = [&](double x) { return log_derivative(chi, cplx(x + 0.5, T)).value * psi(cplx(x, T)); };
  const auto bottom = [&](double x) { return log_derivative(chi, cplx(x + 0.5, -T)).value * psi(cplx(x, -T)); };
  const cplx h_top = -integrate_panels(top, -1.0, 2.0, 0.05);
  const cplx h_bottom = integrate_panels(bottom, -1.0, 2.0, 0.05);
  out.horizontal = (h_top + h_bottom) / (2 * kPi * kI);

  for (double g : zeros) {
    if (std::abs(g) < T) {
      out.zero_sum += psi(cplx(0.0, g));
      ++out.zeros_used;
    }
  }
  if (chi.parity() == 1) out.parity_term = psi(cplx(-0.5, 0.0));
  out.residual = std::abs(out.line_right + out.horizontal - out.line_left - out.zero_sum - out.parity_term);

  // Zero tail: with -1/2 < Re(rho - 1/2) < 1/2 and K convex in the real part,
  // |Psi(rho - 1/2)| <= max(K(-1/2), K(1/2)) / (gamma log X)^2, and
  // sum_{|gamma| >= T} gamma^{-2} <= int_T^inf 2 N(t) t^{-3} dt with
  // N(t) <= (t/pi) log(q t/(2 pi e)) + log(q t) + 10 counting both signs.
  const double q = static_cast<double>(chi.modulus());
  auto count_bound = [&](double t) {
    return std::max(0.0, (t / kPi) * std::log(q * t / (2 * kPi * std::numbers::e))) + std::log(q * t) + 10;
  };
  const double zsum = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double t) { return 2 * count_bound(t) / (t * t * t); }, T,
      std::numeric_limits<double>::infinity(), 15, 1e-10);
  out.zero_tail_certificate =
      std::max(psi.ibp_constant(-0.5), psi.ibp_constant(0.5)) / (L * L) * zsum;

  // Line tails beyond |t| = T. Right line as in the prime-sum check; left line
  // through the functional equation, with |psi(z)| <= |log|z+1|| + pi/2 + 1/|z+1| + 1/|z|.
  const double a = gamma_shift(chi);
  auto dig = [](cplx z) { return std::abs(std::log(std::abs(z + 1.0))) + kPi / 2 + 1 / std::abs(z + 1.0) + 1 / std::abs(z); };
  const double mirror = zeta_log_derivative_bound(1.5);
  const double k_left = psi.ibp_constant(-1.0), k_right = psi.ibp_constant(2.0);
  const double left_tail = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double t) {
        const double ld = std::log(q / kPi) + 0.5 * dig(cplx(-0.5 + a, t) / 2.0) + 0.5 * dig(cplx(1.5 + a, -t) / 2.0) + mirror;
        return ld * k_left / ((1 + t * t) * L * L);
      },
      T, std::numeric_limits<double>::infinity(), 15, 1e-10);
  const double right_tail = zeta_log_derivative_bound(2.5) * k_right / (L * L) * 0.5 * (kPi / 2 - std::atan(T / 2));
  out.line_tail_certificate = (left_tail + right_tail) / kPi;
  return out;
}

}  // namespace nldlab
