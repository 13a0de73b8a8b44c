#include "nldlab/petersson.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "nldlab/arith.hpp"
#include "nldlab/special.hpp"

namespace nldlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

// Neumaier compensated summation; callers feed terms in a fixed order.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

double i_to_k(int k) { return k % 4 == 0 ? 1.0 : -1.0; }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <class T>
bool parse_int(const std::string& field, T& out) {
  const std::string f = trim(field);
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
  return ec == std::errc() && ptr == f.data() + f.size() && !f.empty();
}

// Hecke recursion lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1}).
double hecke_power(double lp, int e) {
  double prev = 1.0, cur = lp;
  if (e == 0) return 1.0;
  for (int j = 1; j < e; ++j) {
    const double next = lp * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// sum_{r > B} d(r) r^{-s} <= s B^{1-s} [(log B + 1)/(s-1) + 1/(s-1)^2], s > 1, B >= 1,
// from D(x) = sum_{r <= x} d(r) <= x (log x + 1) and partial summation.
double divisor_dirichlet_tail(double s, double B) {
  const double lb = std::log(B);
  return s * std::pow(B, 1 - s) * ((lb + 1) / (s - 1) + 1 / ((s - 1) * (s - 1)));
}

void check_weight(int k) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("weight k must be even and >= 2");
}

// The old-form term -(1/(N nu((n,N)))) sum_{l | N^inf} l^{-1} Delta_{k,1}(l^2 m, n) for a
// one-dimensional level-1 space, with its truncation bound.
std::pair<double, double> oldform_term(int k, std::uint64_t N, std::int64_t m, std::int64_t n,
                                       const std::vector<EigenformFixture>* level_one) {
  const int dim = level_one_dimension(k);
  if (N == 1 || dim == 0) return {0.0, 0.0};
  if (!level_one) {
    throw std::invalid_argument("weight " + std::to_string(k) +
                                " has level-1 cusp forms: the old-form correction needs a level-1 fixture");
  }
  std::vector<const EigenformFixture*> forms;
  for (const auto& f : *level_one) {
    if (f.level == 1 && f.weight == k) forms.push_back(&f);
  }
  if (dim != 1 || forms.size() != 1) {
    throw std::invalid_argument("old-form correction supports a single level-1 form of weight " +
                                std::to_string(k));
  }
  const EigenformFixture& f = *forms.front();
  // Level-1 harmonic weight of the single form: Delta_{k,1}(1,1).
  const auto w = harmonic_averages(k, 1, {{1, 1}}, 4000).front();
  const double omega = w.value;
  const double nd = static_cast<double>(N);
  const double nu = (n % static_cast<std::int64_t>(N) == 0) ? nd + 1 : 1.0;
  const double lN = f.lambda_prime(N);
  const double lam = f.lambda(static_cast<std::uint64_t>(m)) * f.lambda(static_cast<std::uint64_t>(n));
  constexpr int kTerms = 12;
  CompensatedSum acc;
  for (int j = 0; j <= kTerms; ++j) acc.add(std::pow(nd, -j) * hecke_power(lN, 2 * j));
  const double scale = 1.0 / (nd * nu);
  // |lambda(N^{2j})| <= 2j + 1 beyond the cutoff, plus the weight's own truncation.
  double rest = 0.0;
  for (int j = kTerms + 1; j < kTerms + 200; ++j) rest += (2 * j + 1) * std::pow(nd, -j);
  const double bound = scale * std::abs(lam) * (std::abs(omega) * rest + w.tail_majorant * std::abs(acc.value()));
  const double base = omega * lam;
  return {-scale * base * acc.value(), bound};
}

}  // namespace

void validate(const PeterssonQuery& q) {
  check_weight(q.k);
  if (q.N == 0 || (q.N > 1 && !arith::is_prime(q.N))) {
    throw std::invalid_argument("level N must be 1 or prime");
  }
  if (q.m < 1 || q.n < 1) throw std::invalid_argument("m and n must be positive");
  if (q.c_max < q.N) throw std::invalid_argument("c_max must be at least N");
  if (q.N > 1) {
    const auto N = static_cast<std::int64_t>(q.N);
    if (q.m % N == 0) throw std::invalid_argument("(m, N) > 1");
    if (q.n % N == 0 && (q.n / N) % N == 0) throw std::invalid_argument("(n, N^2) does not divide N");
  }
}

double EigenformFixture::lambda_prime(std::uint64_t p) const {
  const auto it = a_p.find(p);
  if (it == a_p.end()) {
    throw std::out_of_range("fixture " + label + ": no a_p for p = " + std::to_string(p));
  }
  return static_cast<double>(it->second) / std::pow(static_cast<double>(p), (weight - 1) / 2.0);
}

double EigenformFixture::lambda(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("lambda(0) is undefined");
  double out = 1.0;
  for (const auto& pp : arith::factorize(n).factors) {
    const double lp = lambda_prime(pp.p);
    out *= (level % pp.p == 0) ? std::pow(lp, pp.e) : hecke_power(lp, pp.e);
  }
  return out;
}

std::pair<std::complex<double>, std::complex<double>> EigenformFixture::satake(std::uint64_t p) const {
  if (level % p == 0) throw std::invalid_argument("satake: p divides the level");
  const double lp = lambda_prime(p);
  const std::complex<double> root = std::sqrt(std::complex<double>(lp * lp - 4.0, 0.0));
  return {(lp + root) / 2.0, (lp - root) / 2.0};
}

std::vector<std::string> fixture_violations(const EigenformFixture& f) {
  std::vector<std::string> out;
  const std::string tag = "fixture " + f.label + " (level " + std::to_string(f.level) + ", weight " +
                          std::to_string(f.weight) + "): ";
  if (f.weight < 2 || f.weight % 2 != 0) out.push_back(tag + "weight must be even and >= 2");
  if (f.level == 0 || (f.level > 1 && !arith::is_prime(f.level))) out.push_back(tag + "level must be 1 or prime");
  for (const auto& [p, a] : f.a_p) {
    if (!arith::is_prime(p)) {
      out.push_back(tag + std::to_string(p) + " is not prime");
      continue;
    }
    const double lp = f.lambda_prime(p);
    if (f.level % p == 0) {
      const double cap = (1 + 1e-9) / std::sqrt(static_cast<double>(p));
      if (std::abs(lp) > cap) {
        out.push_back(tag + "|lambda(" + std::to_string(p) + ")| = " + std::to_string(std::abs(lp)) +
                      " exceeds N^{-1/2}");
      }
    } else if (std::abs(lp) > 2.0 * (1 + 1e-12)) {
      out.push_back(tag + "a_" + std::to_string(p) + " = " + std::to_string(a) + " violates the Deligne bound");
    }
  }
  return out;
}

std::vector<EigenformFixture> load_fixtures(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture file " + path);
  std::vector<std::string> errors;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  using Key = std::tuple<std::uint64_t, int, std::string>;
  std::map<Key, EigenformFixture> groups;
  std::map<std::pair<Key, std::uint64_t>, std::size_t> row_of;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      std::string h = trim(line);
      h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
      if (h != "level,weight,label,p,a_p") {
        errors.push_back("line " + std::to_string(lineno) + ": expected header level,weight,label,p,a_p");
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    EigenformFixture row;
    std::uint64_t p = 0;
    std::int64_t a = 0;
    if (fields.size() != 5 || !parse_int(fields[0], row.level) || !parse_int(fields[1], row.weight) ||
        !parse_int(fields[3], p) || !parse_int(fields[4], a) || trim(fields[2]).empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": malformed row '" + trim(line) + "'");
      continue;
    }
    const Key key{row.level, row.weight, trim(fields[2])};
    auto& f = groups[key];
    f.level = row.level;
    f.weight = row.weight;
    f.label = std::get<2>(key);
    if (f.a_p.count(p)) {
      errors.push_back("line " + std::to_string(lineno) + ": duplicate p = " + std::to_string(p));
      continue;
    }
    f.a_p[p] = a;
    row_of[{key, p}] = lineno;
  }
  if (!header_seen) {
    if (warnings) warnings->push_back("fixture file " + path + " is empty");
    return {};
  }
  std::vector<EigenformFixture> out;
  for (auto& [key, f] : groups) {
    // Row-level bound checks, reported against the offending line.
    for (const auto& [p, a] : f.a_p) {
      EigenformFixture single = f;
      single.a_p = {{p, a}};
      for (const auto& msg : fixture_violations(single)) {
        errors.push_back("line " + std::to_string(row_of[{key, p}]) + ": " + msg);
      }
    }
    out.push_back(std::move(f));
  }
  if (!errors.empty()) {
    std::string msg = "invalid fixture file " + path + ":";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  if (out.empty() && warnings) warnings->push_back("fixture file " + path + " has no rows");
  return out;
}

int level_one_dimension(int k) {
  check_weight(k);
  if (k == 2) return 0;
  return k % 12 == 2 ? k / 12 - 1 : k / 12;
}

double petersson_tail_majorant(int k, std::uint64_t N, std::int64_t m, std::int64_t n, std::uint64_t c_max) {
  check_weight(k);
  if (N == 0 || c_max < N) throw std::invalid_argument("petersson_tail_majorant: need c_max >= N >= 1");
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  const double x0 = 4 * kPi * std::sqrt(mn);
  CompensatedSum direct;
  // Oscillatory range c <= 4 pi sqrt(mn): term by term with the full majorant.
  std::uint64_t start = c_max;
  const auto c_osc = static_cast<std::uint64_t>(std::floor(x0 / static_cast<double>(N))) * N;
  for (std::uint64_t c = (c_max / N + 1) * N; c <= c_osc; c += N) {
    const double cd = static_cast<double>(c);
    direct.add(weil_majorant(m, n, c) * bessel_majorant(k, x0 / cd) / cd);
    start = c;
  }
  // Monotone range: c = N r with r > B, |J_{k-1}(x)| <= (x/2)^{k-1}/(k-1)!, d(N r) <= d(N) d(r).
  const double B = std::floor(static_cast<double>(start) / static_cast<double>(N));
  const double s = k - 0.5;
  const double g = static_cast<double>(std::gcd(m, n));
  const double log_pref = (k - 1) * std::log(2 * kPi * std::sqrt(mn)) - std::lgamma(static_cast<double>(k)) -
                          s * std::log(static_cast<double>(N));
  const double closed = static_cast<double>(arith::divisor_count(N)) * std::sqrt(g) * std::exp(log_pref) *
                        divisor_dirichlet_tail(s, B);
  return 2 * kPi * (direct.value() + closed);
}

std::vector<HarmonicAverage> harmonic_averages(int k, const KloostermanTable& table,
                                               const std::vector<EigenformFixture>* level_one) {
  const auto& pairs = table.pairs;
  for (const auto& pr : pairs) validate({k, table.N, pr.m, pr.n, table.c_max});
  std::vector<HarmonicAverage> out(pairs.size());
  const double ik = i_to_k(k);
  const std::uint64_t count = table.count();
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double x0 = 4 * kPi * std::sqrt(static_cast<double>(pairs[i].m) * static_cast<double>(pairs[i].n));
    CompensatedSum acc;
    // Rounding: error of S times the majorant of J, |S| times the error of J,
    // and one rounding per product and quotient.
    double err = 0.0;
    for (std::uint64_t r = 1; r <= count; ++r) {
      const double c = static_cast<double>(table.N * r);
      const double s = table.values[i][r - 1];
      const double j = bessel_j(k, x0 / c);
      acc.add(s * j / c);
      const double b = bessel_majorant(k, x0 / c);
      err += (kloosterman_rounding_bound(table.N * r) * b + std::abs(s) * kBesselMajorantAccuracy * b +
              4 * kUnitRoundoff * std::abs(s * j)) / c;
    }
    out[i].kloosterman_sum = acc.value();
    out[i].rounding_majorant = 2 * kPi * (err * (1 + 1e-10) + 2 * kUnitRoundoff * std::abs(acc.value())) +
                               4 * kUnitRoundoff * (1 + 2 * kPi * std::abs(acc.value()));
    out[i].c_max = table.c_max;
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& h = out[i];
    const auto [corr, corr_bound] = oldform_term(k, table.N, pairs[i].m, pairs[i].n, level_one);
    h.oldform_correction = corr;
    h.value = (pairs[i].m == pairs[i].n ? 1.0 : 0.0) + 2 * kPi * ik * h.kloosterman_sum + corr;
    h.tail_majorant =
        petersson_tail_majorant(k, table.N, pairs[i].m, pairs[i].n, table.c_max) + corr_bound + h.rounding_majorant;
  }
  return out;
}

std::vector<HarmonicAverage> harmonic_averages(int k, std::uint64_t N, const std::vector<KloostermanPair>& pairs,
                                               std::uint64_t c_max, const std::vector<EigenformFixture>* level_one) {
  for (const auto& pr : pairs) validate({k, N, pr.m, pr.n, c_max});
  return harmonic_averages(k, kloosterman_progression(pairs, N, c_max), level_one);
}

HarmonicAverage harmonic_average(const PeterssonQuery& q, const std::vector<EigenformFixture>* level_one) {
  validate(q);
  return harmonic_averages(q.k, q.N, {{q.m, q.n}}, q.c_max, level_one).front();
}

double eigenform_side_average(const std::vector<EigenformFixture>& fixtures, const std::vector<double>& weights,
                              std::uint64_t m, std::uint64_t n) {
  if (fixtures.size() != weights.size()) {
    throw std::invalid_argument("eigenform_side_average: one weight per fixture");
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    if (fixtures[i].level != fixtures[0].level || fixtures[i].weight != fixtures[0].weight) {
      throw std::invalid_argument("eigenform_side_average: fixtures must share level and weight");
    }
    acc.add(weights[i] * fixtures[i].lambda(m) * fixtures[i].lambda(n));
  }
  return acc.value();
}

PrimeSum averaged_prime_sum(int k, std::uint64_t N, const TestFunctionPair& phi, const PrimeSumOptions& opt) {
  check_weight(k);
  validate({k, N, 1, 1, std::max<std::uint64_t>(N, opt.c_max_floor)});
  if (!(phi.sigma() < 2.0)) throw std::invalid_argument("averaged_prime_sum: support must be below 2");
  if (opt.nu_max < 2) throw std::invalid_argument("averaged_prime_sum: nu_max must be at least 2");
  if (N > 1 && level_one_dimension(k) != 0) {
    throw std::invalid_argument("averaged_prime_sum: weight " + std::to_string(k) + " has level-1 cusp forms");
  }
  PrimeSum out;
  const double X = static_cast<double>(k) * k * static_cast<double>(N);
  const double L = std::log(X);
  out.log_x = L;
  const double cut = phi.sigma() * L;  // phihat(nu log p / L) = 0 once nu log p >= cut
  const auto limit = static_cast<std::uint64_t>(std::floor(std::exp(cut)));

  double high_nu = 0.0;
  std::vector<KloostermanPair> pairs{{1, 1}};
  for (const auto p32 : arith::primes_up_to(limit)) {
    const std::uint64_t p = p32;
    if (p == N) continue;
    const double lp = std::log(static_cast<double>(p));
    std::uint64_t pk = 1;
    for (int nu = 1; nu * lp < cut; ++nu) {
      pk *= p;
      const double w = std::pow(static_cast<double>(p), -nu / 2.0) * phi.phihat(nu * lp / L) * lp / L;
      if (nu <= opt.nu_max) {
        PrimeSumTerm t;
        t.p = p;
        t.nu = nu;
        t.weight = w;
        t.c_max = std::max<std::uint64_t>(
            {opt.c_max_floor, N, static_cast<std::uint64_t>(std::ceil(opt.c_max_slope * std::sqrt(static_cast<double>(pk))))});
        out.terms.push_back(t);
        pairs.push_back({static_cast<std::int64_t>(pk), 1});
      } else {
        // |sum_f omega_f lambda_f(p^nu)| <= (nu + 1) Omega by Deligne.
        high_nu += 2.0 * (nu + 1) * std::abs(w);
      }
    }
  }

  std::uint64_t c_top = std::max<std::uint64_t>(opt.c_max_floor, N);
  for (const auto& t : out.terms) c_top = std::max(c_top, t.c_max);
  const auto table = kloosterman_progression(pairs, N, c_top);

  // Omega from the (1, 1) row, truncated at the floor.
  {
    const std::uint64_t c_omega = std::max<std::uint64_t>(opt.c_max_floor, N);
    CompensatedSum acc;
    for (std::uint64_t r = 1; r <= c_omega / N; ++r) {
      const double c = static_cast<double>(N * r);
      acc.add(table.values[0][r - 1] * bessel_j(k, 4 * kPi / c) / c);
    }
    out.omega = 1.0 + 2 * kPi * i_to_k(k) * acc.value();
    out.omega_tail = petersson_tail_majorant(k, N, 1, 1, c_omega);
  }

#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < out.terms.size(); ++i) {
    auto& t = out.terms[i];
    const std::int64_t m = pairs[i + 1].m;
    const double x0 = 4 * kPi * std::sqrt(static_cast<double>(m));
    CompensatedSum acc;
    for (std::uint64_t r = 1; r <= t.c_max / N; ++r) {
      const double c = static_cast<double>(N * r);
      acc.add(table.values[i + 1][r - 1] * bessel_j(k, x0 / c) / c);
    }
    t.c_sum = acc.value();
    t.c_tail = petersson_tail_majorant(k, N, m, 1, t.c_max) / (2 * kPi);
  }

  CompensatedSum raw, tails;
  for (const auto& t : out.terms) {
    raw.add(t.weight * t.c_sum);
    tails.add(std::abs(t.weight) * t.c_tail);
  }
  out.raw_sum = raw.value();
  const double omega = out.omega;
  if (!(omega > out.omega_tail)) throw std::runtime_error("averaged_prime_sum: Omega not resolved at this c_max");
  out.value = -4 * kPi * i_to_k(k) * out.raw_sum / omega;
  // c tails, plus the effect of Omega's own truncation on the quotient.
  out.c_tail_majorant = 4 * kPi * tails.value() / (omega - out.omega_tail) +
                        4 * kPi * std::abs(out.raw_sum) * out.omega_tail / (omega * (omega - out.omega_tail));
  out.high_nu_majorant = high_nu;
  out.discard_majorant = out.c_tail_majorant + out.high_nu_majorant;
  return out;
}

DensityReport one_level_density(int k, std::uint64_t N, const TestFunctionPair& phi, const PrimeSumOptions& opt) {
  check_weight(k);
  if (!arith::is_prime(N)) throw std::invalid_argument("one_level_density: N must be prime");
  DensityReport r;
  r.k = k;
  r.N = N;
  r.X = static_cast<double>(k) * k * static_cast<double>(N);
  r.phi_name = phi.name();
  r.sigma = phi.sigma();
  r.prime_sum = averaged_prime_sum(k, N, phi, opt);
  const double L = std::log(r.X);
  const double cut = phi.sigma() * L;

  r.conductor_term = phi.phihat(0.0) * std::log(static_cast<double>(N) / (kPi * kPi)) / L;
  r.archimedean = phi.is_zero() ? 0.0 : archimedean_term(k, r.X, phi);

  CompensatedSum square;
  double hecke = 0.0;
  const auto limit = static_cast<std::uint64_t>(std::floor(std::exp(cut)));
  for (const auto p32 : arith::primes_up_to(limit)) {
    const std::uint64_t p = p32;
    if (p == N) continue;
    const double lp = std::log(static_cast<double>(p));
    if (2 * lp < cut) square.add(2.0 / static_cast<double>(p) * phi.phihat(2 * lp / L) * lp / L);
    // The lambda(p^{nu-2}) pieces that the Hecke relation splits off for nu >= 3.
    for (int nu = 3; nu * lp < cut; ++nu) {
      const double w = std::pow(static_cast<double>(p), -nu / 2.0) * phi.phihat(nu * lp / L) * lp / L;
      hecke += 2.0 * (nu - 1) * std::abs(w);
    }
  }
  r.square_primes = square.value();

  // p = N: alpha_f(N) = lambda_f(N) of modulus N^{-1/2}, beta_f(N) = 0.
  double level_terms = 0.0;
  const double lN = std::log(static_cast<double>(N));
  for (int nu = 1; nu * lN < cut; ++nu) {
    level_terms += 2.0 * std::pow(static_cast<double>(N), -static_cast<double>(nu)) *
                   std::abs(phi.phihat(nu * lN / L)) * lN / L;
  }

  r.main_prime_sum = r.prime_sum.value;
  r.discard_majorant = r.prime_sum.discard_majorant + hecke + level_terms;
  r.omega = r.prime_sum.omega;
  r.total = r.conductor_term + r.archimedean + r.square_primes + r.main_prime_sum;
  r.target = katz_sarnak_target(phi);
  r.residual = r.total - r.target;
  return r;
}

}  // namespace nldlab
