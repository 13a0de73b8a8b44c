#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "nldlab/arith.hpp"
#include "nldlab/bounds.hpp"
#include "nldlab/cache.hpp"
#include "nldlab/characters.hpp"
#include "nldlab/kloosterman.hpp"
#include "nldlab/lfunc.hpp"
#include "nldlab/parallel.hpp"
#include "nldlab/petersson.hpp"
#include "nldlab/testfn.hpp"

#ifndef NLDLAB_DATA_DIR
#define NLDLAB_DATA_DIR "data"
#endif

namespace nldlab::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct Report {
  json config;
  json terms = json::array();
  json majorants = json::array();
  json residuals = json::array();
  json certificates = json::array();
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void certify(const std::string& name, double value, double bound, bool pass) {
    certificates.push_back({{"name", name}, {"value", value}, {"bound", bound}, {"pass", pass}});
  }
  bool all_pass() const {
    return std::all_of(certificates.begin(), certificates.end(), [](const json& c) { return c["pass"].get<bool>(); });
  }
  std::string render(const std::string& format) const {
    if (format == "json") {
      json j{{"config", config},
             {"terms", terms},
             {"majorants", majorants},
             {"residuals", residuals},
             {"certificates", certificates}};
      return j.dump(2) + "\n";
    }
    std::string s;
    auto line = [&s](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      s += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }
};

json config_json(const RunConfig& c) {
  return {{"command", c.command}, {"k", c.k},         {"levels", c.levels},   {"sigma", c.sigma},
          {"phihat", c.phihat},   {"c_max", c.c_max}, {"c_max_slope", c.c_max_slope},
          {"nu_max", c.nu_max},   {"fixture", c.fixture}, {"fixture_c_max", c.fixture_c_max},
          {"T", c.T},             {"t_int", c.t_int}, {"moduli", c.moduli},   {"q_max", c.q_max},
          {"betas", c.betas},     {"X", c.X},         {"c", c.c},             {"eps", c.eps},
          {"cache_dir", c.cache_dir}, {"format", c.format}, {"workers", c.workers}};
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f || !f.write(text.data(), static_cast<std::streamsize>(text.size())) || !f.flush()) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot write " + path.string());
  }
}

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config file " + path + " line " + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// The --config value, found before CLI11 parses so the file can be read first.
std::optional<std::string> find_config_flag(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

std::vector<int> even_weights_up_to(int k_max) {
  std::vector<int> ks;
  for (int k = 2; k <= k_max; k += 2) ks.push_back(k);
  return ks;
}

int single_weight(const RunConfig& cfg, int fallback) {
  if (cfg.k.empty()) return fallback;
  if (cfg.k.size() != 1) throw UsageError(cfg.command + " takes a single weight");
  return cfg.k.front();
}

void check_weight_arg(int k) {
  if (k < 2 || k % 2 != 0) throw UsageError("weight k must be even and >= 2, got " + std::to_string(k));
}

// ------------------------------------------------------------------ theta

Report run_theta(const RunConfig& cfg) {
  Report r;
  r.header = {"k", "theta_closed_form", "theta_optimized", "beta_star", "abs_diff", "first_branch_infimum"};
  const std::vector<int> ks = cfg.k.empty() ? even_weights_up_to(40) : cfg.k;
  for (int k : ks) check_weight_arg(k);
  double max_diff = 0.0;
  for (int k : ks) {
    const double closed = theta_closed_form(k);
    const ThetaOptimum opt = theta_optimize(k);
    const InfimumReport inf = first_branch_infimum(k);
    const double diff = std::abs(opt.theta - closed);
    max_diff = std::max(max_diff, diff);
    r.rows.push_back({std::to_string(k), num(closed), num(opt.theta), num(opt.beta_star), num(diff), num(inf.value)});
    json trace = json::array();
    for (const auto& [b, v] : opt.trace) trace.push_back({b, v});
    r.terms.push_back({{"k", k},
                       {"theta_closed_form", closed},
                       {"theta", opt.theta},
                       {"beta_star", opt.beta_star},
                       {"left_branch", {{"min", opt.left_min}, {"beta", opt.left_beta}}},
                       {"right_branch", {{"min", opt.right_min}, {"beta", opt.right_beta}}},
                       {"first_branch_infimum",
                        {{"value", inf.value}, {"boundary_limit", inf.boundary_limit}, {"monotone", inf.monotone}}},
                       {"trace", trace}});
    r.residuals.push_back({{"k", k}, {"optimizer_minus_closed_form", opt.theta - closed}});
  }
  r.certify("optimizer_agreement", max_diff, 1e-8, max_diff <= 1e-8);
  return r;
}

// ------------------------------------------------------------- identities

Report run_identities(const RunConfig& cfg) {
  const std::uint64_t c_max = cfg.c_max ? cfg.c_max : 200;
  const IdentitySuiteReport s = kloosterman_identity_suite(c_max);
  Report r;
  r.header = {"identity", "checks", "max_rel_error", "violations"};
  r.rows.push_back({"gauss_kloosterman", std::to_string(s.gauss_checks), num(s.gauss_max_rel), ""});
  r.rows.push_back({"spectral_decomposition", std::to_string(s.spectral_checks), num(s.spectral_max_rel), ""});
  r.rows.push_back({"weil_bound", std::to_string(s.weil_checks), "", std::to_string(s.weil_violations)});
  r.residuals.push_back({{"identity", "gauss_kloosterman"}, {"max_rel", s.gauss_max_rel}, {"checks", s.gauss_checks}});
  r.residuals.push_back(
      {{"identity", "spectral_decomposition"}, {"max_rel", s.spectral_max_rel}, {"checks", s.spectral_checks}});
  r.majorants.push_back({{"name", "weil"}, {"checks", s.weil_checks}, {"violations", s.weil_violations}});
  r.certify("gauss_kloosterman", s.gauss_max_rel, 1e-8, s.gauss_max_rel <= 1e-8);
  r.certify("spectral_decomposition", s.spectral_max_rel, 1e-8, s.spectral_max_rel <= 1e-8);
  r.certify("weil_bound", static_cast<double>(s.weil_violations), 0.0, s.weil_violations == 0);
  return r;
}

// -------------------------------------------------------- petersson-check

Report run_petersson_check(const RunConfig& cfg, const Cache& cache) {
  Report r;
  r.header = {"part", "k", "N", "m", "n", "value", "expected", "abs_error", "bound", "pass"};
  const std::vector<int> ks = cfg.k.empty() ? std::vector<int>{4, 6, 8, 10, 14} : cfg.k;
  for (int k : ks) {
    check_weight_arg(k);
    if (level_one_dimension(k) != 0) {
      throw UsageError("petersson-check: S_" + std::to_string(k) + "(1) is not empty");
    }
  }
  const std::uint64_t c_max = cfg.c_max ? cfg.c_max : 100000;
  const std::vector<KloostermanPair> pairs{{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};
  CacheStatus status{};
  const KloostermanTable table = cached_kloosterman_progression(cache, pairs, 1, c_max, &status);
  r.terms.push_back({{"cache", kloosterman_table_key(pairs, 1, c_max)}, {"status", cache_status_name(status)}});
  for (int k : ks) {
    const auto h = harmonic_averages(k, table);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double v = std::abs(h[i].value);
      const bool pass = v <= h[i].tail_majorant && v <= 1e-4;
      const std::string name =
          "empty_space_k" + std::to_string(k) + "_m" + std::to_string(pairs[i].m) + "_n" + std::to_string(pairs[i].n);
      r.rows.push_back({"empty_space", std::to_string(k), "1", std::to_string(pairs[i].m),
                        std::to_string(pairs[i].n), num(h[i].value), "0", num(v), num(h[i].tail_majorant),
                        pass ? "1" : "0"});
      r.terms.push_back({{"part", "empty_space"}, {"k", k}, {"m", pairs[i].m}, {"n", pairs[i].n},
                         {"value", h[i].value}, {"kloosterman_sum", h[i].kloosterman_sum}, {"c_max", h[i].c_max}});
      r.majorants.push_back({{"name", name}, {"tail_majorant", h[i].tail_majorant}});
      r.certify(name, v, std::min(h[i].tail_majorant, 1e-4), pass);
    }
  }

  const std::string path = cfg.fixture.empty() ? std::string(NLDLAB_DATA_DIR) + "/fixtures/level11_weight2.csv"
                                               : cfg.fixture;
  std::vector<std::string> warnings;
  std::vector<EigenformFixture> fixtures;
  try {
    fixtures = load_fixtures(path, &warnings);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  for (const auto& w : warnings) r.terms.push_back({{"warning", w}});
  for (const auto& f : fixtures) {
    if (f.level < 2 || level_one_dimension(f.weight) != 0) {
      r.terms.push_back({{"fixture", f.label}, {"skipped", "needs a level-1 fixture for the old-form correction"}});
      continue;
    }
    std::vector<KloostermanPair> fp;
    for (std::int64_t n = 1; n <= 5; ++n) {
      if (n % static_cast<std::int64_t>(f.level) != 0) fp.push_back({1, n});
    }
    const std::uint64_t fc = std::max<std::uint64_t>(cfg.fixture_c_max, f.level);
    const KloostermanTable ft = cached_kloosterman_progression(cache, fp, f.level, fc - fc % f.level, &status);
    const auto h = harmonic_averages(f.weight, ft);
    const double omega = h[0].value, omega_tail = h[0].tail_majorant;
    r.terms.push_back({{"fixture", f.label}, {"level", f.level}, {"weight", f.weight}, {"omega", omega},
                       {"c_max", ft.c_max}, {"cache", cache_status_name(status)}});
    r.majorants.push_back({{"name", f.label + "_omega"}, {"tail_majorant", omega_tail}});
    for (std::size_t i = 1; i < fp.size(); ++i) {
      const auto n = static_cast<std::uint64_t>(fp[i].n);
      double expected = 0.0;
      try {
        expected = f.lambda(n);
      } catch (const std::out_of_range&) {
        continue;
      }
      const double ratio = h[i].value / omega;
      const double tail = (h[i].tail_majorant + std::abs(ratio) * omega_tail) / (omega - omega_tail);
      const double err = std::abs(ratio - expected);
      const double bound = std::max(1e-2, tail);
      const std::string name = "fixture_" + f.label + "_lambda" + std::to_string(n);
      r.rows.push_back({"fixture_reversal", std::to_string(f.weight), std::to_string(f.level), "1", std::to_string(n),
                        num(ratio), num(expected), num(err), num(bound), err <= bound ? "1" : "0"});
      r.residuals.push_back({{"name", name}, {"recovered", ratio}, {"fixture", expected}, {"abs_error", err}});
      r.majorants.push_back({{"name", name}, {"certified_tail", tail}});
      r.certify(name, err, bound, err <= bound);
      const double side = eigenform_side_average({f}, {omega}, 1, n);
      r.residuals.push_back({{"name", name + "_eigenform_side"}, {"abs_error", std::abs(side - h[i].value)}});
    }
  }
  return r;
}

// ---------------------------------------------------------------- density

Report run_density(const RunConfig& cfg) {
  const int k = single_weight(cfg, 2);
  check_weight_arg(k);
  const TestFunctionPair phi = build_test_function(parse_test_function_kind(cfg.phihat), cfg.sigma);
  PrimeSumOptions opt;
  opt.nu_max = cfg.nu_max;
  opt.c_max_floor = cfg.c_max ? cfg.c_max : 100000;
  opt.c_max_slope = cfg.c_max_slope;
  Report r;
  r.header = {"N",     "X",      "conductor_term", "archimedean", "square_primes",    "main_prime_sum",
              "total", "target", "residual",       "abs_residual", "discard_majorant", "omega"};
  double prev = INFINITY;
  bool trend = true;
  for (std::uint64_t N : cfg.levels) {
    const DensityReport d = one_level_density(k, N, phi, opt);
    const double a = std::abs(d.residual);
    if (a > prev + 0.05) trend = false;
    prev = std::min(prev, a);
    r.rows.push_back({std::to_string(N), num(d.X), num(d.conductor_term), num(d.archimedean), num(d.square_primes),
                      num(d.main_prime_sum), num(d.total), num(d.target), num(d.residual), num(a),
                      num(d.discard_majorant), num(d.omega)});
    r.terms.push_back({{"N", N},
                       {"X", d.X},
                       {"phi", d.phi_name},
                       {"sigma", d.sigma},
                       {"conductor_term", d.conductor_term},
                       {"archimedean", d.archimedean},
                       {"square_primes", d.square_primes},
                       {"main_prime_sum", d.main_prime_sum},
                       {"total", d.total},
                       {"target", d.target},
                       {"omega", d.omega},
                       {"prime_powers", d.prime_sum.terms.size()}});
    r.majorants.push_back({{"N", N},
                           {"discard_majorant", d.discard_majorant},
                           {"c_tail_majorant", d.prime_sum.c_tail_majorant},
                           {"high_nu_majorant", d.prime_sum.high_nu_majorant},
                           {"omega_tail", d.prime_sum.omega_tail}});
    r.residuals.push_back({{"N", N}, {"residual", d.residual}});
  }
  r.residuals.push_back({{"abs_residual_nonincreasing_within", 0.05}, {"holds", trend}});
  return r;
}

// ------------------------------------------------------------------ zeros

Report run_zeros(const RunConfig& cfg, const Cache& cache) {
  const double T = cfg.T > 0 ? cfg.T : 30.0;
  std::vector<std::uint64_t> moduli = cfg.moduli;
  if (moduli.empty()) {
    for (std::uint64_t q = 3; q <= 10; ++q) moduli.push_back(q);
  }
  Report r;
  r.header = {"q",          "char_index",   "parity",        "sign_changes_up", "argument_up", "sign_changes_down",
              "argument_down", "box_count", "rvm_count",     "rvm_main",        "conjugation", "reflection"};
  for (std::uint64_t q : moduli) {
    for (const auto& chi : primitive_characters(q)) {
      const std::size_t idx = character_index(chi);
      CacheStatus su{}, sd{};
      const ZeroList up = cached_find_zeros(cache, chi, T, &su);
      const ZeroList down = cached_find_zeros(cache, chi.conjugate(), T, &sd);
      const std::string tag = "q" + std::to_string(q) + "_chi" + std::to_string(idx);
      if (!up.certified || !down.certified) {
        r.certify(tag + "_certified", 0.0, 0.0, false);
        continue;
      }
      const long box = count_zeros_box(chi, 0.0, 1.0, 0.0, T).count;
      const long total = static_cast<long>(up.ordinates.size() + down.ordinates.size());
      const double qd = static_cast<double>(q);
      const double main = (T / std::numbers::pi) * std::log(qd * T / (2 * std::numbers::pi * std::numbers::e));
      const ZeroSymmetryCheck sym = zero_symmetry_check(chi, up, down);
      r.rows.push_back({std::to_string(q), std::to_string(idx), std::to_string(chi.parity()),
                        std::to_string(up.ordinates.size()), std::to_string(up.certified_count),
                        std::to_string(down.ordinates.size()), std::to_string(down.certified_count),
                        std::to_string(box), std::to_string(total), num(main), num(sym.conjugation),
                        num(sym.reflection)});
      r.terms.push_back({{"q", q},
                         {"char_index", idx},
                         {"ordinates", up.ordinates},
                         {"conjugate_ordinates", down.ordinates},
                         {"cache", {cache_status_name(su), cache_status_name(sd)}}});
      r.residuals.push_back({{"q", q}, {"char_index", idx}, {"rvm", static_cast<double>(total) - main},
                             {"conjugation", sym.conjugation}, {"reflection", sym.reflection}});
      const bool counts = static_cast<long>(up.ordinates.size()) == up.certified_count &&
                          static_cast<long>(down.ordinates.size()) == down.certified_count && box == total;
      r.certify(tag + "_counts", static_cast<double>(box), static_cast<double>(total), counts);
      r.certify(tag + "_symmetry", std::max(sym.conjugation, sym.reflection), 1e-7,
                std::max(sym.conjugation, sym.reflection) <= 1e-7);
      r.certify(tag + "_rvm", std::abs(static_cast<double>(total) - main), 2.0,
                std::abs(static_cast<double>(total) - main) <= 2.0);
    }
  }
  return r;
}

// ----------------------------------------------------------- mellin-check

Report run_mellin_check(const RunConfig& cfg) {
  const int k = single_weight(cfg, 4);
  check_weight_arg(k);
  const double T = cfg.T > 0 ? cfg.T : 60.0;
  const TestFunctionPair phi = build_test_function(parse_test_function_kind(cfg.phihat), cfg.sigma);
  const std::vector<std::uint64_t> moduli = cfg.moduli.empty() ? std::vector<std::uint64_t>{5} : cfg.moduli;
  Report r;
  r.header = {"q", "char_index", "parity", "c", "contour_residual", "contour_certificate", "expansion_residual",
              "zero_tail_certificate", "line_tail_certificate", "zeros_used"};
  for (std::uint64_t q : moduli) {
    const std::uint64_t c = cfg.c ? cfg.c : q;
    for (const auto& chi : primitive_characters(q)) {
      const std::size_t idx = character_index(chi);
      const ContourPrimeSumCheck a = contour_prime_sum_residual(chi, phi, cfg.X, c, k, cfg.t_int);
      const ZeroExpansionCheck b = zero_expansion_residual(chi, phi, cfg.X, c, k, T);
      r.rows.push_back({std::to_string(q), std::to_string(idx), std::to_string(chi.parity()), std::to_string(c),
                        num(a.residual), num(a.rhs_certificate + a.lhs_certificate), num(b.residual),
                        num(b.zero_tail_certificate), num(b.line_tail_certificate), std::to_string(b.zeros_used)});
      r.terms.push_back({{"q", q},
                         {"char_index", idx},
                         {"contour_lhs", {a.lhs.real(), a.lhs.imag()}},
                         {"contour_rhs", {a.rhs.real(), a.rhs.imag()}},
                         {"zero_sum", {b.zero_sum.real(), b.zero_sum.imag()}},
                         {"parity_term", {b.parity_term.real(), b.parity_term.imag()}},
                         {"height", b.height},
                         {"prime_powers", a.prime_powers}});
      r.majorants.push_back({{"q", q},
                             {"char_index", idx},
                             {"contour_rhs_certificate", a.rhs_certificate},
                             {"contour_lhs_certificate", a.lhs_certificate},
                             {"zero_tail_certificate", b.zero_tail_certificate},
                             {"line_tail_certificate", b.line_tail_certificate}});
      r.residuals.push_back(
          {{"q", q}, {"char_index", idx}, {"contour", a.residual}, {"zero_expansion", b.residual}});
      const std::string tag = "q" + std::to_string(q) + "_chi" + std::to_string(idx);
      r.certify(tag + "_contour", a.residual, 1e-5, a.residual < 1e-5);
      r.certify(tag + "_zero_expansion", b.residual, 1e-4, b.residual < 1e-4);
    }
  }
  return r;
}

// ----------------------------------------------------------- zero-density

Report run_zero_density(const RunConfig& cfg) {
  const double T = cfg.T > 0 ? cfg.T : 30.0;
  const std::vector<double> betas =
      cfg.betas.empty() ? std::vector<double>{0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.9} : cfg.betas;
  for (double b : betas) {
    if (!(b > 0.5) || b > 1.0) throw UsageError("zero-density: beta must lie in (1/2, 1]");
  }
  Report r;
  r.header = {"beta", "count", "characters", "branch1_exponent", "branch2_exponent", "combined_exponent", "ratio"};
  double slack = 0.0;
  for (double b : betas) {
    const MeasuredZeroDensity m = measured_zero_density(static_cast<int>(cfg.q_max), T, b, cfg.eps);
    const ZeroDensityExponents z = zero_density_rhs(1.0, static_cast<double>(cfg.q_max), T, b, cfg.eps);
    slack = std::max(slack, m.ratio);
    r.rows.push_back({num(b), std::to_string(m.count), std::to_string(m.characters), num(z.branch1), num(z.branch2),
                      num(z.combined), num(m.ratio)});
    r.terms.push_back({{"beta", b}, {"count", m.count}, {"characters", m.characters}});
    r.majorants.push_back({{"beta", b},
                           {"branch1", z.branch1},
                           {"branch2", z.branch2},
                           {"min_factor", z.min_factor},
                           {"combined", z.combined}});
    r.residuals.push_back({{"beta", b}, {"count_over_rhs", m.ratio}});
  }
  r.residuals.push_back({{"measured_slack_constant", slack}});
  return r;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  auto fail = [&err](int code, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
    return code;
  };

  CLI::App app{"nldlab: numerical checks for low-lying zeros of modular L-functions"};
  app.require_subcommand(1);
  app.add_option("--config", cfg.config_file, "key = value file; flags override it");
  app.add_option("--cache-dir", cfg.cache_dir, "cache directory (else NLDLAB_CACHE, else ./nldlab-cache)");
  app.add_option("--output,-o", cfg.output, "report path (default stdout)");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);

  auto weights = [&cfg](CLI::App* s) { s->add_option("--k", cfg.k, "weight(s)")->delimiter(','); };
  auto testfn = [&cfg](CLI::App* s) {
    s->add_option("--sigma", cfg.sigma, "support of phihat");
    s->add_option("--phihat", cfg.phihat, "triangle, cosine-squared or zero");
  };

  auto* theta = app.add_subcommand("theta", "support radius table and optimizer trace");
  weights(theta);

  auto* identities = app.add_subcommand("identities", "Kloosterman and character identity suite");
  identities->add_option("--c-max", cfg.c_max, "largest modulus (default 200)");

  auto* petersson = app.add_subcommand("petersson-check", "empty-space identity and fixture reversal");
  weights(petersson);
  petersson->add_option("--c-max", cfg.c_max, "truncation for the empty-space check (default 1e5)");
  petersson->add_option("--fixture", cfg.fixture, "eigenvalue CSV (level,weight,label,p,a_p)");
  petersson->add_option("--fixture-c-max", cfg.fixture_c_max, "truncation for the fixture reversal");

  auto* density = app.add_subcommand("density", "one-level density per level; CSV of residual against N");
  weights(density);
  testfn(density);
  std::vector<std::string> level_args;
  density->add_option("--levels", level_args, "prime levels, comma separated")->delimiter(',');
  density->add_option("--nu-max", cfg.nu_max, "largest prime power exponent summed");
  density->add_option("--c-max", cfg.c_max, "c_max floor (default 1e5)");
  density->add_option("--c-max-slope", cfg.c_max_slope, "c_max = max(floor, slope * sqrt(p^nu))");

  auto* zeros = app.add_subcommand("zeros", "zero lists and box counts");
  zeros->add_option("--moduli", cfg.moduli, "moduli (default 3..10)")->delimiter(',');
  zeros->add_option("--T", cfg.T, "height (default 30)");

  auto* mellin = app.add_subcommand("mellin-check", "contour prime-sum and zero-expansion residuals");
  weights(mellin);
  testfn(mellin);
  mellin->add_option("--moduli", cfg.moduli, "moduli (default 5)")->delimiter(',');
  mellin->add_option("--X", cfg.X, "X");
  mellin->add_option("--c", cfg.c, "Bessel modulus c (default: the modulus)");
  mellin->add_option("--T", cfg.T, "zero height (default 60)");
  mellin->add_option("--t-int", cfg.t_int, "contour height for the prime sum");

  auto* zd = app.add_subcommand("zero-density", "measured zero counts against the density bound");
  zd->add_option("--q-max", cfg.q_max, "largest modulus");
  zd->add_option("--T", cfg.T, "height (default 30)");
  zd->add_option("--betas", cfg.betas, "beta values")->delimiter(',');
  zd->add_option("--eps", cfg.eps, "epsilon of the bound");

  for (auto* s : app.get_subcommands({})) s->fallthrough();

  // Config file values fill options not given on the command line.
  std::map<std::string, std::string> file_values;
  try {
    if (auto path = find_config_flag(argc, argv)) file_values = read_config_file(*path);
  } catch (const UsageError& e) {
    return fail(kExitUsage, "usage", e.what());
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(kExitUsage, "usage", e.what());
  }
  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();

  try {
    for (const auto& [key, value] : file_values) {
      if (key == "config") throw UsageError("config file cannot set config");
      CLI::Option* opt = sub->get_option_no_throw("--" + key);
      if (!opt) opt = app.get_option_no_throw("--" + key);
      if (!opt) {
        const auto all = app.get_subcommands({});
        const bool elsewhere = std::any_of(all.begin(), all.end(),
                                           [&](CLI::App* s) { return s->get_option_no_throw("--" + key) != nullptr; });
        if (!elsewhere) throw UsageError("config file: unknown key '" + key + "'");
        continue;
      }
      if (opt->count() == 0) {
        opt->add_result(value);
        opt->run_callback();
      }
    }
  } catch (const UsageError& e) {
    return fail(kExitUsage, "usage", e.what());
  } catch (const CLI::Error& e) {
    return fail(kExitUsage, "usage", std::string("config file: ") + e.what());
  }
  try {
    for (const auto& a : level_args) {
      if (a.empty()) continue;
      std::size_t used = 0;
      const unsigned long long v = std::stoull(a, &used);
      if (used != a.size() || a.front() == '-') throw std::invalid_argument(a);
      cfg.levels.push_back(v);
    }
  } catch (const std::exception&) {
    return fail(kExitUsage, "usage", "density: levels must be positive integers");
  }
  if (cfg.cache_dir.empty()) {
    const char* env = std::getenv("NLDLAB_CACHE");
    cfg.cache_dir = env && *env ? env : "nldlab-cache";
  }

  // Validation happens before anything touches the disk.
  try {
    if (cfg.workers < 1) throw UsageError("workers must be >= 1");
    if (cfg.command == "density") {
      if (cfg.levels.empty()) throw UsageError("density: --levels is empty");
      for (auto N : cfg.levels) {
        if (!arith::is_prime(N)) throw UsageError("density: level " + std::to_string(N) + " is not prime");
      }
      if (!(cfg.sigma > 0) || cfg.sigma >= 2) throw UsageError("density: sigma must lie in (0, 2)");
      const int k = single_weight(cfg, 2);
      check_weight_arg(k);
      if (level_one_dimension(k) != 0) {
        throw UsageError("density: weight " + std::to_string(k) + " has level-1 cusp forms");
      }
      if (cfg.nu_max < 2) throw UsageError("density: nu-max must be >= 2");
    }
    if (cfg.command == "zero-density" && cfg.q_max < 3) throw UsageError("zero-density: q-max must be >= 3");
  } catch (const UsageError& e) {
    return fail(kExitUsage, "usage", e.what());
  }
  set_worker_count(cfg.workers);

  Report report;
  try {
    std::optional<Cache> cache;
    auto need_cache = [&]() -> const Cache& {
      if (!cache) cache.emplace(cfg.cache_dir);
      return *cache;
    };
    if (cfg.command == "theta") {
      report = run_theta(cfg);
    } else if (cfg.command == "identities") {
      report = run_identities(cfg);
    } else if (cfg.command == "petersson-check") {
      report = run_petersson_check(cfg, need_cache());
    } else if (cfg.command == "density") {
      report = run_density(cfg);
    } else if (cfg.command == "zeros") {
      report = run_zeros(cfg, need_cache());
    } else if (cfg.command == "mellin-check") {
      report = run_mellin_check(cfg);
    } else {
      report = run_zero_density(cfg);
    }
  } catch (const UsageError& e) {
    return fail(kExitUsage, "usage", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitUsage, "invalid-argument", e.what());
  } catch (const std::exception& e) {
    return fail(kExitRuntime, "runtime", e.what());
  }

  report.config = config_json(cfg);
  const std::string text = report.render(cfg.format);
  try {
    if (cfg.output.empty()) {
      out << text;
    } else {
      write_atomic(cfg.output, text);
    }
  } catch (const std::exception& e) {
    return fail(kExitRuntime, "io", e.what());
  }
  if (!report.all_pass()) {
    json failed = json::array();
    for (const auto& c : report.certificates) {
      if (!c["pass"].get<bool>()) failed.push_back(c["name"]);
    }
    return fail(kExitUncertified, "uncertified", "failed certificates: " + failed.dump());
  }
  return kExitOk;
}

}  // namespace nldlab::cli
