#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"

using nlohmann::json;
using namespace nldlab::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nldlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nldlab-cli-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("theta for k = 2") {
  const Run r = run({"theta", "--k", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("1.86602540378") != std::string::npos);
  CHECK(r.out.find("0.732050805") != std::string::npos);

  const Run j = run({"theta", "--format", "json"});
  REQUIRE(j.code == kExitOk);
  const json doc = json::parse(j.out);
  for (const char* key : {"config", "terms", "majorants", "residuals", "certificates"}) CHECK(doc.contains(key));
  CHECK(doc["terms"].size() == 20);
  CHECK(doc["certificates"][0]["pass"].get<bool>());
}

TEST_CASE("usage errors are machine readable and write nothing") {
  const fs::path dir = scratch("usage");
  const fs::path out = dir / "report.csv", cache = dir / "cache";
  for (const auto& levels : {std::string(""), std::string(",")}) {
    const Run r = run({"density", "--levels", levels, "--output", out.string(), "--cache-dir", cache.string()});
    CHECK(r.code == kExitUsage);
    const json e = json::parse(r.err);
    CHECK(e["error"] == "usage");
    CHECK(e["exit_code"] == kExitUsage);
  }
  const Run none = run({"density", "--output", out.string()});
  CHECK(none.code == kExitUsage);
  CHECK(json::parse(none.err)["message"].get<std::string>().find("empty") != std::string::npos);
  CHECK(run({"density", "--levels", "100"}).code == kExitUsage);
  CHECK(run({"density", "--levels", "101", "--sigma", "2.0"}).code == kExitUsage);
  CHECK(run({"density", "--levels", "101", "--k", "12"}).code == kExitUsage);
  CHECK(run({"theta", "--k", "3"}).code == kExitUsage);
  CHECK(run({"theta", "--format", "xml"}).code == kExitUsage);
  CHECK(run({"theta", "--workers", "0"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"nonsense"}).code == kExitUsage);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(fs::exists(cache));
  fs::remove_all(dir);
}

TEST_CASE("config precedence: flags, file, environment, defaults") {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# comment\nlevels = 101,211\nsigma = 1.5\nphihat = cosine-squared\n";

  auto config_of = [](const Run& r) { return json::parse(r.out)["config"]; };

  unsetenv("NLDLAB_CACHE");
  const Run a = run({"density", "--config", cfg.string(), "--sigma", "1.0", "--format", "json"});
  REQUIRE(a.code == kExitOk);
  CHECK(config_of(a)["sigma"] == 1.0);
  CHECK(config_of(a)["phihat"] == "cosine-squared");
  CHECK(config_of(a)["levels"] == json::array({101, 211}));
  CHECK(config_of(a)["cache_dir"] == "nldlab-cache");

  setenv("NLDLAB_CACHE", (dir / "env-cache").c_str(), 1);
  const Run b = run({"theta", "--k", "2", "--format", "json"});
  CHECK(config_of(b)["cache_dir"] == (dir / "env-cache").string());

  std::ofstream(cfg, std::ios::app) << "cache-dir = " << (dir / "file-cache").string() << "\n";
  const Run c = run({"theta", "--config", cfg.string(), "--k", "2", "--format", "json"});
  REQUIRE(c.code == kExitOk);
  CHECK(config_of(c)["cache_dir"] == (dir / "file-cache").string());
  const Run d = run({"theta", "--config", cfg.string(), "--cache-dir", "flag-cache", "--k", "2", "--format", "json"});
  CHECK(config_of(d)["cache_dir"] == "flag-cache");
  unsetenv("NLDLAB_CACHE");

  std::ofstream(dir / "bad.cfg") << "no_such_option = 3\n";
  CHECK(run({"theta", "--config", (dir / "bad.cfg").string()}).code == kExitUsage);
  std::ofstream(dir / "garbled.cfg") << "just words\n";
  CHECK(run({"theta", "--config", (dir / "garbled.cfg").string()}).code == kExitUsage);
  CHECK(run({"theta", "--config", (dir / "missing.cfg").string()}).code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("density report: CSV of residual against N") {
  const fs::path dir = scratch("density");
  const fs::path out = dir / "density.csv";
  const Run r = run({"density", "--k", "2", "--levels", "101,211", "--sigma", "1.0", "--phihat", "triangle",
                     "--output", out.string()});
  REQUIRE(r.code == kExitOk);
  std::istringstream csv(slurp(out));
  std::string header, row;
  std::getline(csv, header);
  CHECK(header.find("residual") != std::string::npos);
  int rows = 0;
  while (std::getline(csv, row)) ++rows;
  CHECK(rows == 2);
  // Identical config gives a byte-identical report; the worker count changes nothing.
  const fs::path again = dir / "again.csv";
  CHECK(run({"density", "--k", "2", "--levels", "101,211", "--sigma", "1.0", "--phihat", "triangle", "--workers", "3",
             "--output", again.string()})
            .code == kExitOk);
  CHECK(slurp(out) == slurp(again));
  fs::remove_all(dir);
}

TEST_CASE("zeros through the cache give identical reports") {
  const fs::path dir = scratch("zeros");
  const std::vector<std::string> args{"zeros", "--moduli", "5", "--T", "15", "--cache-dir", (dir / "c").string()};
  const Run cold = run(args);
  REQUIRE(cold.code == kExitOk);
  CHECK(!fs::is_empty(dir / "c"));
  const Run warm = run(args);
  CHECK(warm.code == kExitOk);
  CHECK(cold.out == warm.out);
  fs::remove_all(dir);
}

TEST_CASE("petersson-check rejects an invalid fixture") {
  const fs::path dir = scratch("fixture");
  std::ofstream(dir / "bad.csv") << "level,weight,label,p,a_p\n11,2,x,2,9\n";
  const Run r = run({"petersson-check", "--k", "4", "--c-max", "2000", "--fixture", (dir / "bad.csv").string(),
                     "--cache-dir", (dir / "c").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("line 2") != std::string::npos);

  const Run ok = run({"petersson-check", "--k", "4", "--c-max", "20000", "--fixture-c-max", "100000", "--cache-dir",
                      (dir / "c").string(), "--format", "json"});
  CHECK(ok.code == kExitOk);
  const json doc = json::parse(ok.out);
  int reversal = 0;
  for (const auto& c : doc["certificates"]) reversal += c["name"].get<std::string>().find("fixture_") == 0;
  CHECK(reversal == 4);
  fs::remove_all(dir);
}
