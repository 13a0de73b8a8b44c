#pragma once

// The nldlab command line, callable in-process so tests can drive it.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace nldlab::cli {

struct RunConfig {
  std::string command;
  std::vector<int> k;                 // weights; per-command default when empty
  std::vector<std::uint64_t> levels;  // density
  double sigma = 1.0;
  std::string phihat = "triangle";
  std::uint64_t c_max = 0;            // 0: per-command default
  double c_max_slope = 20.0;
  int nu_max = 3;
  std::uint64_t fixture_c_max = 1000000;
  std::string fixture;                // petersson-check; empty: shipped level-11 file
  double T = 0.0;                     // zero height; 0: per-command default
  double t_int = 1000.0;              // mellin-check, contour height
  std::vector<std::uint64_t> moduli;  // zeros, mellin-check
  std::uint64_t q_max = 20;           // zero-density
  std::vector<double> betas;          // zero-density
  double X = 100.0;                   // mellin-check
  std::uint64_t c = 0;                // mellin-check; 0: the modulus
  double eps = 0.01;
  std::string cache_dir;
  std::string output;                 // empty: stdout
  std::string format = "csv";         // csv | json
  int workers = 1;
  std::string config_file;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // invalid command line or config
inline constexpr int kExitUncertified = 3;  // a certificate or identity check failed; report still written
inline constexpr int kExitRuntime = 4;    // I/O and other runtime failures

/// Parses argv (argv[0] is the program name), runs the subcommand and writes
/// the report to the output path or to out. Errors go to err as one JSON object.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nldlab::cli
