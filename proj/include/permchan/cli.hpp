#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace permchan::cli {

inline constexpr const char* kVersion = "permchan 0.1.0";

// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 verification
// failure.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
  kExitVerification = 3,
};

struct ExperimentConfig {
  std::string subcommand;
  std::string channel_path;
  std::optional<long long> n;
  std::vector<double> rates;
  std::vector<long long> ns;
  long long trials = 10000;
  std::uint64_t seed = 1;
  double eps = 0.1;
  int k = 3;
  double gamma = 18.0;
  std::optional<long long> certify;
  double alpha = 0.0;  // 0 -> library default
  std::vector<long long> pi;
  std::optional<std::vector<double>> q;
  std::optional<std::pair<long long, long long>> profile;  // inclusive n range
  std::string suite = "all";
  std::string out_path;   // empty -> stdout
  std::string svg_path;   // empty -> none
  std::string format = "csv";
};

// Parses argv into a config (exit code 2 semantics are handled by main_entry).
ExperimentConfig parse_args(const std::vector<std::string>& args);

// Dispatches a parsed config; returns a process exit code.
int run(const ExperimentConfig& config);

// Full entry point used by the binary: parse + run with the documented exit
// codes.
int main_entry(int argc, const char* const* argv);

}  // namespace permchan::cli
