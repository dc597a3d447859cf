#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scdmi::cli {

enum ExitCode : int { kSuccess = 0, kSuiteFailure = 1, kUsageOrIo = 2 };

struct RunConfig {
  std::vector<std::string> inputs;
  std::filesystem::path out = ".";
  std::uint64_t seed = 0;
  double tol_color = 1e-9;
  double tol_shape = 0.01;
  double tol_oracle = 1e-9;
  bool clamp = false;
  bool synthetic = false;
  int classes = 20;
  int transforms = 20;
  int size = 128;
  // "k:id" of a polynomial to corrupt before the oracle suite (self-test).
  std::optional<std::string> inject_fault;
};

// Each command writes its files under config.out and a short summary to log.
int cmd_gen(const RunConfig& config, std::ostream& log);
int cmd_features(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_bench(const RunConfig& config, std::ostream& log);

}  // namespace scdmi::cli
