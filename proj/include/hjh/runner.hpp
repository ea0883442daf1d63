#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjh/artifacts.hpp"
#include "hjh/config.hpp"

namespace hjh {

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

nlohmann::json to_json(const Verdict& v);

enum ExitStatus { kSuccess = 0, kVerdictFailed = 1, kConfigError = 2, kNonConvergence = 3 };

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int jobs = 0;          // 0: runtime default
  bool write = true;     // false: keep artifacts in memory only
};

struct RunResult {
  int status = kSuccess;
  std::vector<Verdict> verdicts;
  ArtifactSet artifacts;  // includes manifest.json and verdicts.json unless the config was rejected
  double seconds = 0.0;
  std::string message;
  bool all_pass() const;
};

// Executes one experiment. Config errors raised while setting up leave no artifacts (status 2);
// nonconvergence keeps whatever was produced (status 3).
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

nlohmann::json version_info();

}  // namespace hjh
