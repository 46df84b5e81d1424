#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "treemin/outcome.hpp"

namespace treemin {

/// Decides the outcome of one candidate text.
using Evaluator = std::function<Outcome(const std::string&)>;

class OracleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  /// Program and arguments; every `{}` argument becomes the candidate path.
  std::vector<std::string> command;
  double timeout_seconds = 60.0;
  /// Directory the command runs in and the candidate file is written to.
  /// Empty: a fresh temporary directory.
  std::string workdir;
  std::string candidate_name = "candidate";
  /// When false the command sees only PATH, HOME and TREEMIN.
  bool pass_environment = true;
  /// Command stdout/stderr are appended here; empty discards them.
  std::string log_path;
};

/// Splits a command line into words using shell-style quoting and escapes.
/// No expansion of any kind is performed.
std::vector<std::string> split_command(const std::string& command_line);

/// Makes a relative program path (one containing '/') absolute against `base_dir`.
std::vector<std::string> resolve_program(std::vector<std::string> command, const std::string& base_dir);

/// Runs an external interestingness test. Exit status 0 maps to FAIL, 1 to
/// PASS; any other status, a signal, a timeout or a spawn failure to UNRESOLVED.
class CommandOracle {
public:
  explicit CommandOracle(OracleConfig config);
  ~CommandOracle();
  CommandOracle(const CommandOracle&) = delete;
  CommandOracle& operator=(const CommandOracle&) = delete;

  Outcome evaluate(const std::string& text);
  const std::string& candidate_path() const { return candidate_path_; }
  const OracleConfig& config() const { return config_; }

private:
  OracleConfig config_;
  std::string candidate_path_;
  std::string owned_dir_;
  bool spawn_failure_logged_ = false;
};

/// Convenience for one-off evaluations.
Outcome evaluate(const OracleConfig& config, const std::string& text);

struct StepCounter {
  std::size_t invocations = 0;  // cache misses
  std::size_t hits = 0;
};

/// Memoizes an evaluator by the SHA-256 digest of the exact candidate text.
/// The first observed outcome for a text is final for the run.
class CachedOracle {
public:
  explicit CachedOracle(Evaluator evaluator);

  Outcome operator()(const std::string& text);
  const StepCounter& steps() const { return steps_; }
  std::size_t cache_size() const { return cache_.size(); }

  /// Adapter usable wherever an Evaluator is expected; the oracle must outlive it.
  Evaluator as_evaluator();

private:
  Evaluator evaluator_;
  std::unordered_map<std::string, Outcome> cache_;
  StepCounter steps_;
};

std::string sha256(const std::string& text);

}  // namespace treemin
