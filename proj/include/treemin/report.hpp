#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "treemin/diagnostics.hpp"
#include "treemin/outcome.hpp"
#include "treemin/reducers.hpp"

namespace treemin {

/// The unreduced input is not interesting, so there is nothing to preserve.
class InitialTestError : public std::runtime_error {
public:
  explicit InitialTestError(Outcome outcome);
  Outcome outcome() const { return outcome_; }

private:
  Outcome outcome_;
};

/// Invalid option values detected after argument parsing.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ReduceOptions {
  std::string grammar_path;
  std::optional<std::string> start;
  std::string test_command;
  /// Directory that relative program paths in `test_command` are resolved against.
  std::string command_base_dir = ".";
  std::string algorithm = "hdd";
  bool squeeze = true;
  bool flatten = true;
  std::size_t max_iterations = 100;
  double timeout_seconds = 60;
  std::string workdir;
  /// Defaults to the input file name.
  std::string candidate_name;
  std::string input_path;
  std::string tree_in;
  std::string out_path;  // default: <input>.reduced
  std::string report_path;
  std::string emit_tree;
  std::string log_path;
  bool timings = false;
};

struct ReductionReport {
  std::string input_path;
  std::string grammar_path;
  std::string pipeline;
  std::size_t input_size = 0;
  std::size_t initial_invocations = 0;
  std::vector<StageRecord> stages;
  std::string output_path;
  std::size_t final_size = 0;
  std::size_t total_invocations = 0;
  std::size_t total_hits = 0;
  Outcome recheck = Outcome::Unresolved;
  std::string output_text;

  /// Wall times are included only when `timings` is set, so reports of
  /// deterministic runs compare byte for byte.
  nlohmann::json to_json(bool timings = false) const;
};

/// Loads the grammar, parses (or reads) the tree, preprocesses it, checks
/// that the input is interesting, runs the pipeline, writes the reduced file
/// (and report / tree when requested) and re-checks the written file once.
ReductionReport run_reduce(const ReduceOptions& options, const Diagnostics& diagnostics = {});

/// Reduces every case × pipeline listed in a manifest and returns a CSV
/// table: name, input size, one size column and one step column per
/// pipeline, and a status column. Failing cases are reported in their row.
std::string run_bench(const std::string& manifest_path);

/// Quotes a CSV field when needed.
std::string csv_field(const std::string& value);

}  // namespace treemin
