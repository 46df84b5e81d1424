#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "treemin/diagnostics.hpp"
#include "treemin/oracle.hpp"
#include "treemin/tree.hpp"

namespace treemin {

enum class Algorithm { Hdd, Hoist, Hddh };

struct AlgorithmId {
  Algorithm algorithm = Algorithm::Hdd;
  bool star = true;

  friend bool operator==(const AlgorithmId&, const AlgorithmId&) = default;
};

using Pipeline = std::vector<AlgorithmId>;

/// e.g. "hdd*" or "hoist".
std::string to_string(const AlgorithmId& id);
/// e.g. "hoist*+hdd*".
std::string to_string(const Pipeline& pipeline);

/// Parses `hdd`, `hoist`, `hddh` and `+`-joined sequences of them; every
/// stage is starred whether or not a trailing `*` is written.
Pipeline parse_pipeline(const std::string& text);

class IterationCapError : public std::runtime_error {
public:
  explicit IterationCapError(std::size_t cap);
  std::size_t cap() const { return cap_; }

private:
  std::size_t cap_;
};

/// Hierarchical delta debugging: level by level, ddmin over the level's
/// nodes, then drop or minimally replace the nodes it did not keep.
void hdd(ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics = {});

/// Level by level, hoist compatible descendants into their ancestors.
void hoist(ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics = {});

/// hdd with a hoisting step over each level's surviving nodes.
void hddh(ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics = {});

void run_once(Algorithm algorithm, ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics = {});

/// Repeats `algorithm` until an iteration changes neither the serialized text
/// nor the node count. Returns the number of iterations run (at least 1).
std::size_t fixpoint(Algorithm algorithm, ParseTree& tree, const Evaluator& test, std::size_t max_iterations = 100,
                     const Diagnostics& diagnostics = {});

struct StageRecord {
  std::string name;
  std::size_t iterations = 0;
  std::size_t size = 0;  // non-whitespace characters after the stage
  std::size_t invocations = 0;
  std::size_t hits = 0;
  double wall_seconds = 0;
};

struct PipelineResult {
  std::vector<StageRecord> stages;
  std::string output;
  std::size_t output_size = 0;
};

/// Runs every stage in order on the same tree. Step counts per stage are the
/// oracle's cache misses and hits during that stage.
PipelineResult run_pipeline(const Pipeline& pipeline, ParseTree& tree, CachedOracle& oracle,
                            std::size_t max_iterations = 100, const Diagnostics& diagnostics = {});

}  // namespace treemin
