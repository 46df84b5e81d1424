#include "treemin/reducers.hpp"

#include <chrono>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "treemin/ddmin.hpp"
#include "treemin/fragments.hpp"
#include "treemin/tmin.hpp"

namespace treemin {

std::string to_string(const AlgorithmId& id) {
  std::string name;
  switch (id.algorithm) {
    case Algorithm::Hdd: name = "hdd"; break;
    case Algorithm::Hoist: name = "hoist"; break;
    case Algorithm::Hddh: name = "hddh"; break;
  }
  if (id.star) name += '*';
  return name;
}

std::string to_string(const Pipeline& pipeline) {
  std::string out;
  for (const auto& stage : pipeline) {
    if (!out.empty()) out += '+';
    out += to_string(stage);
  }
  return out;
}

Pipeline parse_pipeline(const std::string& text) {
  Pipeline pipeline;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t plus = text.find('+', pos);
    std::string part = text.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
    if (!part.empty() && part.back() == '*') part.pop_back();
    if (part == "hdd") {
      pipeline.push_back({Algorithm::Hdd, true});
    } else if (part == "hoist") {
      pipeline.push_back({Algorithm::Hoist, true});
    } else if (part == "hddh") {
      pipeline.push_back({Algorithm::Hddh, true});
    } else {
      throw std::invalid_argument("unknown algorithm '" + part + "' in '" + text + "'");
    }
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  return pipeline;
}

IterationCapError::IterationCapError(std::size_t cap)
    : std::runtime_error("no fixed point within the iteration cap of " + std::to_string(cap)), cap_(cap) {}

namespace {

std::vector<NodeId> prune_level(ParseTree& tree, const std::vector<NodeId>& nodes, const Evaluator& test,
                                const Diagnostics& diagnostics) {
  std::function<Outcome(const std::vector<NodeId>&)> level_test = [&](const std::vector<NodeId>& keep) {
    std::unordered_set<NodeId> kept(keep.begin(), keep.end());
    Overlay plan = plan_prune(tree, nodes, kept);
    std::string text = serialize(tree, &plan);
    if (diagnostics.on_candidate) diagnostics.on_candidate(text);
    return test(text);
  };
  DdminHooks hooks;
  hooks.on_degenerate = [&] { spdlog::warn("level configuration does not fail; leaving it unchanged"); };
  std::vector<NodeId> minconfig = ddmin(nodes, level_test, hooks);
  std::unordered_set<NodeId> kept(minconfig.begin(), minconfig.end());
  apply_prune(tree, plan_prune(tree, nodes, kept));
  return minconfig;
}

void hoist_nodes(ParseTree& tree, const std::vector<NodeId>& nodes, const Evaluator& test,
                 const Diagnostics& diagnostics) {
  TransformMap t = tmin(tree, nodes, chi, test, diagnostics);
  if (!t.empty()) hoist_apply(tree, t);
}

}  // namespace

void hdd(ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics) {
  for (std::size_t level = 0;; ++level) {
    auto nodes = tag_nodes(tree, level);
    if (nodes.empty()) break;
    prune_level(tree, nodes, test, diagnostics);
  }
}

void hoist(ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics) {
  for (std::size_t level = 0;; ++level) {
    auto nodes = tag_nodes(tree, level);
    if (nodes.empty()) break;
    hoist_nodes(tree, nodes, test, diagnostics);
  }
}

void hddh(ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics) {
  for (std::size_t level = 0;; ++level) {
    auto nodes = tag_nodes(tree, level);
    if (nodes.empty()) break;
    auto minconfig = prune_level(tree, nodes, test, diagnostics);
    std::vector<NodeId> survivors;
    for (NodeId id : minconfig) {
      if (tree.node(id).kept()) survivors.push_back(id);
    }
    hoist_nodes(tree, survivors, test, diagnostics);
  }
}

void run_once(Algorithm algorithm, ParseTree& tree, const Evaluator& test, const Diagnostics& diagnostics) {
  switch (algorithm) {
    case Algorithm::Hdd: hdd(tree, test, diagnostics); break;
    case Algorithm::Hoist: hoist(tree, test, diagnostics); break;
    case Algorithm::Hddh: hddh(tree, test, diagnostics); break;
  }
}

std::size_t fixpoint(Algorithm algorithm, ParseTree& tree, const Evaluator& test, std::size_t max_iterations,
                     const Diagnostics& diagnostics) {
  for (std::size_t iteration = 1;; ++iteration) {
    std::string before = serialize(tree);
    std::size_t count = node_count(tree);
    run_once(algorithm, tree, test, diagnostics);
    if (serialize(tree) == before && node_count(tree) == count) return iteration;
    if (iteration >= max_iterations) throw IterationCapError(max_iterations);
  }
}

PipelineResult run_pipeline(const Pipeline& pipeline, ParseTree& tree, CachedOracle& oracle,
                            std::size_t max_iterations, const Diagnostics& diagnostics) {
  if (pipeline.empty()) throw std::invalid_argument("pipeline must not be empty");
  PipelineResult result;
  Evaluator test = oracle.as_evaluator();
  for (const AlgorithmId& stage : pipeline) {
    StepCounter before = oracle.steps();
    auto start = std::chrono::steady_clock::now();
    StageRecord record;
    record.name = to_string(stage);
    if (stage.star) {
      record.iterations = fixpoint(stage.algorithm, tree, test, max_iterations, diagnostics);
    } else {
      run_once(stage.algorithm, tree, test, diagnostics);
      record.iterations = 1;
    }
    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.invocations = oracle.steps().invocations - before.invocations;
    record.hits = oracle.steps().hits - before.hits;
    record.size = nonws_size(serialize(tree));
    spdlog::info("{}: {} iteration(s), size {}, {} test invocation(s)", record.name, record.iterations, record.size,
                 record.invocations);
    result.stages.push_back(std::move(record));
  }
  result.output = serialize(tree);
  result.output_size = nonws_size(result.output);
  return result;
}

}  // namespace treemin
