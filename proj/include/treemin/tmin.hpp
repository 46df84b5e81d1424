#pragma once

#include <functional>
#include <vector>

#include "treemin/diagnostics.hpp"
#include "treemin/oracle.hpp"
#include "treemin/tree.hpp"

namespace treemin {

/// Maps a node to the nodes it may be transformed into.
using CandidateFunction = std::function<std::vector<NodeId>(const ParseTree&, NodeId)>;

/// Both are rule nodes with the same (non-list) label.
bool compatible(const ParseTree& tree, NodeId a, NodeId b);

/// Hoisting candidates of `node`: along every downward path the first
/// compatible descendant, deepest first, ties in document order. REPLACED
/// nodes are neither returned nor searched.
std::vector<NodeId> chi(const ParseTree& tree, NodeId node);

/// Transformation-based minimization over `nodes`. Nodes are scanned in the
/// given order; for each, the candidates of its current image are tried in
/// order and the first one that keeps the test failing is committed, after
/// which the node's new image is examined again. Passes repeat until one
/// commits nothing. The tree itself is not modified.
TransformMap tmin(const ParseTree& tree, const std::vector<NodeId>& nodes, const CandidateFunction& candidates,
                  const Evaluator& test, const Diagnostics& diagnostics = {});

}  // namespace treemin
