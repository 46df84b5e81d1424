#pragma once

#include <functional>
#include <string>

#include "treemin/tree.hpp"

namespace treemin {

/// Optional observers for checking invariants while a reduction runs.
struct Diagnostics {
  /// Every candidate text handed to the test function.
  std::function<void(const std::string& text)> on_candidate;
  /// Every committed hoist: `source` now maps to `to` instead of `from`.
  std::function<void(const ParseTree& tree, NodeId source, NodeId from, NodeId to)> on_hoist;
};

}  // namespace treemin
