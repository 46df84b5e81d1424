#include "treemin/tmin.hpp"

#include <algorithm>

namespace treemin {

bool compatible(const ParseTree& tree, NodeId a, NodeId b) {
  const Node& x = tree.node(a);
  const Node& y = tree.node(b);
  return x.kind == NodeKind::Rule && y.kind == NodeKind::Rule && x.label == y.label && x.label != kListLabel;
}

namespace {

void collect(const ParseTree& tree, NodeId origin, NodeId at, std::size_t distance,
             std::vector<std::pair<std::size_t, NodeId>>& out) {
  for (NodeId c : tree.node(at).children) {
    if (!tree.node(c).kept()) continue;
    if (compatible(tree, origin, c)) {
      out.emplace_back(distance, c);
    } else {
      collect(tree, origin, c, distance + 1, out);
    }
  }
}

}  // namespace

std::vector<NodeId> chi(const ParseTree& tree, NodeId node) {
  std::vector<std::pair<std::size_t, NodeId>> found;
  if (tree.node(node).kept()) collect(tree, node, node, 1, found);
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<NodeId> out;
  out.reserve(found.size());
  for (const auto& [distance, id] : found) out.push_back(id);
  return out;
}

TransformMap tmin(const ParseTree& tree, const std::vector<NodeId>& nodes, const CandidateFunction& candidates,
                  const Evaluator& test, const Diagnostics& diagnostics) {
  TransformMap t;
  bool committed = true;
  while (committed) {
    committed = false;
    for (NodeId node : nodes) {
      bool again = true;
      while (again) {
        again = false;
        auto it = t.find(node);
        NodeId image = it == t.end() ? node : it->second;
        for (NodeId candidate : candidates(tree, image)) {
          TransformMap trial = t;
          trial[node] = candidate;
          Overlay overlay = hoist_overlay(trial);
          std::string text = serialize(tree, &overlay);
          if (diagnostics.on_candidate) diagnostics.on_candidate(text);
          if (test(text) == Outcome::Fail) {
            t = std::move(trial);
            if (diagnostics.on_hoist) diagnostics.on_hoist(tree, node, image, candidate);
            committed = true;
            again = true;
            break;
          }
        }
      }
    }
  }
  return t;
}

}  // namespace treemin
