#include "treemin/tree.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace treemin {

ParseTree::ParseTree(std::shared_ptr<const Grammar> grammar, std::shared_ptr<const MinimalFragmentTable> fragments)
    : grammar_(std::move(grammar)), fragments_(std::move(fragments)) {}

void ParseTree::set_root(NodeId id) {
  root_ = id;
  node(id).parent = NodeId{};
}

NodeId ParseTree::add_node(NodeKind kind, std::string label, std::string text) {
  NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  Node n;
  n.id = id;
  n.kind = kind;
  n.label = std::move(label);
  n.text = std::move(text);
  nodes_.push_back(std::move(n));
  return id;
}

void ParseTree::append_child(NodeId parent, NodeId child) {
  node(parent).children.push_back(child);
  node(child).parent = parent;
}

void ParseTree::replace_child(NodeId old_child, NodeId new_child) {
  NodeId parent = node(old_child).parent;
  node(old_child).parent = NodeId{};
  if (!parent.valid()) {
    if (root_ == old_child) set_root(new_child);
    return;
  }
  auto& siblings = node(parent).children;
  std::replace(siblings.begin(), siblings.end(), old_child, new_child);
  node(new_child).parent = parent;
}

void ParseTree::detach(NodeId child) {
  NodeId parent = node(child).parent;
  if (!parent.valid()) return;
  auto& siblings = node(parent).children;
  siblings.erase(std::remove(siblings.begin(), siblings.end(), child), siblings.end());
  node(child).parent = NodeId{};
}

bool ParseTree::removable(NodeId id) const {
  NodeId parent = node(id).parent;
  return parent.valid() && node(parent).kind == NodeKind::List;
}

std::string ParseTree::fragment_for(NodeId id) const {
  const Node& n = node(id);
  auto symbol_text = [&](const std::string& name) -> std::string {
    if (grammar_) {
      if (auto t = grammar_->find_token(name)) return grammar_->token(*t).min_text;
    }
    if (!fragments_) throw TreeError("no minimal fragment table attached to the tree");
    return fragments_->at(name).text;
  };
  switch (n.kind) {
    case NodeKind::Token:
      return symbol_text(n.label);
    case NodeKind::List:
      return n.fragment_of.empty() ? std::string{} : symbol_text(n.fragment_of);
    case NodeKind::Rule:
      break;
  }
  if (!fragments_) throw TreeError("no minimal fragment table attached to the tree");
  return fragments_->at(n.label).text;
}

std::size_t ParseTree::recompute_size(NodeId id) {
  Node& n = node(id);
  std::size_t size = 1;
  if (n.kept()) {
    for (NodeId c : n.children) size += recompute_size(c);
  }
  node(id).subtree_size = size;
  return size;
}

void ParseTree::refresh_sizes_upward(NodeId id) {
  recompute_size(id);
  for (NodeId p = node(id).parent; p.valid(); p = node(p).parent) {
    Node& n = node(p);
    std::size_t size = 1;
    if (n.kept()) {
      for (NodeId c : n.children) size += node(c).subtree_size;
    }
    n.subtree_size = size;
  }
}

void ParseTree::refresh_all_sizes() {
  if (root_.valid()) recompute_size(root_);
}

std::vector<NodeId> ParseTree::reachable() const {
  std::vector<NodeId> out;
  if (!root_.valid()) return out;
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    out.push_back(id);
    const Node& n = node(id);
    if (!n.kept()) continue;
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

bool ParseTree::is_proper_descendant(NodeId candidate, NodeId ancestor) const {
  for (NodeId p = node(candidate).parent; p.valid(); p = node(p).parent) {
    if (p == ancestor) return true;
  }
  return false;
}

std::size_t ParseTree::depth(NodeId id) const {
  std::size_t d = 0;
  for (NodeId p = node(id).parent; p.valid(); p = node(p).parent) ++d;
  return d;
}

namespace {

void emit(std::string& out, const std::string& piece) {
  if (piece.empty()) return;
  if (!out.empty()) out += ' ';
  out += piece;
}

void serialize_into(const ParseTree& tree, NodeId id, const Overlay* overlay, std::string& out) {
  if (overlay) {
    if (overlay->removed.count(id)) return;
    if (auto it = overlay->substituted.find(id); it != overlay->substituted.end()) {
      serialize_into(tree, it->second, overlay, out);
      return;
    }
    if (auto it = overlay->replaced.find(id); it != overlay->replaced.end()) {
      emit(out, it->second);
      return;
    }
  }
  const Node& n = tree.node(id);
  if (n.replacement) {
    emit(out, *n.replacement);
    return;
  }
  if (n.kind == NodeKind::Token) {
    emit(out, n.text);
    return;
  }
  for (NodeId c : n.children) serialize_into(tree, c, overlay, out);
}

}  // namespace

std::string serialize(const ParseTree& tree, const Overlay* overlay) {
  std::string out;
  if (tree.root().valid()) serialize_into(tree, tree.root(), overlay, out);
  return out;
}

std::vector<NodeId> tag_nodes(const ParseTree& tree, std::size_t level) {
  std::vector<NodeId> row;
  if (!tree.root().valid()) return row;
  row.push_back(tree.root());
  for (std::size_t d = 0; d < level && !row.empty(); ++d) {
    std::vector<NodeId> next;
    for (NodeId id : row) {
      const Node& n = tree.node(id);
      if (!n.kept()) continue;
      next.insert(next.end(), n.children.begin(), n.children.end());
    }
    row = std::move(next);
  }
  std::erase_if(row, [&](NodeId id) {
    const Node& n = tree.node(id);
    return !n.kept() || (n.kind == NodeKind::Token && n.hidden);
  });
  return row;
}

std::size_t subtree_measure(const ParseTree& tree, NodeId id) {
  return tree.node(id).subtree_size;
}

std::size_t node_count(const ParseTree& tree) {
  return tree.reachable().size();
}

namespace {

// Text of a subtree as it currently serializes.
std::string subtree_text(const ParseTree& tree, NodeId id) {
  std::string out;
  serialize_into(tree, id, nullptr, out);
  return out;
}

}  // namespace

Overlay plan_prune(const ParseTree& tree, std::span<const NodeId> level_nodes,
                   const std::unordered_set<NodeId>& keep) {
  Overlay plan;
  // Replacing a subtree that already reads as its fragment would change the
  // tree's shape without changing its text.
  auto replace = [&](NodeId id) {
    std::string fragment = tree.fragment_for(id);
    if (subtree_text(tree, id) != fragment) plan.replaced.emplace(id, std::move(fragment));
  };
  std::map<NodeId, std::vector<NodeId>> dropped_by_list;
  for (NodeId id : level_nodes) {
    if (keep.count(id)) continue;
    if (tree.removable(id)) {
      plan.removed.insert(id);
      dropped_by_list[tree.node(id).parent].push_back(id);
    } else {
      replace(id);
    }
  }
  // A list that must keep at least one element keeps its first dropped
  // element in minimal form instead of becoming empty.
  for (const auto& [list, dropped] : dropped_by_list) {
    const Node& l = tree.node(list);
    std::size_t remaining = l.children.size() - dropped.size();
    if (remaining >= l.min_children) continue;
    std::size_t need = l.min_children - remaining;
    for (std::size_t i = 0; i < need && i < dropped.size(); ++i) {
      plan.removed.erase(dropped[i]);
      replace(dropped[i]);
    }
  }
  return plan;
}

void apply_prune(ParseTree& tree, const Overlay& plan) {
  std::vector<NodeId> touched;
  for (const auto& [id, text] : plan.replaced) {
    tree.node(id).replacement = text;
    touched.push_back(id);
  }
  for (NodeId id : plan.removed) {
    NodeId parent = tree.node(id).parent;
    tree.detach(id);
    if (parent.valid()) touched.push_back(parent);
  }
  std::sort(touched.begin(), touched.end());
  for (NodeId id : touched) tree.refresh_sizes_upward(id);
}

void prune_apply(ParseTree& tree, std::size_t level, const std::unordered_set<NodeId>& keep) {
  auto nodes = tag_nodes(tree, level);
  apply_prune(tree, plan_prune(tree, nodes, keep));
}

void validate_mapping(const ParseTree& tree, const TransformMap& mapping) {
  for (const auto& [source, target] : mapping) {
    const Node& s = tree.node(source);
    const Node& t = tree.node(target);
    if (s.kind != NodeKind::Rule || t.kind != NodeKind::Rule || s.label != t.label || s.label == kListLabel) {
      throw IncompatibleMappingError("cannot hoist node " + std::to_string(target.value) + " (" + t.label +
                                     ") into node " + std::to_string(source.value) + " (" + s.label +
                                     "): labels differ or are not rules");
    }
    if (!tree.is_proper_descendant(target, source)) {
      throw IncompatibleMappingError("cannot hoist node " + std::to_string(target.value) +
                                     ": not a proper descendant of node " + std::to_string(source.value));
    }
  }
}

Overlay hoist_overlay(const TransformMap& mapping) {
  Overlay o;
  for (const auto& [source, target] : mapping) o.substituted.emplace(source, target);
  return o;
}

void hoist_apply(ParseTree& tree, const TransformMap& mapping) {
  validate_mapping(tree, mapping);
  for (const auto& [source, target] : mapping) {
    tree.detach(target);
    tree.replace_child(source, target);
    tree.refresh_sizes_upward(target);
  }
}

}  // namespace treemin
