#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "treemin/fragments.hpp"
#include "treemin/grammar.hpp"

namespace treemin {

struct NodeId {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

}  // namespace treemin

template <>
struct std::hash<treemin::NodeId> {
  std::size_t operator()(treemin::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

namespace treemin {

enum class NodeKind : std::uint8_t { Rule, Token, List };

inline constexpr const char* kListLabel = "*";

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::Rule;
  std::string label;
  std::string text;  // tokens only
  std::vector<NodeId> children;
  NodeId parent;

  /// Set when the node is REPLACED: it serializes as this text and its
  /// descendants are ignored.
  std::optional<std::string> replacement;

  bool hidden = false;  // tokens whose grammar definition is hidden

  // List nodes: the fewest children that keep the list derivable, and the
  // symbol whose minimal fragment stands in for the whole list (empty for
  // lists that may be empty).
  std::size_t min_children = 0;
  std::string fragment_of;

  std::size_t subtree_size = 1;

  bool kept() const { return !replacement.has_value(); }
};

class TreeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by hoist_apply when a mapping pair is not an ancestor/descendant
/// pair with identical rule labels.
class IncompatibleMappingError : public TreeError {
public:
  using TreeError::TreeError;
};

/// Parse tree with stable node ids. Detached nodes stay in the store so ids
/// never move; only nodes reachable from the root are part of the tree.
class ParseTree {
public:
  ParseTree() = default;
  ParseTree(std::shared_ptr<const Grammar> grammar, std::shared_ptr<const MinimalFragmentTable> fragments);

  NodeId root() const { return root_; }
  void set_root(NodeId id);

  const Node& node(NodeId id) const { return nodes_.at(id.value); }
  Node& node(NodeId id) { return nodes_.at(id.value); }
  std::size_t store_size() const { return nodes_.size(); }

  NodeId add_node(NodeKind kind, std::string label, std::string text = {});
  void append_child(NodeId parent, NodeId child);
  /// Replaces `old_child` in its parent's child list by `new_child`.
  void replace_child(NodeId old_child, NodeId new_child);
  void detach(NodeId child);

  const Grammar* grammar() const { return grammar_.get(); }
  const MinimalFragmentTable* fragments() const { return fragments_.get(); }
  std::shared_ptr<const Grammar> grammar_ptr() const { return grammar_; }
  std::shared_ptr<const MinimalFragmentTable> fragments_ptr() const { return fragments_; }
  void set_fragments(std::shared_ptr<const MinimalFragmentTable> fragments) { fragments_ = std::move(fragments); }

  /// True iff the node is a child of a list node.
  bool removable(NodeId id) const;

  /// Minimal syntactically valid replacement text for the node.
  std::string fragment_for(NodeId id) const;

  /// Recomputes cached subtree sizes of `id` and all of its ancestors.
  void refresh_sizes_upward(NodeId id);
  void refresh_all_sizes();

  /// Nodes reachable from the root, in document (pre-)order, skipping the
  /// descendants of REPLACED nodes.
  std::vector<NodeId> reachable() const;

  bool is_proper_descendant(NodeId candidate, NodeId ancestor) const;
  std::size_t depth(NodeId id) const;

private:
  std::size_t recompute_size(NodeId id);

  std::shared_ptr<const Grammar> grammar_;
  std::shared_ptr<const MinimalFragmentTable> fragments_;
  std::vector<Node> nodes_;
  NodeId root_;
};

/// Temporary edits applied while serializing, so candidate texts can be
/// produced without mutating the tree.
struct Overlay {
  std::unordered_set<NodeId> removed;
  std::unordered_map<NodeId, std::string> replaced;
  std::unordered_map<NodeId, NodeId> substituted;

  bool empty() const { return removed.empty() && replaced.empty() && substituted.empty(); }
};

/// Maps original node ids to their current replacement; absent keys are identity.
using TransformMap = std::map<NodeId, NodeId>;

std::string serialize(const ParseTree& tree, const Overlay* overlay = nullptr);

std::vector<NodeId> tag_nodes(const ParseTree& tree, std::size_t level);

std::size_t subtree_measure(const ParseTree& tree, NodeId id);

/// Number of nodes reachable from the root (descendants of REPLACED nodes excluded).
std::size_t node_count(const ParseTree& tree);

/// The edits prune_apply would make for a given level and keep set. A node
/// whose text already equals its fragment is left as it is.
Overlay plan_prune(const ParseTree& tree, std::span<const NodeId> level_nodes,
                   const std::unordered_set<NodeId>& keep);

/// Applies a removal/replacement overlay to the tree.
void apply_prune(ParseTree& tree, const Overlay& plan);

void prune_apply(ParseTree& tree, std::size_t level, const std::unordered_set<NodeId>& keep);

/// Checks that every pair maps a node to a strict, same-labelled rule descendant.
void validate_mapping(const ParseTree& tree, const TransformMap& mapping);

Overlay hoist_overlay(const TransformMap& mapping);

void hoist_apply(ParseTree& tree, const TransformMap& mapping);

}  // namespace treemin
