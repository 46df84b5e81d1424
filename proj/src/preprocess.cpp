#include "treemin/preprocess.hpp"

#include <algorithm>
#include <optional>

namespace treemin {

namespace {

void remove_empty_lists(ParseTree& tree, NodeId id) {
  Node& n = tree.node(id);
  if (!n.kept()) return;
  std::vector<NodeId> children = n.children;
  for (NodeId c : children) {
    const Node& child = tree.node(c);
    if (child.kind == NodeKind::List && child.kept() && child.children.empty()) {
      tree.detach(c);
    } else {
      remove_empty_lists(tree, c);
    }
  }
}

bool single_rule_child(const ParseTree& tree, NodeId id) {
  const Node& n = tree.node(id);
  return n.kind == NodeKind::Rule && n.kept() && n.children.size() == 1 &&
         tree.node(n.children.front()).kind == NodeKind::Rule;
}

bool single_list_child(const ParseTree& tree, NodeId id) {
  const Node& n = tree.node(id);
  if (n.kind != NodeKind::List || !n.kept() || n.children.size() != 1) return false;
  const Node& c = tree.node(n.children.front());
  return c.kind == NodeKind::List && c.kept();
}

// A list whose only element is itself a list holds any sequence of the inner
// elements, so the two merge; the merged list may be empty if either could.
void merge_list_chain(ParseTree& tree, NodeId outer) {
  while (single_list_child(tree, outer)) {
    NodeId inner = tree.node(outer).children.front();
    Node& o = tree.node(outer);
    const Node& i = tree.node(inner);
    o.min_children = std::min(o.min_children, i.min_children);
    o.fragment_of = o.min_children == 0 ? std::string{} : i.fragment_of;
    std::vector<NodeId> elements = i.children;
    tree.detach(inner);
    for (NodeId e : elements) {
      tree.detach(e);
      tree.append_child(outer, e);
    }
  }
}

void squeeze_from(ParseTree& tree, NodeId id) {
  NodeId bottom = id;
  while (single_rule_child(tree, bottom)) bottom = tree.node(bottom).children.front();
  if (bottom != id) {
    tree.detach(bottom);
    tree.replace_child(id, bottom);
  }
  merge_list_chain(tree, bottom);
  const Node& n = tree.node(bottom);
  if (!n.kept()) return;
  std::vector<NodeId> children = n.children;
  for (NodeId c : children) squeeze_from(tree, c);
}

struct ListShape {
  std::string part;  // name of X
  SymbolKind part_kind;
};

// L := X | L X  or  L := X | X L, with X a plain symbol.
std::optional<ListShape> list_shape(const Grammar& g, const std::string& label) {
  auto r = g.find_rule(label);
  if (!r) return std::nullopt;
  const Rule& rule = g.rule(*r);
  Symbol self{SymbolKind::Rule, *r, std::nullopt};
  for (const Alternative& base : rule.alternatives) {
    if (base.symbols.size() != 1 || base.symbols[0].quantifier || base.symbols[0] == self) continue;
    const Symbol& x = base.symbols[0];
    for (const Alternative& rec : rule.alternatives) {
      if (rec.symbols.size() != 2) continue;
      bool left = rec.symbols[0] == self && rec.symbols[1] == x;
      bool right = rec.symbols[0] == x && rec.symbols[1] == self;
      if (left || right) {
        return ListShape{x.is_token() ? g.token(x.index).name : g.rule(x.index).name, x.kind};
      }
    }
  }
  return std::nullopt;
}

bool is_part(const ParseTree& tree, NodeId id, const ListShape& shape) {
  const Node& n = tree.node(id);
  NodeKind kind = shape.part_kind == SymbolKind::Token ? NodeKind::Token : NodeKind::Rule;
  return n.kind == kind && n.label == shape.part;
}

bool is_link(const ParseTree& tree, NodeId id, const std::string& label) {
  const Node& n = tree.node(id);
  return n.kind == NodeKind::Rule && n.kept() && n.label == label;
}

// Collects the parts of the spine rooted at `top` in document order, or
// nothing if some spine node does not follow the list shape.
std::optional<std::vector<NodeId>> spine_parts(const ParseTree& tree, NodeId top, const ListShape& shape) {
  const std::string& label = tree.node(top).label;
  std::vector<NodeId> front;
  std::vector<NodeId> back;
  NodeId cur = top;
  while (true) {
    const Node& n = tree.node(cur);
    if (n.children.size() == 1) {
      if (!is_part(tree, n.children[0], shape)) return std::nullopt;
      front.push_back(n.children[0]);
      break;
    }
    if (n.children.size() != 2) return std::nullopt;
    NodeId a = n.children[0];
    NodeId b = n.children[1];
    if (is_link(tree, a, label) && is_part(tree, b, shape)) {
      back.push_back(b);
      cur = a;
    } else if (is_part(tree, a, shape) && is_link(tree, b, label)) {
      front.push_back(a);
      cur = b;
    } else {
      return std::nullopt;
    }
  }
  std::reverse(back.begin(), back.end());
  front.insert(front.end(), back.begin(), back.end());
  return front;
}

void flatten_from(ParseTree& tree, NodeId id) {
  const Node& n = tree.node(id);
  if (!n.kept()) return;
  NodeId current = id;
  if (n.kind == NodeKind::Rule && tree.grammar()) {
    if (auto shape = list_shape(*tree.grammar(), n.label)) {
      if (auto parts = spine_parts(tree, id, *shape)) {
        std::string label = n.label;
        NodeId list = tree.add_node(NodeKind::List, kListLabel);
        tree.replace_child(id, list);
        for (NodeId p : *parts) {
          tree.detach(p);
          tree.append_child(list, p);
        }
        Node& l = tree.node(list);
        l.min_children = 1;
        l.fragment_of = label;
        current = list;
      }
    }
  }
  std::vector<NodeId> children = tree.node(current).children;
  for (NodeId c : children) flatten_from(tree, c);
}

}  // namespace

void squeeze(ParseTree& tree) {
  if (!tree.root().valid()) return;
  remove_empty_lists(tree, tree.root());
  squeeze_from(tree, tree.root());
  tree.refresh_all_sizes();
}

void flatten_recursion(ParseTree& tree) {
  if (!tree.root().valid()) return;
  flatten_from(tree, tree.root());
  tree.refresh_all_sizes();
}

void preprocess(ParseTree& tree, const PreprocessOptions& options) {
  if (!options.squeeze && !options.flatten) return;
  while (true) {
    std::size_t before = node_count(tree);
    std::string text = serialize(tree);
    if (options.flatten) flatten_recursion(tree);
    if (options.squeeze) squeeze(tree);
    if (node_count(tree) == before && serialize(tree) == text) break;
  }
}

}  // namespace treemin
