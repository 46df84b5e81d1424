#include "treemin/tree_io.hpp"

#include <fstream>
#include <sstream>

namespace treemin {

namespace {

const char* kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Rule: return "rule";
    case NodeKind::Token: return "token";
    case NodeKind::List: return "list";
  }
  return "rule";
}

NodeKind kind_from(const std::string& name) {
  if (name == "rule") return NodeKind::Rule;
  if (name == "token") return NodeKind::Token;
  if (name == "list") return NodeKind::List;
  throw TreeError("unknown node kind '" + name + "'");
}

nlohmann::json node_json(const ParseTree& tree, NodeId id) {
  const Node& n = tree.node(id);
  nlohmann::json j;
  j["kind"] = kind_name(n.kind);
  j["label"] = n.label;
  if (n.kind == NodeKind::Token) {
    j["text"] = n.text;
    if (n.hidden) j["hidden"] = true;
  }
  if (n.kind == NodeKind::List) {
    j["min"] = n.min_children;
    if (!n.fragment_of.empty()) j["fragment_of"] = n.fragment_of;
  }
  if (n.replacement) j["replaced"] = *n.replacement;
  nlohmann::json children = nlohmann::json::array();
  if (n.kind != NodeKind::Token) {
    for (NodeId c : n.children) children.push_back(node_json(tree, c));
  }
  j["children"] = std::move(children);
  return j;
}

NodeId build(ParseTree& tree, const nlohmann::json& j) {
  if (!j.is_object()) throw TreeError("tree node must be an object");
  NodeKind kind = kind_from(j.at("kind").get<std::string>());
  std::string label = j.at("label").get<std::string>();
  std::string text = kind == NodeKind::Token ? j.at("text").get<std::string>() : std::string{};
  if (kind == NodeKind::List) label = kListLabel;
  NodeId id = tree.add_node(kind, std::move(label), std::move(text));
  Node& n = tree.node(id);
  if (kind == NodeKind::Token) {
    if (j.contains("hidden")) {
      n.hidden = j.at("hidden").get<bool>();
    } else if (tree.grammar()) {
      if (auto t = tree.grammar()->find_token(n.label)) n.hidden = tree.grammar()->token(*t).hidden;
    }
  }
  if (kind == NodeKind::List) {
    n.min_children = j.value("min", std::size_t{0});
    n.fragment_of = j.value("fragment_of", std::string{});
  }
  if (j.contains("replaced")) n.replacement = j.at("replaced").get<std::string>();
  if (j.contains("children")) {
    if (kind == NodeKind::Token && !j.at("children").empty()) {
      throw TreeError("token nodes cannot have children");
    }
    for (const auto& c : j.at("children")) {
      NodeId child = build(tree, c);
      tree.append_child(id, child);
    }
  }
  return id;
}

void outline_into(const ParseTree& tree, NodeId id, std::size_t depth, std::string& out) {
  const Node& n = tree.node(id);
  out.append(depth * 2, ' ');
  out += n.label;
  if (n.kind == NodeKind::Token) out += " " + n.text;
  if (n.replacement) out += " => " + *n.replacement;
  out += '\n';
  if (!n.kept()) return;
  for (NodeId c : n.children) outline_into(tree, c, depth + 1, out);
}

}  // namespace

nlohmann::json tree_to_json(const ParseTree& tree) {
  if (!tree.root().valid()) return nullptr;
  return node_json(tree, tree.root());
}

ParseTree tree_from_json(const nlohmann::json& doc, std::shared_ptr<const Grammar> grammar,
                         std::shared_ptr<const MinimalFragmentTable> fragments) {
  ParseTree tree(std::move(grammar), std::move(fragments));
  tree.set_root(build(tree, doc));
  tree.refresh_all_sizes();
  return tree;
}

void write_tree_file(const ParseTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TreeError("cannot write tree file '" + path + "'");
  out << tree_to_json(tree).dump(1) << '\n';
}

ParseTree read_tree_file(const std::string& path, std::shared_ptr<const Grammar> grammar,
                         std::shared_ptr<const MinimalFragmentTable> fragments) {
  std::ifstream in(path);
  if (!in) throw TreeError("cannot read tree file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw TreeError("malformed tree file '" + path + "': " + e.what());
  }
  return tree_from_json(doc, std::move(grammar), std::move(fragments));
}

std::string outline(const ParseTree& tree) {
  std::string out;
  if (tree.root().valid()) outline_into(tree, tree.root(), 0, out);
  return out;
}

}  // namespace treemin
