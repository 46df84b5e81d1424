#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include <json.hpp>

#include "treemin/tree.hpp"

namespace treemin {

/// Tree interchange document: every node is an object with `kind`
/// ("rule" | "token" | "list"), `label`, `text` (tokens) and `children`.
/// Optional fields: `replaced` (fragment text), `hidden`, and for lists
/// `min` and `fragment_of`.
nlohmann::json tree_to_json(const ParseTree& tree);

/// Rebuilds a tree. Token nodes take their `hidden` flag from the grammar
/// when the document omits it.
ParseTree tree_from_json(const nlohmann::json& doc, std::shared_ptr<const Grammar> grammar,
                         std::shared_ptr<const MinimalFragmentTable> fragments);

void write_tree_file(const ParseTree& tree, const std::string& path);

ParseTree read_tree_file(const std::string& path, std::shared_ptr<const Grammar> grammar,
                         std::shared_ptr<const MinimalFragmentTable> fragments);

/// Indented one-node-per-line outline, for debugging and golden tests.
std::string outline(const ParseTree& tree);

}  // namespace treemin
