#pragma once

#include "treemin/tree.hpp"

namespace treemin {

/// Drops empty list nodes, then collapses every maximal chain of single-child
/// rule nodes into its lowest member, which moves into the chain's top slot.
/// A list whose only element is another list absorbs that list's elements.
void squeeze(ParseTree& tree);

/// Rewrites left- or right-recursive spines of a list-shaped rule
/// (`L := X | L X` or `L := X | X L`) into one list node holding the X parts.
void flatten_recursion(ParseTree& tree);

struct PreprocessOptions {
  bool squeeze = true;
  bool flatten = true;
};

/// Runs flattening and squeezing until the tree stops changing.
void preprocess(ParseTree& tree, const PreprocessOptions& options = {});

}  // namespace treemin
