#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treemin/grammar.hpp"

namespace treemin {

/// Number of characters other than space, tab, newline and carriage return.
std::size_t nonws_size(std::string_view text);

class NonProductiveError : public std::runtime_error {
public:
  explicit NonProductiveError(std::vector<std::string> names);
  const std::vector<std::string>& names() const { return names_; }

private:
  std::vector<std::string> names_;
};

struct Fragment {
  std::string text;  // token min texts joined by single spaces
  std::size_t cost = 0;
};

/// Shortest terminal string derivable from each nonterminal, measured in
/// non-whitespace characters; equal costs are ordered lexicographically.
class MinimalFragmentTable {
public:
  const Fragment& at(std::string_view nonterminal) const;
  bool contains(std::string_view nonterminal) const;
  const std::map<std::string, Fragment, std::less<>>& entries() const { return entries_; }

private:
  friend MinimalFragmentTable minimal_fragment_table(const Grammar& grammar);
  std::map<std::string, Fragment, std::less<>> entries_;
};

MinimalFragmentTable minimal_fragment_table(const Grammar& grammar);

/// Fragment of a symbol occurrence (quantifiers included) given a complete table.
Fragment symbol_fragment(const Grammar& grammar, const MinimalFragmentTable& table, const Symbol& symbol);

}  // namespace treemin
